#include "cumident/inference.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "cumident/error.hpp"
#include "cumident/parallel.hpp"

namespace cumident {

namespace {

VectorXd row_major(const MatrixXd& m)
{
    VectorXd v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            v(i * m.cols() + j) = m(i, j);
    return v;
}

MatrixXd symmetrize(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

std::string monomial_name(const MonomialIndex& idx, int pos)
{
    std::ostringstream os;
    const auto& f = idx.factors(pos);
    for (int q = 0; q < 3 && f[q] >= 0; ++q)
        os << (q ? "*" : "") << "X" << (f[q] + 1);
    return os.str();
}

JackknifeResult summarize(MatrixXd estimates, double n)
{
    JackknifeResult res;
    res.mean = estimates.colwise().mean().transpose();
    const MatrixXd dev = estimates.rowwise() - res.mean.transpose();
    res.variance = symmetrize((n - 1.0) * (dev.transpose() * dev));
    res.estimates = std::move(estimates);
    return res;
}

}  // namespace

DemixingPipeline::DemixingPipeline(ProbeVectors probes, IdentifyOptions options, Labeler labeler)
    : probes_(std::move(probes)), options_(options), labeler_(std::move(labeler))
{
    if (options_.order != 3)
        throw ConfigError("moment-based inference supports cumulant order 3 only");
}

DemixingEstimate DemixingPipeline::demix(const RawMomentVector& m) const
{
    return estimate_demixing(cumulant_map(m), probes_, options_);
}

StatOutput DemixingPipeline::run(const RawMomentVector& m) const
{
    const DemixingEstimate est = demix(m);
    StatOutput out;
    out.near_degenerate = est.near_degenerate;
    if (labeler_) {
        LabelingResult lab = labeler_(est.lambda_tilde);
        out.value = row_major(lab.lambda_final);
        out.labels = std::move(lab.permutation);
    } else {
        out.value = row_major(est.lambda_tilde);
    }
    return out;
}

VectorXd DemixingPipeline::labeled_with(const RawMomentVector& m, const std::vector<int>& permutation) const
{
    return row_major(apply_labeling(demix(m).lambda_tilde, permutation));
}

MatrixXd numerical_jacobian(const MomentStatistic& statistic, const RawMomentVector& m_hat, double step_scale,
                            VectorXd* steps)
{
    const MonomialIndex idx(m_hat.d);
    if (m_hat.values.size() != idx.size())
        throw InputError("raw moment vector has the wrong length for d = " + std::to_string(m_hat.d));
    const VectorXd f0 = statistic(m_hat);
    const Eigen::Index p = f0.size();
    const Eigen::Index dm = m_hat.values.size();
    const double base_step = std::cbrt(std::numeric_limits<double>::epsilon()) * step_scale;

    MatrixXd jac(p, dm);
    VectorXd used(dm);
    RawMomentVector probe = m_hat;
    for (Eigen::Index j = 0; j < dm; ++j) {
        const double h = base_step * std::max(1.0, std::abs(m_hat.values(j)));
        used(j) = h;
        VectorXd fp, fm;
        try {
            probe.values(j) = m_hat.values(j) + h;
            fp = statistic(probe);
            probe.values(j) = m_hat.values(j) - h;
            fm = statistic(probe);
        } catch (const Error& e) {
            throw NumericError("statistic failed when perturbing coordinate " + std::to_string(j) + " (" +
                               monomial_name(idx, static_cast<int>(j)) + "): " + e.what());
        }
        probe.values(j) = m_hat.values(j);
        if (fp.size() != p || fm.size() != p)
            throw NumericError("statistic changed output length at coordinate " + std::to_string(j));
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    if (steps)
        *steps = used;
    return jac;
}

MatrixXd moment_covariance(const Eigen::Ref<const MatrixXd>& x)
{
    const MatrixXd rows = monomial_rows(x);
    const MatrixXd dev = rows.rowwise() - rows.colwise().mean();
    return symmetrize(dev.transpose() * dev / static_cast<double>(x.rows()));
}

DeltaVarianceResult delta_variance(const Eigen::Ref<const MatrixXd>& x, const MomentStatistic& statistic)
{
    DeltaVarianceResult res;
    const RawMomentVector m = raw_moments(x);
    res.sigma_m = moment_covariance(x);
    if (!res.sigma_m.allFinite())
        throw NumericError("raw-moment covariance is not finite; sixth moments appear unbounded");
    res.estimate = statistic(m);
    res.jacobian = numerical_jacobian(statistic, m, 1.0, &res.fd_step);
    res.sigma_u = symmetrize(res.jacobian * res.sigma_m * res.jacobian.transpose());
    return res;
}

DeltaVarianceResult delta_variance(const Sample& sample, const ProbeVectors& probes, std::optional<int> k,
                                   const IdentifyOptions& options)
{
    const Eigen::Index d = sample.d();
    if (k && (*k < 0 || *k >= d))
        throw ConfigError("eigenvector index out of range");
    if (options.order != 3)
        throw ConfigError("delta-method inference supports cumulant order 3 only");
    const MomentStatistic stat = [&](const RawMomentVector& m) -> VectorXd {
        const DemixingEstimate est = estimate_demixing(cumulant_map(m), probes, options);
        if (k)
            return est.lambda_tilde.row(*k).transpose();
        return row_major(est.lambda_tilde);
    };
    return delta_variance(sample.centered(), stat);
}

DeltaVarianceResult delta_variance(const Sample& sample, const DemixingPipeline& pipeline)
{
    const MatrixXd xc = sample.centered();
    if (!pipeline.has_labeler())
        return delta_variance(xc, [&](const RawMomentVector& m) { return pipeline.run(m).value; });
    const StatOutput base = pipeline.run(raw_moments(xc));
    const std::vector<int> perm = base.labels;
    return delta_variance(xc, [&](const RawMomentVector& m) { return pipeline.labeled_with(m, perm); });
}

JackknifeResult jackknife_variance(const Eigen::Ref<const MatrixXd>& x,
                                   const std::function<StatOutput(const MatrixXd&)>& estimator)
{
    const Eigen::Index n = x.rows();
    if (n < 30)
        throw InputError("jackknife needs n >= 30, got " + std::to_string(n));
    const StatOutput full = estimator(x);
    const Eigen::Index p = full.value.size();
    MatrixXd est(n, p);
    std::vector<char> flipped(n, 0), degenerate(n, 0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const Eigen::Index r = static_cast<Eigen::Index>(i);
        MatrixXd reduced(n - 1, x.cols());
        reduced.topRows(r) = x.topRows(r);
        reduced.bottomRows(n - 1 - r) = x.bottomRows(n - 1 - r);
        StatOutput o;
        try {
            o = estimator(reduced);
        } catch (const Error& e) {
            throw NumericError("leave-one-out estimate failed at observation " + std::to_string(i) + ": " +
                               e.what());
        }
        est.row(r) = o.value.transpose();
        flipped[i] = o.labels != full.labels;
        degenerate[i] = o.near_degenerate;
    });
    JackknifeResult res = summarize(std::move(est), static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        res.label_flips += flipped[i];
        res.near_degenerate += degenerate[i];
    }
    return res;
}

JackknifeResult jackknife_moments(const Eigen::Ref<const MatrixXd>& x,
                                  const std::function<StatOutput(const RawMomentVector&)>& estimator, bool center)
{
    const Eigen::Index n = x.rows();
    if (n < 30)
        throw InputError("jackknife needs n >= 30, got " + std::to_string(n));
    const MatrixXd data = center ? MatrixXd(x.rowwise() - x.colwise().mean()) : MatrixXd(x);
    const MatrixXd rows = monomial_rows(data);
    const VectorXd total = rows.colwise().sum().transpose();
    const int d = static_cast<int>(x.cols());

    const StatOutput full = estimator(RawMomentVector{total / static_cast<double>(n), d});
    const Eigen::Index p = full.value.size();
    MatrixXd est(n, p);
    std::vector<char> flipped(n, 0), degenerate(n, 0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const Eigen::Index r = static_cast<Eigen::Index>(i);
        RawMomentVector m{(total - rows.row(r).transpose()) / static_cast<double>(n - 1), d};
        StatOutput o;
        try {
            o = estimator(m);
        } catch (const Error& e) {
            throw NumericError("leave-one-out estimate failed at observation " + std::to_string(i) + ": " +
                               e.what());
        }
        if (o.value.size() != p)
            throw NumericError("leave-one-out estimate changed length at observation " + std::to_string(i));
        est.row(r) = o.value.transpose();
        flipped[i] = o.labels != full.labels;
        degenerate[i] = o.near_degenerate;
    });
    JackknifeResult res = summarize(std::move(est), static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        res.label_flips += flipped[i];
        res.near_degenerate += degenerate[i];
    }
    return res;
}

JackknifeResult jackknife_variance(const Sample& sample, const DemixingPipeline& pipeline)
{
    return jackknife_moments(sample.data(), [&](const RawMomentVector& m) { return pipeline.run(m); }, true);
}

double normal_quantile(double p)
{
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval confidence_interval(double point, double variance, double n, double level)
{
    if (!(level > 0.0 && level < 1.0))
        throw ConfigError("confidence level must lie in (0, 1)");
    if (!(variance >= 0.0))
        throw InputError("variance must be non-negative");
    if (!(n > 0.0))
        throw InputError("sample size must be positive");
    const double half = normal_quantile(0.5 * (1.0 + level)) * std::sqrt(variance / n);
    return {point - half, point + half};
}

}  // namespace cumident
