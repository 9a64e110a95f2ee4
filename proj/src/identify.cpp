#include "cumident/identify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include "cumident/error.hpp"
#include "cumident/random.hpp"

namespace cumident {

namespace {

using cd = std::complex<double>;

struct EigenPairs {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // columns
};

EigenPairs eigen_pairs(const MatrixXd& h)
{
    if (!h.allFinite())
        throw NumericError("H has non-finite entries");
    Eigen::EigenSolver<MatrixXd> es(h, true);
    if (es.info() != Eigen::Success)
        throw NumericError("eigen-solver failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

// Indices sorted by descending real part, then descending imaginary part,
// then ascending index.
std::vector<int> descending_order(const Eigen::VectorXcd& values)
{
    std::vector<int> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values(a).real() != values(b).real())
            return values(a).real() > values(b).real();
        if (values(a).imag() != values(b).imag())
            return values(a).imag() > values(b).imag();
        return a < b;
    });
    return order;
}

// Rotates the phase so the largest-magnitude coordinate is real, then keeps
// the real part. Real eigenvectors pass through unchanged.
VectorXd real_direction(const Eigen::VectorXcd& v)
{
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    cd phase = v(arg);
    VectorXd out;
    if (std::abs(phase) > 0.0)
        out = (v * (std::conj(phase) / std::abs(phase))).real();
    else
        out = v.real();
    const double norm = out.norm();
    if (norm > 0.0)
        out /= norm;
    return out;
}

double min_relative_gap(const VectorXd& sorted_real, const Eigen::VectorXcd& values)
{
    double scale = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        scale = std::max(scale, std::abs(values(i)));
    if (scale == 0.0)
        return 0.0;
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < sorted_real.size(); ++i)
        gap = std::min(gap, std::abs(sorted_real(i) - sorted_real(i + 1)));
    return sorted_real.size() < 2 ? std::numeric_limits<double>::infinity() : gap / scale;
}

void orient_vector(Eigen::Ref<VectorXd> v, Orientation rule, bool* fell_back)
{
    if (fell_back)
        *fell_back = false;
    if (rule == Orientation::RowSum) {
        const double s = v.sum();
        if (std::abs(s) >= 1e-8) {
            if (s < 0.0)
                v = -v;
            return;
        }
        if (fell_back)
            *fell_back = true;
    }
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0)
        v = -v;
}

}  // namespace

const char* to_string(Orientation rule)
{
    return rule == Orientation::RowSum ? "A" : "B";
}

ProbeVectors ProbeVectors::draw(int d, std::uint64_t seed)
{
    return with_w2(d, seed, VectorXd::Ones(d));
}

ProbeVectors ProbeVectors::with_w2(int d, std::uint64_t seed, VectorXd w2)
{
    if (d < 1)
        throw InputError("probe dimension must be positive");
    if (w2.size() != d)
        throw InputError("w2 has length " + std::to_string(w2.size()) + ", expected " + std::to_string(d));
    Rng rng(substream_seed(seed, 0x77317731));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    VectorXd w1(d);
    for (int i = 0; i < d; ++i)
        w1(i) = unif(rng);
    return {std::move(w1), std::move(w2), seed};
}

double condition_number(const MatrixXd& m)
{
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0)
        return std::numeric_limits<double>::infinity();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0))
        return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

MatrixXd build_H(const MatrixXd& g1, const MatrixXd& g2, double cond_cap)
{
    if (g1.rows() != g1.cols() || g2.rows() != g2.cols() || g1.rows() != g2.rows())
        throw InputError("contraction matrices must be square and of equal size");
    if (!g1.allFinite() || !g2.allFinite())
        throw NumericError("contraction matrix has non-finite entries");
    const double cond = condition_number(g2);
    if (!(cond <= cond_cap)) {
        std::ostringstream os;
        os << "G(w2) is singular or ill-conditioned (condition " << cond << " > cap " << cond_cap
           << "); (A'w2) may have a near-zero coordinate or a shock may lack skewness, consider the tall "
              "pseudoinverse path";
        throw NumericError(os.str(), cond);
    }
    return g2.partialPivLu().solve(g1);
}

MatrixXd build_H(const ContractionMatrix& g1, const ContractionMatrix& g2, double cond_cap)
{
    return build_H(g1.matrix, g2.matrix, cond_cap);
}

void orient_rows(MatrixXd& rows, Orientation rule, std::vector<int>* fallback_rows)
{
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        VectorXd v = rows.row(r).transpose();
        bool fell_back = false;
        orient_vector(v, rule, &fell_back);
        rows.row(r) = v.transpose();
        if (fell_back && fallback_rows)
            fallback_rows->push_back(static_cast<int>(r));
    }
}

DemixingEstimate demix_from_H(const MatrixXd& h, const IdentifyOptions& options)
{
    const EigenPairs ep = eigen_pairs(h);
    const auto order = descending_order(ep.values);
    const Eigen::Index d = h.rows();

    DemixingEstimate est;
    est.orientation_rule = options.rule;
    est.lambda_tilde.resize(d, d);
    est.eigenvalues.resize(d);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        scale = std::max(scale, std::abs(ep.values(i)));
        est.max_imag = std::max(est.max_imag, std::abs(ep.values(i).imag()));
    }
    for (Eigen::Index r = 0; r < d; ++r) {
        const int k = order[r];
        est.eigenvalues(r) = ep.values(k).real();
        est.lambda_tilde.row(r) = real_direction(ep.vectors.col(k)).transpose();
    }
    orient_rows(est.lambda_tilde, options.rule, &est.fallback_rows);

    est.min_relative_gap = min_relative_gap(est.eigenvalues, ep.values);
    if (est.min_relative_gap < options.gap_tol) {
        est.near_degenerate = true;
        est.warnings.push_back("near-repeated eigenvalues (relative gap " + std::to_string(est.min_relative_gap) +
                               ")");
    }
    if (est.max_imag > options.imag_warn * scale) {
        est.complex_warning = true;
        est.warnings.push_back("complex eigenvalues (max |imag| " + std::to_string(est.max_imag) +
                               "); real parts returned");
    }
    for (int r : est.fallback_rows)
        est.warnings.push_back("row " + std::to_string(r) + " has near-zero sum; oriented by largest entry");
    return est;
}

DemixingEstimate estimate_demixing(const Sample& sample, const ProbeVectors& probes, const IdentifyOptions& options)
{
    if (probes.w1.size() != sample.d() || probes.w2.size() != sample.d())
        throw InputError("probe vectors do not match the sample dimension");
    const auto g1 = contract_hessian(sample.data(), probes.w1, options.order);
    const auto g2 = contract_hessian(sample.data(), probes.w2, options.order);
    const MatrixXd h = build_H(g1, g2, options.cond_cap);
    DemixingEstimate est = demix_from_H(h, options);
    est.cond_g2 = condition_number(g2.matrix);
    return est;
}

DemixingEstimate estimate_demixing(const CumulantTensor3& c3, const ProbeVectors& probes,
                                   const IdentifyOptions& options)
{
    if (options.order != 3)
        throw ConfigError("the tensor route supports order 3 only");
    if (probes.w1.size() != c3.dim() || probes.w2.size() != c3.dim())
        throw InputError("probe vectors do not match the tensor dimension");
    const auto g1 = contract_hessian(c3, probes.w1);
    const auto g2 = contract_hessian(c3, probes.w2);
    const MatrixXd h = build_H(g1, g2, options.cond_cap);
    DemixingEstimate est = demix_from_H(h, options);
    est.cond_g2 = condition_number(g2.matrix);
    return est;
}

MixingEstimate estimate_mixing_tall(const Sample& sample, const ProbeVectors& probes, std::optional<int> d2,
                                    Orientation rule)
{
    const int d1 = static_cast<int>(sample.d());
    if (probes.w1.size() != d1 || probes.w2.size() != d1)
        throw InputError("probe vectors do not match the sample dimension");
    if (d2 && (*d2 < 1 || *d2 > d1))
        throw ConfigError("rank d2 must lie in [1, d1], got " + std::to_string(*d2));

    const auto g1 = contract_hessian(sample.data(), probes.w1, 3);
    const auto g2 = contract_hessian(sample.data(), probes.w2, 3);
    Eigen::JacobiSVD<MatrixXd> svd(g2.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const VectorXd& s = svd.singularValues();

    MixingEstimate out;
    out.singular_values = s;
    int rank = 0;
    if (d2) {
        rank = *d2;
        out.sv_threshold = s(rank - 1);
    } else {
        const double thr = 1e-8 * std::sqrt(static_cast<double>(d1)) * s(0);
        out.sv_threshold = thr;
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            if (s(i) > thr)
                ++rank;
            if (s(i) > thr / 10.0 && s(i) <= thr * 10.0) {
                std::ostringstream os;
                os << "automatic rank detection is unstable: singular value " << s(i)
                   << " lies within a factor 10 of the cutoff " << thr << "; pass d2 explicitly";
                throw NumericError(os.str());
            }
        }
        if (rank == 0)
            throw NumericError("G(w2) is numerically zero; no skewed component detected");
    }
    if (!(s(rank - 1) > 0.0))
        throw NumericError("G(w2) has fewer than d2 nonzero singular values");

    VectorXd inv = VectorXd::Zero(s.size());
    for (int i = 0; i < rank; ++i)
        inv(i) = 1.0 / s(i);
    const MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    const MatrixXd h = g1.matrix * pinv;

    const EigenPairs ep = eigen_pairs(h);
    std::vector<int> by_mag(ep.values.size());
    std::iota(by_mag.begin(), by_mag.end(), 0);
    std::stable_sort(by_mag.begin(), by_mag.end(),
                     [&](int a, int b) { return std::abs(ep.values(a)) > std::abs(ep.values(b)); });
    by_mag.resize(rank);
    Eigen::VectorXcd kept(rank);
    for (int i = 0; i < rank; ++i)
        kept(i) = ep.values(by_mag[i]);
    const auto order = descending_order(kept);

    out.rank_used = rank;
    out.a_columns.resize(d1, rank);
    out.eigenvalues.resize(rank);
    for (int c = 0; c < rank; ++c) {
        const int k = by_mag[order[c]];
        out.eigenvalues(c) = ep.values(k).real();
        out.max_imag = std::max(out.max_imag, std::abs(ep.values(k).imag()));
        VectorXd v = real_direction(ep.vectors.col(k));
        orient_vector(v, rule, nullptr);
        out.a_columns.col(c) = v;
    }
    return out;
}

MatrixXd build_H_sigma(const Sample& sample, const VectorXd& w1)
{
    if (w1.size() != sample.d())
        throw InputError("w1 does not match the sample dimension");
    const MatrixXd sigma = sample.covariance();
    const double cond = condition_number(sigma);
    if (!(cond <= 1e12))
        throw NumericError("sample covariance is singular (condition " + std::to_string(cond) + ")", cond);
    const auto g1 = contract_hessian(sample.data(), w1, 3);
    return sigma.ldlt().solve(g1.matrix);
}

double angular_distance(const VectorXd& a, const VectorXd& b)
{
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0)
        return M_PI / 2.0;
    const double c = std::min(1.0, std::abs(a.dot(b)) / (na * nb));
    // acos loses precision near 1; use the sine via the orthogonal residual.
    const VectorXd ua = a / na, ub = b / nb;
    const double s = (ub - ua.dot(ub) * ua).norm();
    return std::atan2(s, c);
}

}  // namespace cumident
