#include "cumident/overid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "cumident/error.hpp"
#include "cumident/inference.hpp"

namespace cumident {

const char* to_string(OmegaMethod method)
{
    return method == OmegaMethod::Delta ? "delta" : "jackknife";
}

VectorXd vech_off(const MatrixXd& m)
{
    if (m.rows() != m.cols())
        throw InputError("vech_off needs a square matrix");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw InputError("vech_off input is not symmetric");
    const MatrixXd s = 0.5 * (m + m.transpose());
    const Eigen::Index d = m.rows();
    VectorXd out(d * (d - 1) / 2);
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j)
            out(pos++) = s(i, j);
    return out;
}

VectorXd overid_restrictions(const Sample& sample, const DemixingEstimate& est)
{
    if (est.lambda_tilde.rows() != sample.d() || est.lambda_tilde.cols() != sample.d())
        throw InputError("demixing estimate does not match the sample dimension");
    const MatrixXd& l = est.lambda_tilde;
    return vech_off(l * sample.covariance() * l.transpose());
}

VectorXd restriction_map(const RawMomentVector& m, const ProbeVectors& probes, const IdentifyOptions& options)
{
    const DemixingEstimate est = estimate_demixing(cumulant_map(m), probes, options);
    const MatrixXd& l = est.lambda_tilde;
    return vech_off(l * covariance_map(m) * l.transpose());
}

double chi_square_sf(double x, int dof)
{
    if (!(x > 0.0))
        return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), x));
}

TestResult wald_test(const Sample& sample, const ProbeVectors& probes, const WaldOptions& options)
{
    if (options.identify.order != 3)
        throw ConfigError("the overidentification test uses third cumulants only");
    const Eigen::Index d = sample.d();

    TestResult res;
    res.method = options.method;
    res.dof = static_cast<int>(d * (d - 1) / 2);
    res.estimate = estimate_demixing(sample, probes, options.identify);
    if (res.estimate.near_degenerate)
        throw NumericError("eigenvalues of H are not separated (relative gap " +
                           std::to_string(res.estimate.min_relative_gap) +
                           "); the eigenvector map is not differentiable here");
    res.r_hat = overid_restrictions(sample, res.estimate);

    const MatrixXd xc = sample.centered();
    const auto rmap = [&](const RawMomentVector& m) { return restriction_map(m, probes, options.identify); };
    MatrixXd omega;
    if (options.method == OmegaMethod::Delta) {
        const RawMomentVector theta = raw_moments(xc);
        const MatrixXd jac = numerical_jacobian(rmap, theta);
        const MatrixXd sigma_theta = moment_covariance(xc);
        if (!sigma_theta.allFinite())
            throw NumericError("raw-moment covariance is not finite");
        omega = jac * sigma_theta * jac.transpose();
        res.jacobian_singular_values = Eigen::JacobiSVD<MatrixXd>(jac).singularValues();
    } else {
        const JackknifeResult jk = jackknife_moments(
            xc, [&](const RawMomentVector& m) { return StatOutput{rmap(m), {}, false}; }, false);
        omega = jk.variance;
    }
    omega = 0.5 * (omega + omega.transpose()).eval();
    if (!omega.allFinite())
        throw NumericError("Omega estimate is not finite");

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(omega);
    VectorXd evals = es.eigenvalues();
    const double lmax = evals.maxCoeff();
    const double lmin = evals.minCoeff();
    res.omega_condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    if (!(lmax > 0.0) || !(res.omega_condition <= options.omega_cond_cap)) {
        std::ostringstream os;
        os << "Omega estimate is singular (condition " << res.omega_condition
           << "); the overidentifying restrictions look locally redundant (full row rank of the restriction "
              "Jacobian fails)";
        throw NumericError(os.str(), res.omega_condition);
    }
    const double floor = 1e-12 * evals.sum();
    for (Eigen::Index i = 0; i < evals.size(); ++i)
        evals(i) = std::max(evals(i), floor);
    res.omega_hat = es.eigenvectors() * evals.asDiagonal() * es.eigenvectors().transpose();

    const VectorXd proj = es.eigenvectors().transpose() * res.r_hat;
    double q = 0.0;
    for (Eigen::Index i = 0; i < proj.size(); ++i)
        q += proj(i) * proj(i) / evals(i);
    res.statistic = static_cast<double>(sample.n()) * q;
    res.p_value = chi_square_sf(res.statistic, res.dof);
    return res;
}

}  // namespace cumident
