#include "cumident/var.hpp"

#include <string>

#include "cumident/error.hpp"
#include "cumident/parallel.hpp"

namespace cumident {

namespace {

MatrixXd solve_least_squares(const MatrixXd& design, const MatrixXd& targets, const char* what)
{
    Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols())
        throw NumericError(std::string(what) + ": regressor matrix is rank deficient (rank " +
                           std::to_string(qr.rank()) + " of " + std::to_string(design.cols()) + ")");
    return qr.solve(targets);
}

}  // namespace

VarFit fit_var(const MatrixXd& series, int p, bool intercept)
{
    if (p < 1)
        throw ConfigError("VAR lag must be at least 1");
    const Eigen::Index t_total = series.rows();
    const Eigen::Index d = series.cols();
    if (d < 1)
        throw InputError("VAR series has no columns");
    if (!series.allFinite())
        throw InputError("VAR series contains non-finite values");
    if (t_total <= d * p + d + 1)
        throw InputError("VAR needs T > d p + d + 1 observations, got T = " + std::to_string(t_total));

    const Eigen::Index rows = t_total - p;
    const Eigen::Index k = d * p + (intercept ? 1 : 0);
    MatrixXd design(rows, k);
    for (int l = 1; l <= p; ++l)
        design.middleCols((l - 1) * d, d) = series.middleRows(p - l, rows);
    if (intercept)
        design.col(k - 1).setOnes();
    const MatrixXd y = series.bottomRows(rows);
    const MatrixXd beta = solve_least_squares(design, y, "VAR");

    VarFit fit;
    fit.lag = p;
    fit.has_intercept = intercept;
    for (int l = 0; l < p; ++l)
        fit.coefficients.push_back(beta.middleRows(l * d, d).transpose());
    if (intercept)
        fit.intercept = beta.row(k - 1).transpose();
    fit.residuals = y - design * beta;
    return fit;
}

MatrixXd partial_out(const MatrixXd& targets, const MatrixXd& controls)
{
    if (targets.rows() != controls.rows())
        throw InputError("targets and controls have different row counts");
    if (!targets.allFinite() || !controls.allFinite())
        throw InputError("partial_out input contains non-finite values");
    MatrixXd design(controls.rows(), controls.cols() + 1);
    design.leftCols(controls.cols()) = controls;
    design.col(controls.cols()).setOnes();
    const MatrixXd beta = solve_least_squares(design, targets, "partial_out");
    return targets - design * beta;
}

std::vector<std::pair<int, int>> all_pairs(int d)
{
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            out.emplace_back(i, j);
    return out;
}

PairwiseReport pairwise_overid(const VarFit& fit, const std::vector<std::pair<int, int>>& pairs,
                               std::uint64_t probe_seed, double alpha, OmegaMethod method)
{
    const int d = static_cast<int>(fit.residuals.cols());
    for (const auto& [i, j] : pairs)
        if (i < 0 || j < 0 || i >= d || j >= d || i == j)
            throw ConfigError("invalid residual pair (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");

    PairwiseReport report;
    report.lag = fit.lag;
    report.n_effective = static_cast<int>(fit.residuals.rows());
    report.alpha = alpha;
    report.pairs.resize(pairs.size());
    const ProbeVectors probes = ProbeVectors::draw(2, probe_seed);
    WaldOptions opts;
    opts.method = method;

    parallel_for(pairs.size(), [&](std::size_t q) {
        PairOutcome& out = report.pairs[q];
        out.i = pairs[q].first;
        out.j = pairs[q].second;
        MatrixXd sub(fit.residuals.rows(), 2);
        sub.col(0) = fit.residuals.col(out.i);
        sub.col(1) = fit.residuals.col(out.j);
        try {
            out.result = wald_test(Sample(std::move(sub)), probes, opts);
            out.ok = true;
        } catch (const Error& e) {
            out.error = e.what();
        }
    });
    return report;
}

}  // namespace cumident
