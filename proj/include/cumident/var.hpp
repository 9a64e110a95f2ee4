#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cumident/identify.hpp"
#include "cumident/overid.hpp"

namespace cumident {

struct VarFit {
    std::vector<MatrixXd> coefficients;  // A_1 .. A_p, each d x d
    MatrixXd residuals;                  // (T - p) x d
    VectorXd intercept;                  // empty without intercept
    int lag = 0;
    bool has_intercept = false;
};

struct PairOutcome {
    int i = 0;
    int j = 0;
    bool ok = false;
    TestResult result;
    std::string error;
};

struct PairwiseReport {
    std::vector<PairOutcome> pairs;
    int lag = 0;
    int n_effective = 0;
    double alpha = 0.05;
};

// Equation-by-equation least squares of Y_t on Y_{t-1}..Y_{t-p} (and a
// constant). Requires T > d p + d + 1.
VarFit fit_var(const MatrixXd& series, int p, bool intercept = true);

// Residuals of each target column on controls plus an intercept.
MatrixXd partial_out(const MatrixXd& targets, const MatrixXd& controls);

std::vector<std::pair<int, int>> all_pairs(int d);

// Wald test on each 2-column residual subsystem. Failures are recorded per
// pair without stopping the others.
PairwiseReport pairwise_overid(const VarFit& fit, const std::vector<std::pair<int, int>>& pairs,
                               std::uint64_t probe_seed, double alpha = 0.05,
                               OmegaMethod method = OmegaMethod::Delta);

}  // namespace cumident
