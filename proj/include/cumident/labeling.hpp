#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cumident/identify.hpp"

namespace cumident {

// Entries in {-1, 0, +1}; zero marks an entry restricted to be zero, which
// carries no sign information and is skipped when counting mismatches.
using SignPattern = Eigen::MatrixXi;

struct LabelingResult {
    // permutation[i] = row of lambda_tilde placed at position i.
    std::vector<int> permutation;
    // scales[i] = lambda_tilde(permutation[i], i), the divisor giving diag 1.
    VectorXd scales;
    MatrixXd lambda_final;
    double residual_mismatch = 0.0;
    // Secondary criterion for sign labeling: summed |entry| of mismatched
    // signs. Zero for triangular labeling.
    double violation_mass = 0.0;
    std::vector<std::string> warnings;
};

// Largest dimension handled by exhaustive permutation search.
inline constexpr int kExhaustiveLabelingMax = 8;

// Reorders rows by `permutation` and divides row i by its i-th entry.
MatrixXd apply_labeling(const MatrixXd& lambda_tilde, const std::vector<int>& permutation);

LabelingResult label_by_signs(const DemixingEstimate& est, const SignPattern& pattern);
LabelingResult label_by_signs(const MatrixXd& lambda_tilde, const SignPattern& pattern);

LabelingResult label_by_triangular(const DemixingEstimate& est);
LabelingResult label_by_triangular(const MatrixXd& lambda_tilde);

}  // namespace cumident
