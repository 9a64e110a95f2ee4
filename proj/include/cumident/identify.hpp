#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cumident/cumulant.hpp"

namespace cumident {

// w1 is drawn uniformly from the unit cube; w2 defaults to the ones vector.
struct ProbeVectors {
    VectorXd w1;
    VectorXd w2;
    std::uint64_t seed = 0;

    static ProbeVectors draw(int d, std::uint64_t seed);
    static ProbeVectors with_w2(int d, std::uint64_t seed, VectorXd w2);
};

enum class Orientation {
    RowSum,        // rule A: entries of each vector sum to a positive number
    LargestEntry,  // rule B: largest-magnitude coordinate is positive
};

const char* to_string(Orientation rule);

struct IdentifyOptions {
    int order = 3;
    Orientation rule = Orientation::RowSum;
    double cond_cap = 1e10;
    double gap_tol = 1e-6;
    double imag_warn = 0.1;
};

struct DemixingEstimate {
    MatrixXd lambda_tilde;  // rows: unit-norm oriented eigenvectors of H
    VectorXd eigenvalues;   // real parts, descending
    double max_imag = 0.0;
    Orientation orientation_rule = Orientation::RowSum;
    double cond_g2 = 0.0;
    double min_relative_gap = 0.0;
    bool near_degenerate = false;
    bool complex_warning = false;
    std::vector<int> fallback_rows;  // rows where rule A fell back to rule B
    std::vector<std::string> warnings;
};

struct MixingEstimate {
    MatrixXd a_columns;  // d1 x d2, unit-norm oriented columns
    VectorXd eigenvalues;
    int rank_used = 0;
    double sv_threshold = 0.0;
    VectorXd singular_values;  // spectrum of G(w2)
    double max_imag = 0.0;
};

double condition_number(const MatrixXd& m);

// H = g2^{-1} g1 through an LU solve. Throws NumericError carrying the
// condition estimate when g2 is singular or its condition exceeds the cap.
MatrixXd build_H(const MatrixXd& g1, const MatrixXd& g2, double cond_cap = 1e10);
MatrixXd build_H(const ContractionMatrix& g1, const ContractionMatrix& g2, double cond_cap = 1e10);

// Applies the orientation rule to each row in place. Rows where rule A is
// numerically undecidable (|row sum| < 1e-8) use rule B and are reported.
void orient_rows(MatrixXd& rows, Orientation rule, std::vector<int>* fallback_rows = nullptr);

// Eigendecomposition of H: sort by descending real part (ties by descending
// imaginary part, then index), take real parts, normalise, orient.
DemixingEstimate demix_from_H(const MatrixXd& h, const IdentifyOptions& options = {});

DemixingEstimate estimate_demixing(const Sample& sample, const ProbeVectors& probes,
                                   const IdentifyOptions& options = {});

// Third-order estimate from a cumulant tensor (the raw-moment route).
DemixingEstimate estimate_demixing(const CumulantTensor3& c3, const ProbeVectors& probes,
                                   const IdentifyOptions& options = {});

// Tall or partially skewed mixing: H = G(w1) G(w2)^+ with a rank-truncated
// pseudoinverse. With no d2 the rank is read off the singular values of
// G(w2) using the cutoff eps * sigma_max, eps = 1e-8 * sqrt(d1).
MixingEstimate estimate_mixing_tall(const Sample& sample, const ProbeVectors& probes,
                                    std::optional<int> d2 = std::nullopt,
                                    Orientation rule = Orientation::RowSum);

// Sigma^{-1} G(w1): the covariance-based variant.
MatrixXd build_H_sigma(const Sample& sample, const VectorXd& w1);

// Angle in radians between the lines spanned by a and b (sign-insensitive).
double angular_distance(const VectorXd& a, const VectorXd& b);

}  // namespace cumident
