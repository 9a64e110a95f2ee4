#pragma once

#include <string>

#include <Eigen/Dense>

#include "cumident/cumulant.hpp"
#include "cumident/identify.hpp"

namespace cumident {

enum class OmegaMethod { Delta, Jackknife };

const char* to_string(OmegaMethod method);

struct TestResult {
    double statistic = 0.0;  // T_n = n r' Omega^{-1} r
    int dof = 0;             // d (d - 1) / 2
    double p_value = 1.0;
    VectorXd r_hat;          // strict upper triangle of L Sigma L'
    MatrixXd omega_hat;      // sqrt(n) scale, PSD-projected
    OmegaMethod method = OmegaMethod::Delta;
    double omega_condition = 0.0;
    VectorXd jacobian_singular_values;  // delta method only
    DemixingEstimate estimate;
};

struct WaldOptions {
    OmegaMethod method = OmegaMethod::Delta;
    IdentifyOptions identify{};
    double omega_cond_cap = 1e12;
};

// Strict upper triangle, row-major. The input is symmetrised first; an
// asymmetry above 1e-8 * max|m| is rejected.
VectorXd vech_off(const MatrixXd& m);

// vech_off(L Sigma L') with Sigma the 1/n sample covariance. The demixing
// estimate must come from third cumulants only.
VectorXd overid_restrictions(const Sample& sample, const DemixingEstimate& est);

// R(theta): the restriction vector as a function of the raw moments.
VectorXd restriction_map(const RawMomentVector& m, const ProbeVectors& probes, const IdentifyOptions& options = {});

// Wald test of joint diagonality of the covariance and the third cumulant.
TestResult wald_test(const Sample& sample, const ProbeVectors& probes, const WaldOptions& options = {});

double chi_square_sf(double x, int dof);

}  // namespace cumident
