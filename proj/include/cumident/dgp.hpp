#pragma once

#include <array>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "cumident/random.hpp"

namespace cumident {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Two-equation simultaneous system with composite structural errors:
//   Lambda X* = s + sqrt(k/3) Gamma e,   X = X* + sqrt(k) eps
// s_1, s_2 ~ Gamma(1, 1); e_j symmetric Pearson with kurtosis kurtoses[j];
// (eps_1, eps_2) ~ N(0, meas_cov).
struct CompositeDgpConfig {
    int n = 5000;
    double k = 0.0;
    std::array<double, 3> kurtoses{3.0, 4.0, 5.0};
    std::uint64_t seed = 1;
    Eigen::Matrix2d lambda_true = (Eigen::Matrix2d() << 1.0, 1.5, -0.5, 1.0).finished();
    Eigen::Matrix<double, 2, 3> gamma_loadings =
        (Eigen::Matrix<double, 2, 3>() << 0.5, -1.0, 1.5, -1.0, 1.0, -1.0).finished();
    Eigen::Matrix2d meas_cov = (Eigen::Matrix2d() << 1.0, -0.45, -0.45, 0.25).finished();

    void validate() const;
};

// Underlying draws of one replication, one row per observation:
//   s1, s2, e1, e2, e3, eps1, eps2, z
// Rows are generated sequentially from a per-replication stream, so a longer
// draw extends a shorter one with the same replication index.
struct LatentDraws {
    MatrixXd values;

    enum Column { S1 = 0, S2, E1, E2, E3, Eps1, Eps2, Z, Count };
};

struct CompositeDraw {
    MatrixXd x;   // n x 2 observables
    VectorXd s2;  // oracle instrument
    VectorXd z;   // independent N(0, 1) used to dilute the instrument
};

// Zero-mean, unit-variance symmetric Pearson draw with kurtosis >= 3:
// normal at 3, otherwise a unit-variance Student t (Pearson type VII) with
// nu = 6 / (kurtosis - 3) + 4 degrees of freedom.
class PearsonSampler {
public:
    explicit PearsonSampler(double kurtosis);
    double operator()(Rng& rng);
    double dof() const noexcept { return nu_; }

private:
    double nu_ = 0.0;  // 0 means normal
    double scale_ = 1.0;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> t_{1.0};
};

VectorXd pearson_symmetric(double kurtosis, int n, Rng& rng);

LatentDraws gen_latent(const CompositeDgpConfig& cfg, std::uint64_t rep, int n);

// Assembles observables from the first n rows of the latent draws at noise k.
CompositeDraw compose(const CompositeDgpConfig& cfg, const LatentDraws& latent, int n, double k);

CompositeDraw gen_composite(const CompositeDgpConfig& cfg, std::uint64_t rep);

// Just-identified IV slope on demeaned data: (z'y) / (z'x).
double iv_2sls(const VectorXd& y, const VectorXd& x, const VectorXd& z);

// sqrt(0.3) s2 + sqrt(0.7) z
VectorXd diluted_instrument(const VectorXd& s2, const VectorXd& z);

}  // namespace cumident
