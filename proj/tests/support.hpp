#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cumident/random.hpp"

namespace testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// n x d matrix of independent standard exponentials (skewness 2).
inline MatrixXd exponential_matrix(int n, int d, std::uint64_t seed)
{
    cumident::Rng rng(seed);
    std::exponential_distribution<double> e(1.0);
    MatrixXd m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = e(rng);
    return m;
}

inline MatrixXd normal_matrix(int n, int d, std::uint64_t seed)
{
    cumident::Rng rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    MatrixXd m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            m(i, j) = z(rng);
    return m;
}

// Random well-conditioned matrix: identity plus uniform(-0.5,0.5) noise,
// redrawn until every column sum is away from zero.
inline MatrixXd random_mixing(int d, cumident::Rng& rng)
{
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (;;) {
        MatrixXd a = MatrixXd::Identity(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                a(i, j) += u(rng);
        Eigen::JacobiSVD<MatrixXd> svd(a);
        const double cond = svd.singularValues()(0) / svd.singularValues()(d - 1);
        if (cond < 20.0 && (a.colwise().sum().array().abs() > 0.1).all())
            return a;
    }
}

// Direct triple loop over centred data.
inline double naive_third(const MatrixXd& x, int i, int j, int k)
{
    const VectorXd mu = x.colwise().mean();
    double s = 0.0;
    for (Eigen::Index t = 0; t < x.rows(); ++t)
        s += (x(t, i) - mu(i)) * (x(t, j) - mu(j)) * (x(t, k) - mu(k));
    return s / static_cast<double>(x.rows());
}

// Fourth cumulant of the scalar series x w: mean(u^4) - 3 mean(u^2)^2.
inline double naive_fourth(const MatrixXd& x, const VectorXd& w)
{
    VectorXd u = x * w;
    u.array() -= u.mean();
    const double m2 = u.array().square().mean();
    const double m4 = u.array().pow(4).mean();
    return m4 - 3.0 * m2 * m2;
}

// Sign-insensitive angle between two vectors.
inline double angle(const VectorXd& a, const VectorXd& b)
{
    // chord form keeps precision for nearly parallel vectors
    const VectorXd an = a.normalized(), bn = b.normalized();
    const double chord = std::min((an - bn).norm(), (an + bn).norm());
    return 2.0 * std::asin(std::min(1.0, chord / 2.0));
}

// Best matching of rows of `est` to rows of `truth` up to permutation and
// scale: max over rows of the angle to the assigned true row.
inline double row_match_angle(const MatrixXd& est, const MatrixXd& truth)
{
    const int d = static_cast<int>(truth.rows());
    std::vector<int> perm(d);
    for (int i = 0; i < d; ++i)
        perm[i] = i;
    double best = 1e300;
    do {
        double worst = 0.0;
        for (int i = 0; i < d; ++i)
            worst = std::max(worst, angle(est.row(perm[i]).transpose(), truth.row(i).transpose()));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Whitened copy: centred data with sample covariance exactly I.
inline MatrixXd whiten(const MatrixXd& x)
{
    MatrixXd xc = x.rowwise() - x.colwise().mean();
    const MatrixXd cov = xc.transpose() * xc / static_cast<double>(x.rows());
    const MatrixXd l = cov.llt().matrixL();
    return l.triangularView<Eigen::Lower>().solve(xc.transpose()).transpose();
}

}  // namespace testing
