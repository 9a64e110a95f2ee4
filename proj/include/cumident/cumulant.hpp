#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cumident {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Observation matrix with rows = observations. Construction enforces the
// invariants the identification pipeline relies on: d >= 2, n >= d + 1 and
// finite entries. Low-level moment routines accept any matrix.
class Sample {
public:
    explicit Sample(MatrixXd data);

    const MatrixXd& data() const noexcept { return data_; }
    Eigen::Index n() const noexcept { return data_.rows(); }
    Eigen::Index d() const noexcept { return data_.cols(); }

    MatrixXd centered() const;
    VectorXd mean() const;
    // Covariance with the 1/n divisor.
    MatrixXd covariance() const;

private:
    MatrixXd data_;
};

// Graded-lexicographic ordering of the raw monomials of total degree 1..3
// in d variables. Degree-1 block: X_i. Degree-2 block: X_i X_j with i <= j.
// Degree-3 block: X_i X_j X_k with i <= j <= k. Within a block, index tuples
// are ordered lexicographically. For d = 2:
//   X1, X2, X1^2, X1X2, X2^2, X1^3, X1^2X2, X1X2^2, X2^3.
// Every module that indexes raw moments goes through this class.
class MonomialIndex {
public:
    explicit MonomialIndex(int d);

    int dim() const noexcept { return d_; }
    // binom(d + 3, 3) - 1
    int size() const noexcept { return static_cast<int>(exponents_.size()); }

    int first(int i) const;
    int second(int i, int j) const;
    int third(int i, int j, int k) const;

    // Variable indices of monomial `pos`, sorted ascending; -1 pads.
    const std::array<int, 3>& factors(int pos) const { return exponents_[pos]; }
    int degree(int pos) const;

    // Evaluates every monomial at one observation.
    void evaluate(const double* x, double* out) const;

    static int count(int d);

private:
    int d_;
    std::vector<std::array<int, 3>> exponents_;
    std::vector<int> second_;
    std::vector<int> third_;
};

struct RawMomentVector {
    VectorXd values;
    int d = 0;
};

// Dense symmetric d x d x d array.
class CumulantTensor3 {
public:
    CumulantTensor3() = default;
    explicit CumulantTensor3(int d) : d_(d), v_(static_cast<std::size_t>(d) * d * d, 0.0) {}

    int dim() const noexcept { return d_; }
    double& operator()(int i, int j, int k) { return v_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }
    double operator()(int i, int j, int k) const { return v_[(static_cast<std::size_t>(i) * d_ + j) * d_ + k]; }

    // Mode-1 contraction: sum_r w_r C[r, :, :].
    MatrixXd contract(const VectorXd& w) const;

private:
    int d_ = 0;
    std::vector<double> v_;
};

struct ContractionMatrix {
    MatrixXd matrix;
    VectorXd w;
    int order = 3;
};

// Sample means of all monomials of degree 1..3, in MonomialIndex order.
RawMomentVector raw_moments(const Eigen::Ref<const MatrixXd>& x);

// n x D matrix whose row i is M(X_i).
MatrixXd monomial_rows(const Eigen::Ref<const MatrixXd>& x);

// Sample-centred third moments.
CumulantTensor3 third_cumulants(const Eigen::Ref<const MatrixXd>& x);

// Moment-to-cumulant polynomial map applied to raw moments:
//   k_ijk = m_ijk - mu_i m_jk - mu_j m_ik - mu_k m_ij + 2 mu_i mu_j mu_k
CumulantTensor3 cumulant_map(const RawMomentVector& m);

// Covariance rebuilt from the degree-1 and degree-2 raw moments.
MatrixXd covariance_map(const RawMomentVector& m);

// Hessian of the sample cumulant of order h of w'X, h in {3, 4}.
//   h = 3: 6/n sum_i (w'x_i) x_i x_i'
//   h = 4: 12 mean[(w'x)^2 x x'] - 12 (w'Sw) S - 24 S w w' S
// with x_i centred by the sample mean and S the 1/n covariance.
ContractionMatrix contract_hessian(const Eigen::Ref<const MatrixXd>& x, const VectorXd& w, int order);

// Third-order Hessian from a tensor: 6 C[w, ., .].
ContractionMatrix contract_hessian(const CumulantTensor3& c3, const VectorXd& w);

// Sample fourth cumulant of w'X (used to validate the h = 4 Hessian).
double fourth_cumulant(const Eigen::Ref<const MatrixXd>& x, const VectorXd& w);

}  // namespace cumident
