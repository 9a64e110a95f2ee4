#include "cumident/cumulant.hpp"

#include <cmath>
#include <string>

#include "cumident/error.hpp"

namespace cumident {

namespace {

void require_finite(const Eigen::Ref<const MatrixXd>& x)
{
    if (!x.allFinite())
        throw InputError("observation matrix contains non-finite values");
}

MatrixXd center(const Eigen::Ref<const MatrixXd>& x)
{
    return x.rowwise() - x.colwise().mean();
}

}  // namespace

Sample::Sample(MatrixXd data) : data_(std::move(data))
{
    if (data_.cols() < 2)
        throw InputError("sample needs d >= 2 columns, got " + std::to_string(data_.cols()));
    if (data_.rows() < data_.cols() + 1)
        throw InputError("sample needs n >= d + 1 rows, got n = " + std::to_string(data_.rows()) +
                         ", d = " + std::to_string(data_.cols()));
    require_finite(data_);
}

MatrixXd Sample::centered() const { return center(data_); }

VectorXd Sample::mean() const { return data_.colwise().mean().transpose(); }

MatrixXd Sample::covariance() const
{
    MatrixXd xc = centered();
    return (xc.transpose() * xc) / static_cast<double>(n());
}

// ---------------------------------------------------------------------------

int MonomialIndex::count(int d)
{
    // binom(d + 3, 3) - 1
    return (d + 3) * (d + 2) * (d + 1) / 6 - 1;
}

MonomialIndex::MonomialIndex(int d) : d_(d)
{
    if (d < 1)
        throw InputError("monomial index needs d >= 1");
    exponents_.reserve(count(d));
    second_.assign(static_cast<std::size_t>(d) * d, -1);
    third_.assign(static_cast<std::size_t>(d) * d * d, -1);
    for (int i = 0; i < d; ++i)
        exponents_.push_back({i, -1, -1});
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            second_[i * d + j] = static_cast<int>(exponents_.size());
            exponents_.push_back({i, j, -1});
        }
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            for (int k = j; k < d; ++k) {
                third_[(i * d + j) * d + k] = static_cast<int>(exponents_.size());
                exponents_.push_back({i, j, k});
            }
}

int MonomialIndex::first(int i) const { return i; }

int MonomialIndex::second(int i, int j) const
{
    if (i > j)
        std::swap(i, j);
    return second_[i * d_ + j];
}

int MonomialIndex::third(int i, int j, int k) const
{
    if (i > j)
        std::swap(i, j);
    if (j > k)
        std::swap(j, k);
    if (i > j)
        std::swap(i, j);
    return third_[(i * d_ + j) * d_ + k];
}

int MonomialIndex::degree(int pos) const
{
    const auto& f = exponents_[pos];
    return f[2] >= 0 ? 3 : (f[1] >= 0 ? 2 : 1);
}

void MonomialIndex::evaluate(const double* x, double* out) const
{
    for (std::size_t p = 0; p < exponents_.size(); ++p) {
        const auto& f = exponents_[p];
        double v = x[f[0]];
        if (f[1] >= 0)
            v *= x[f[1]];
        if (f[2] >= 0)
            v *= x[f[2]];
        out[p] = v;
    }
}

// ---------------------------------------------------------------------------

MatrixXd CumulantTensor3::contract(const VectorXd& w) const
{
    if (w.size() != d_)
        throw InputError("contraction vector has length " + std::to_string(w.size()) + ", expected " +
                         std::to_string(d_));
    MatrixXd out = MatrixXd::Zero(d_, d_);
    for (int r = 0; r < d_; ++r)
        for (int j = 0; j < d_; ++j)
            for (int k = 0; k < d_; ++k)
                out(j, k) += w(r) * (*this)(r, j, k);
    return out;
}

RawMomentVector raw_moments(const Eigen::Ref<const MatrixXd>& x)
{
    if (x.cols() < 1)
        throw InputError("raw moments need d >= 1");
    if (x.rows() < 1)
        throw InputError("raw moments need at least one observation");
    require_finite(x);
    const int d = static_cast<int>(x.cols());
    MonomialIndex idx(d);
    RawMomentVector m{VectorXd::Zero(idx.size()), d};
    std::vector<double> row(d), vals(idx.size());
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        for (int i = 0; i < d; ++i)
            row[i] = x(t, i);
        idx.evaluate(row.data(), vals.data());
        for (int p = 0; p < idx.size(); ++p)
            m.values(p) += vals[p];
    }
    m.values /= static_cast<double>(x.rows());
    return m;
}

MatrixXd monomial_rows(const Eigen::Ref<const MatrixXd>& x)
{
    require_finite(x);
    const int d = static_cast<int>(x.cols());
    MonomialIndex idx(d);
    MatrixXd out(x.rows(), idx.size());
    std::vector<double> row(d), vals(idx.size());
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        for (int i = 0; i < d; ++i)
            row[i] = x(t, i);
        idx.evaluate(row.data(), vals.data());
        for (int p = 0; p < idx.size(); ++p)
            out(t, p) = vals[p];
    }
    return out;
}

CumulantTensor3 third_cumulants(const Eigen::Ref<const MatrixXd>& x)
{
    if (x.rows() < 2)
        throw InputError("third cumulants need n >= 2");
    if (x.cols() < 1)
        throw InputError("third cumulants need d >= 1");
    require_finite(x);
    const int d = static_cast<int>(x.cols());
    const MatrixXd xc = center(x);
    const double n = static_cast<double>(x.rows());
    CumulantTensor3 c(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            const Eigen::ArrayXd ij = xc.col(i).array() * xc.col(j).array();
            for (int k = j; k < d; ++k) {
                const double v = (ij * xc.col(k).array()).sum() / n;
                c(i, j, k) = c(i, k, j) = c(j, i, k) = c(j, k, i) = c(k, i, j) = c(k, j, i) = v;
            }
        }
    return c;
}

CumulantTensor3 cumulant_map(const RawMomentVector& m)
{
    if (m.d < 1)
        throw InputError("raw moment vector has no dimension");
    MonomialIndex idx(m.d);
    if (m.values.size() != idx.size())
        throw InputError("raw moment vector has length " + std::to_string(m.values.size()) + ", expected " +
                         std::to_string(idx.size()) + " for d = " + std::to_string(m.d));
    const int d = m.d;
    const auto& v = m.values;
    CumulantTensor3 c(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            for (int k = j; k < d; ++k) {
                const double mi = v(idx.first(i)), mj = v(idx.first(j)), mk = v(idx.first(k));
                const double val = v(idx.third(i, j, k)) - mi * v(idx.second(j, k)) - mj * v(idx.second(i, k)) -
                                   mk * v(idx.second(i, j)) + 2.0 * mi * mj * mk;
                c(i, j, k) = c(i, k, j) = c(j, i, k) = c(j, k, i) = c(k, i, j) = c(k, j, i) = val;
            }
    return c;
}

MatrixXd covariance_map(const RawMomentVector& m)
{
    MonomialIndex idx(m.d);
    if (m.values.size() != idx.size())
        throw InputError("raw moment vector has wrong length for d = " + std::to_string(m.d));
    MatrixXd s(m.d, m.d);
    for (int i = 0; i < m.d; ++i)
        for (int j = i; j < m.d; ++j)
            s(i, j) = s(j, i) = m.values(idx.second(i, j)) - m.values(idx.first(i)) * m.values(idx.first(j));
    return s;
}

ContractionMatrix contract_hessian(const Eigen::Ref<const MatrixXd>& x, const VectorXd& w, int order)
{
    if (order != 3 && order != 4)
        throw ConfigError("cumulant order must be 3 or 4, got " + std::to_string(order));
    if (w.size() != x.cols())
        throw InputError("contraction vector has length " + std::to_string(w.size()) + ", expected " +
                         std::to_string(x.cols()));
    if (!w.allFinite())
        throw InputError("contraction vector is not finite");
    if (x.rows() < 2)
        throw InputError("contraction needs n >= 2");
    require_finite(x);

    const MatrixXd xc = center(x);
    const double n = static_cast<double>(x.rows());
    const VectorXd y = xc * w;
    MatrixXd g;
    if (order == 3) {
        const MatrixXd weighted = xc.array().colwise() * y.array();
        g = 6.0 * (weighted.transpose() * xc) / n;
    } else {
        const MatrixXd weighted = xc.array().colwise() * y.array().square();
        const MatrixXd s = (xc.transpose() * xc) / n;
        const VectorXd sw = s * w;
        g = 12.0 * (weighted.transpose() * xc) / n - 12.0 * w.dot(sw) * s - 24.0 * sw * sw.transpose();
    }
    g = 0.5 * (g + g.transpose()).eval();
    return {std::move(g), w, order};
}

ContractionMatrix contract_hessian(const CumulantTensor3& c3, const VectorXd& w)
{
    MatrixXd g = 6.0 * c3.contract(w);
    g = 0.5 * (g + g.transpose()).eval();
    return {std::move(g), w, 3};
}

double fourth_cumulant(const Eigen::Ref<const MatrixXd>& x, const VectorXd& w)
{
    const MatrixXd xc = center(x);
    const Eigen::ArrayXd y = (xc * w).array();
    const double m2 = y.square().mean();
    return y.square().square().mean() - 3.0 * m2 * m2;
}

}  // namespace cumident
