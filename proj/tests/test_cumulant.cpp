#include "doctest.h"

#include <cmath>

#include "cumident/cumulant.hpp"
#include "cumident/error.hpp"
#include "support.hpp"

using namespace cumident;
using testing::exponential_matrix;
using testing::naive_third;

TEST_CASE("monomial ordering for two variables")
{
    MonomialIndex idx(2);
    CHECK(idx.size() == 9);
    CHECK(MonomialIndex::count(3) == 19);
    CHECK(MonomialIndex::count(5) == 55);
    CHECK(idx.first(1) == 1);
    CHECK(idx.second(0, 0) == 2);
    CHECK(idx.second(1, 0) == 3);
    CHECK(idx.second(1, 1) == 4);
    CHECK(idx.third(0, 0, 0) == 5);
    CHECK(idx.third(1, 0, 0) == 6);
    CHECK(idx.third(1, 0, 1) == 7);
    CHECK(idx.third(1, 1, 1) == 8);
    for (int p = 0; p < idx.size(); ++p)
        CHECK(idx.degree(p) == (p < 2 ? 1 : p < 5 ? 2 : 3));
}

TEST_CASE("raw moments of a single observation")
{
    MatrixXd x(1, 2);
    x << 1, 2;
    VectorXd expect(9);
    expect << 1, 2, 1, 2, 4, 1, 2, 4, 8;
    const RawMomentVector m = raw_moments(x);
    CHECK(m.d == 2);
    CHECK((m.values - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("raw moments of zeros and of {0,0,3}")
{
    CHECK(raw_moments(MatrixXd::Zero(5, 3)).values.isZero(0.0));

    MatrixXd x(3, 1);
    x << 0, 0, 3;
    const VectorXd m = raw_moments(x).values;
    REQUIRE(m.size() == 3);
    CHECK(m(0) == doctest::Approx(1.0));
    CHECK(m(1) == doctest::Approx(3.0));
    CHECK(m(2) == doctest::Approx(9.0));
}

TEST_CASE("raw moments reject non-finite input")
{
    MatrixXd x = MatrixXd::Ones(4, 2);
    x(2, 1) = std::nan("");
    CHECK_THROWS_AS(raw_moments(x), InputError);
}

TEST_CASE("third cumulant of {0,0,3}")
{
    MatrixXd x(3, 1);
    x << 0, 0, 3;
    CHECK(third_cumulants(x)(0, 0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(cumulant_map(raw_moments(x))(0, 0, 0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("symmetric sample has zero third cumulant")
{
    MatrixXd x(4, 2);
    x << -1.5, 2, 1.5, -2, -0.25, 7, 0.25, -7;
    const CumulantTensor3 c = third_cumulants(x);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(c(i, j, k) == 0.0);
}

TEST_CASE("exponential draws have third cumulant near 2")
{
    // sd of the estimate is about 16/sqrt(n) = 0.016
    const MatrixXd x = exponential_matrix(1'000'000, 1, 11);
    CHECK(std::abs(third_cumulants(x)(0, 0, 0) - 2.0) < 0.08);
}

TEST_CASE("cumulant map on centred and degenerate moments")
{
    MatrixXd x = exponential_matrix(50, 3, 4);
    x.rowwise() -= x.colwise().mean();
    const RawMomentVector m = raw_moments(x);
    const CumulantTensor3 c = cumulant_map(m);
    MonomialIndex idx(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                CHECK(c(i, j, k) == doctest::Approx(m.values(idx.third(i, j, k))).epsilon(1e-10));

    const MatrixXd point = MatrixXd::Constant(10, 2, 1.7);
    const CumulantTensor3 z = cumulant_map(raw_moments(point));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                CHECK(std::abs(z(i, j, k)) < 1e-12);
}

TEST_CASE("third cumulants match a direct triple loop")
{
    const MatrixXd x = exponential_matrix(37, 3, 8) * MatrixXd::Random(3, 3);
    const CumulantTensor3 c = third_cumulants(x);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                CHECK(c(i, j, k) == doctest::Approx(naive_third(x, i, j, k)).epsilon(1e-12));
}

TEST_CASE("property: tensor symmetry is exact")
{
    for (int d = 2; d <= 5; ++d) {
        const MatrixXd x = exponential_matrix(60, d, 100 + d) * MatrixXd::Random(d, d);
        for (const CumulantTensor3& c : {third_cumulants(x), cumulant_map(raw_moments(x))})
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        const double v = c(i, j, k);
                        CHECK(c(i, k, j) == v);
                        CHECK(c(j, i, k) == v);
                        CHECK(c(j, k, i) == v);
                        CHECK(c(k, i, j) == v);
                        CHECK(c(k, j, i) == v);
                    }
    }
}

TEST_CASE("property: translation invariance")
{
    Rng rng(77);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + trial % 4;
        const MatrixXd x = exponential_matrix(150, d, 500 + trial);
        VectorXd shift(d);
        for (int j = 0; j < d; ++j)
            shift(j) = u(rng);
        const MatrixXd y = x.rowwise() + shift.transpose();
        const CumulantTensor3 a = third_cumulants(x), b = third_cumulants(y);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    CHECK(std::abs(a(i, j, k) - b(i, j, k)) < 1e-12 * (1.0 + shift.squaredNorm()));
    }
}

TEST_CASE("property: moment map equals direct cumulants")
{
    Rng rng(9);
    std::uniform_int_distribution<int> nd(2, 200), dd(1, 5);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = std::max(2, nd(rng));
        const int d = dd(rng);
        const MatrixXd x = exponential_matrix(n, d, 900 + trial) * MatrixXd::Random(d, d) +
                           MatrixXd::Constant(n, d, 0.5 * (trial % 3));
        const CumulantTensor3 direct = third_cumulants(x);
        const CumulantTensor3 mapped = cumulant_map(raw_moments(x));
        double scale = 0.0, diff = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    scale = std::max(scale, std::abs(direct(i, j, k)));
                    diff = std::max(diff, std::abs(direct(i, j, k) - mapped(i, j, k)));
                }
        CHECK(diff <= 1e-10 * std::max(scale, 1.0));
    }
}

TEST_CASE("covariance map matches the sample covariance")
{
    const MatrixXd x = exponential_matrix(80, 3, 21) * MatrixXd::Random(3, 3);
    const Sample s(x);
    CHECK((covariance_map(raw_moments(x)) - s.covariance()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("contraction of order three")
{
    const MatrixXd x = exponential_matrix(40, 3, 5);
    CHECK(contract_hessian(x, VectorXd::Zero(3), 3).matrix.isZero(0.0));

    MatrixXd one(3, 1);
    one << 0, 0, 3;
    CHECK(contract_hessian(one, VectorXd::Ones(1), 3).matrix(0, 0) == doctest::Approx(12.0));

    const VectorXd w = VectorXd::LinSpaced(3, 0.2, 0.9);
    const MatrixXd from_data = contract_hessian(x, w, 3).matrix;
    const MatrixXd from_tensor = contract_hessian(third_cumulants(x), w).matrix;
    CHECK((from_data - from_tensor).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("population contraction follows the congruence formula")
{
    // C3(AS)_ijk = sum_r A_ir A_jr A_kr kappa_r, assembled directly.
    Rng rng(3);
    for (int d = 2; d <= 5; ++d) {
        const MatrixXd a = testing::random_mixing(d, rng);
        const VectorXd kappa = VectorXd::LinSpaced(d, 0.5, 3.0);
        CumulantTensor3 c(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int r = 0; r < d; ++r)
                        c(i, j, k) += a(i, r) * a(j, r) * a(k, r) * kappa(r);
        const VectorXd w = VectorXd::LinSpaced(d, -0.3, 0.8);
        const VectorXd atw = a.transpose() * w;
        const MatrixXd expect = a * (6.0 * kappa.cwiseProduct(atw)).asDiagonal() * a.transpose();
        CHECK((contract_hessian(c, w).matrix - expect).cwiseAbs().maxCoeff() < 1e-12 * expect.norm());
    }
}

TEST_CASE("property: contraction is linear in w")
{
    Rng rng(31);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 2 + trial % 4;
        const MatrixXd x = exponential_matrix(120, d, 40 + trial);
        VectorXd w1(d), w2(d);
        for (int j = 0; j < d; ++j) {
            w1(j) = z(rng);
            w2(j) = z(rng);
        }
        const double alpha = z(rng), beta = z(rng);
        const MatrixXd lhs = contract_hessian(x, alpha * w1 + beta * w2, 3).matrix;
        const MatrixXd rhs =
            alpha * contract_hessian(x, w1, 3).matrix + beta * contract_hessian(x, w2, 3).matrix;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + rhs.norm()));
    }
}

TEST_CASE("property: sample contraction approaches the population congruence")
{
    MatrixXd a(3, 3);
    a << 1.0, 0.4, -0.3, -0.2, 1.0, 0.5, 0.6, 0.1, 1.0;
    const MatrixXd s = exponential_matrix(100'000, 3, 2024);
    const MatrixXd x = s * a.transpose();
    const VectorXd w = (VectorXd(3) << 0.3, 0.7, 0.5).finished();
    const VectorXd atw = a.transpose() * w;
    const MatrixXd expect = a * (6.0 * 2.0 * atw).asDiagonal() * a.transpose();
    const MatrixXd got = contract_hessian(x, w, 3).matrix;
    CHECK((got - expect).norm() / expect.norm() < 0.05);
}

TEST_CASE("order-four Hessian matches finite differences of the fourth cumulant")
{
    const MatrixXd x = exponential_matrix(400, 3, 17) * MatrixXd::Random(3, 3);
    const VectorXd w = (VectorXd(3) << 0.4, -0.2, 0.9).finished();
    const MatrixXd g = contract_hessian(x, w, 4).matrix;

    // Fourth-order accurate central second differences of an independent
    // evaluation of the fourth cumulant.
    const double h = 1e-3;
    auto f = [&](const VectorXd& v) { return testing::naive_fourth(x, v); };
    MatrixXd fd(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            auto mixed = [&](double step) {
                VectorXd pp = w, pm = w, mp = w, mm = w;
                pp(i) += step; pp(j) += step;
                pm(i) += step; pm(j) -= step;
                mp(i) -= step; mp(j) += step;
                mm(i) -= step; mm(j) -= step;
                return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step * step);
            };
            fd(i, j) = (4.0 * mixed(h) - mixed(2.0 * h)) / 3.0;
        }
    CHECK((g - fd).cwiseAbs().maxCoeff() < 1e-6 * g.cwiseAbs().maxCoeff());
    CHECK(fourth_cumulant(x, w) == doctest::Approx(f(w)).epsilon(1e-12));
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sample invariants")
{
    CHECK_THROWS_AS(Sample{MatrixXd::Ones(5, 1)}, InputError);
    CHECK_THROWS_AS(Sample{MatrixXd::Ones(2, 2)}, InputError);
    MatrixXd bad = MatrixXd::Ones(5, 2);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Sample{bad}, InputError);
    CHECK_THROWS_AS(contract_hessian(exponential_matrix(10, 2, 1), VectorXd::Ones(2), 5), ConfigError);
}
