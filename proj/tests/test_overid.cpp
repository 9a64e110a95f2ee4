#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cumident/dgp.hpp"
#include "cumident/error.hpp"
#include "cumident/overid.hpp"
#include "cumident/parallel.hpp"
#include "support.hpp"

using namespace cumident;

namespace {

Sample composite(int n, double k, std::uint64_t seed, std::uint64_t rep = 0)
{
    CompositeDgpConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.seed = seed;
    return Sample(gen_composite(cfg, rep).x);
}

}  // namespace

TEST_CASE("strict upper triangle extraction")
{
    MatrixXd a(2, 2);
    a << 1, 2, 2, 5;
    CHECK(vech_off(a) == VectorXd::Constant(1, 2.0));

    MatrixXd b(3, 3);
    b << 9, 1.5, -2, 1.5, 8, 4, -2, 4, 7;
    CHECK(vech_off(b) == Eigen::Vector3d(1.5, -2, 4));

    CHECK(vech_off(Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix()).isZero(0.0));

    MatrixXd asym = b;
    asym(0, 1) = 10;
    CHECK_THROWS_AS(vech_off(asym), InputError);
}

TEST_CASE("identity demixing of uncorrelated data has zero restrictions")
{
    const Sample s(testing::whiten(testing::exponential_matrix(400, 3, 2)));
    DemixingEstimate est;
    est.lambda_tilde = MatrixXd::Identity(3, 3);
    CHECK(overid_restrictions(s, est).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("restrictions are small under the null and large under the alternative")
{
    const ProbeVectors p = ProbeVectors::draw(2, 3);
    const TestResult null = wald_test(composite(100'000, 0.0, 8), p);
    const double se0 = std::sqrt(null.omega_hat(0, 0) / 100'000.0);
    CHECK(std::abs(null.r_hat(0)) < 3.0 * se0);

    const TestResult alt = wald_test(composite(100'000, 0.5, 8), p);
    const double se1 = std::sqrt(alt.omega_hat(0, 0) / 100'000.0);
    CHECK(std::abs(alt.r_hat(0)) > 10.0 * se1);
    CHECK(alt.p_value < 1e-6);
}

TEST_CASE("degrees of freedom")
{
    CHECK(wald_test(composite(2000, 0, 1), ProbeVectors::draw(2, 1)).dof == 1);
    MatrixXd a(3, 3);
    a << 1.0, 0.3, -0.2, 0.1, 1.0, 0.4, -0.3, 0.2, 1.0;
    const Sample s(testing::exponential_matrix(5000, 3, 6) * a.transpose());
    const TestResult r = wald_test(s, ProbeVectors::draw(3, 2));
    CHECK(r.dof == 3);
    CHECK(r.r_hat.size() == 3);
    CHECK(r.omega_hat.rows() == 3);
}

TEST_CASE("restriction map agrees with the sample restriction")
{
    const Sample s = composite(3000, 0.3, 4);
    const ProbeVectors p = ProbeVectors::draw(2, 9);
    const VectorXd direct = overid_restrictions(s, estimate_demixing(s, p));
    const VectorXd mapped = restriction_map(raw_moments(s.centered()), p);
    CHECK((direct - mapped).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("chi-square tail")
{
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_sf(7.814727903251178, 3) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_sf(0.0, 2) == 1.0);
}

TEST_CASE("jackknife Omega gives a comparable statistic")
{
    const Sample s = composite(5000, 0.2, 10);
    const ProbeVectors p = ProbeVectors::draw(2, 1);
    WaldOptions jk;
    jk.method = OmegaMethod::Jackknife;
    const TestResult a = wald_test(s, p);
    const TestResult b = wald_test(s, p, jk);
    CHECK(a.r_hat == b.r_hat);
    CHECK(std::abs(a.omega_hat(0, 0) - b.omega_hat(0, 0)) / a.omega_hat(0, 0) < 0.25);
}

TEST_CASE("equal probes are rejected")
{
    ProbeVectors p;
    p.w1 = VectorXd::Ones(2);
    p.w2 = VectorXd::Ones(2);
    CHECK_THROWS_AS(wald_test(composite(2000, 0, 1), p), NumericError);
}

TEST_CASE("constant column is a numeric failure")
{
    MatrixXd x = testing::exponential_matrix(500, 2, 2);
    x.col(1).setConstant(3.0);
    CHECK_THROWS_AS(wald_test(Sample(x), ProbeVectors::draw(2, 1)), NumericError);
}

TEST_CASE("order four is refused by the test")
{
    WaldOptions o;
    o.identify.order = 4;
    CHECK_THROWS_AS(wald_test(composite(500, 0, 1), ProbeVectors::draw(2, 1), o), ConfigError);
}

TEST_CASE("property: row scaling and permutation do not change the restriction's zero set")
{
    MatrixXd theta(3, 3);
    theta << 2, 0, 0, 0, 1, 0, 0, 0, 3;
    MatrixXd theta_alt = theta;
    theta_alt(0, 2) = theta_alt(2, 0) = 0.4;
    Eigen::PermutationMatrix<3> perm;
    perm.indices() << 1, 2, 0;
    const MatrixXd d = Eigen::Vector3d(-2.0, 0.5, 3.0).asDiagonal();
    const MatrixXd t = d * perm.toDenseMatrix().cast<double>();
    CHECK(vech_off(t * theta * t.transpose()).isZero(0.0));
    CHECK_FALSE(vech_off(t * theta_alt * t.transpose()).isZero(1e-12));
}

TEST_CASE("property: statistic is unchanged by the orientation rule")
{
    const Sample s = composite(3000, 0.1, 19);
    const ProbeVectors p = ProbeVectors::draw(2, 4);
    WaldOptions a, b;
    b.identify.rule = Orientation::LargestEntry;
    const TestResult ra = wald_test(s, p, a), rb = wald_test(s, p, b);
    CHECK(ra.statistic == doctest::Approx(rb.statistic).epsilon(1e-8));
    CHECK(ra.p_value == doctest::Approx(rb.p_value).epsilon(1e-8));
}

TEST_CASE("property: null calibration at n = 5000")
{
    const int reps = 1000;
    const ProbeVectors p = ProbeVectors::draw(2, 777);
    CompositeDgpConfig cfg;
    cfg.n = 5000;
    cfg.seed = 555;
    std::vector<double> pv(reps), stat(reps);
    parallel_for(reps, [&](std::size_t rep) {
        const TestResult r = wald_test(Sample(gen_composite(cfg, rep).x), p);
        pv[rep] = r.p_value;
        stat[rep] = r.statistic;
    });
    std::sort(pv.begin(), pv.end());
    double ks = 0.0;
    for (int i = 0; i < reps; ++i)
        ks = std::max({ks, std::abs(pv[i] - (i + 1.0) / reps), std::abs(pv[i] - static_cast<double>(i) / reps)});
    CHECK(ks < 0.08);
    double mean = 0.0;
    for (double t : stat)
        mean += t / reps;
    CHECK(std::abs(mean - 1.0) < 0.15);
}
