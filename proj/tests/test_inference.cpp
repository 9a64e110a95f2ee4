#include "doctest.h"

#include <cmath>
#include <numeric>

#include "cumident/dgp.hpp"
#include "cumident/error.hpp"
#include "cumident/experiments.hpp"
#include "cumident/inference.hpp"
#include "cumident/parallel.hpp"
#include "support.hpp"

using namespace cumident;

namespace {

Labeler sign_labeler()
{
    return [](const MatrixXd& lt) { return label_by_signs(lt, supply_demand_pattern()); };
}

Sample composite(int n, double k, std::uint64_t seed, std::uint64_t rep = 0)
{
    CompositeDgpConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.seed = seed;
    return Sample(gen_composite(cfg, rep).x);
}

double min_eigen_ratio(const MatrixXd& m)
{
    const Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    return es.eigenvalues().minCoeff() / std::max(m.trace(), 1e-300);
}

}  // namespace

TEST_CASE("jacobian of a coordinate projection")
{
    RawMomentVector m{VectorXd::LinSpaced(9, 0.5, 4.5), 2};
    const MatrixXd j = numerical_jacobian([](const RawMomentVector& v) { return VectorXd::Constant(1, v.values(4)); }, m);
    MatrixXd expect = MatrixXd::Zero(1, 9);
    expect(0, 4) = 1.0;
    CHECK((j - expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("jacobian of a product")
{
    RawMomentVector m{VectorXd::Zero(9), 2};
    m.values(0) = 2.0;
    m.values(1) = 3.0;
    const MatrixXd j = numerical_jacobian(
        [](const RawMomentVector& v) { return VectorXd::Constant(1, v.values(0) * v.values(1)); }, m);
    CHECK(j(0, 0) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(j(0, 1) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(j.rightCols(7).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("eigenvector jacobian is stable under halving the step")
{
    const Sample s = composite(2000, 0.3, 5);
    const ProbeVectors p = ProbeVectors::draw(2, 3);
    const DemixingPipeline pipe(p, {}, sign_labeler());
    const RawMomentVector m = raw_moments(s.centered());
    const std::vector<int> perm = pipe.run(m).labels;
    const MomentStatistic stat = [&](const RawMomentVector& v) { return pipe.labeled_with(v, perm); };
    const MatrixXd full = numerical_jacobian(stat, m, 1.0);
    const MatrixXd half = numerical_jacobian(stat, m, 0.5);
    CHECK((full - half).norm() <= 1e-4 * full.norm());
}

TEST_CASE("jacobian failures name the coordinate")
{
    RawMomentVector m{VectorXd::Ones(9), 2};
    const MomentStatistic bad = [](const RawMomentVector& v) -> VectorXd {
        if (v.values(3) != 1.0)
            throw NumericError("boom");
        return VectorXd::Zero(1);
    };
    try {
        numerical_jacobian(bad, m);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("coordinate 3") != std::string::npos);
    }
}

TEST_CASE("delta-method intervals shrink like 1/sqrt(n)")
{
    const int reps = 100;
    std::vector<double> ratio(reps);
    const DemixingPipeline pipe(ProbeVectors::draw(2, 7), {}, sign_labeler());
    CompositeDgpConfig cfg;
    cfg.k = 0.5;
    cfg.seed = 31;
    parallel_for(reps, [&](std::size_t rep) {
        const LatentDraws latent = gen_latent(cfg, rep, 4000);
        const double v1 = delta_variance(Sample(compose(cfg, latent, 2000, 0.5).x), pipe).sigma_u(1, 1);
        const double v2 = delta_variance(Sample(compose(cfg, latent, 4000, 0.5).x), pipe).sigma_u(1, 1);
        ratio[rep] = std::sqrt(v2 / 4000.0) / std::sqrt(v1 / 2000.0);
    });
    const double mean = std::accumulate(ratio.begin(), ratio.end(), 0.0) / reps;
    CHECK(mean >= 0.6);
    CHECK(mean <= 0.8);
}

TEST_CASE("constant column fails in the delta method")
{
    MatrixXd x = testing::exponential_matrix(500, 2, 3);
    x.col(0).setConstant(2.0);
    CHECK_THROWS_AS(delta_variance(Sample(x), ProbeVectors::draw(2, 1)), NumericError);
}

TEST_CASE("delta method is restricted to order three")
{
    IdentifyOptions opts;
    opts.order = 4;
    CHECK_THROWS_AS(delta_variance(composite(500, 0, 1), ProbeVectors::draw(2, 1), std::nullopt, opts), ConfigError);
}

TEST_CASE("jackknife of a sample mean equals s^2/n")
{
    const MatrixXd x = testing::exponential_matrix(200, 2, 17);
    const JackknifeResult row = jackknife_variance(x, [](const MatrixXd& m) {
        StatOutput o;
        o.value = m.col(0).colwise().mean();
        return o;
    });
    const JackknifeResult mom = jackknife_moments(
        x,
        [](const RawMomentVector& m) {
            StatOutput o;
            o.value = VectorXd::Constant(1, m.values(0));
            return o;
        },
        false);
    const VectorXd c = x.col(0).array() - x.col(0).mean();
    const double s2 = c.squaredNorm() / (x.rows() - 1.0);
    const double n = static_cast<double>(x.rows());
    CHECK(std::abs(row.variance(0, 0) / n - s2 / n) < 1e-10);
    CHECK(std::abs(mom.variance(0, 0) / n - s2 / n) < 1e-10);
}

TEST_CASE("moment downdating matches explicit row deletion")
{
    const Sample s = composite(120, 0.3, 44);
    const DemixingPipeline pipe(ProbeVectors::draw(2, 2), {}, sign_labeler());
    const JackknifeResult fast = jackknife_variance(s, pipe);
    const JackknifeResult slow =
        jackknife_variance(s.data(), [&](const MatrixXd& m) { return pipe.run(raw_moments(m)); });
    CHECK((fast.estimates - slow.estimates).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((fast.variance - slow.variance).cwiseAbs().maxCoeff() < 1e-7 * slow.variance.norm());
    CHECK(fast.label_flips == slow.label_flips);
}

TEST_CASE("jackknife needs at least 30 observations")
{
    CHECK_THROWS_AS(jackknife_variance(MatrixXd::Ones(10, 2), [](const MatrixXd&) { return StatOutput{}; }),
                    InputError);
}

TEST_CASE("confidence interval arithmetic")
{
    const Interval zero = confidence_interval(1.25, 0.0, 50, 0.95);
    CHECK(zero.lo == 1.25);
    CHECK(zero.hi == 1.25);

    const Interval ci = confidence_interval(0.0, 1.0, 100, 0.95);
    CHECK((ci.hi - ci.lo) / 2 == doctest::Approx(0.196).epsilon(0.001));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS_AS(confidence_interval(0, 1, 10, 1.0), ConfigError);
    CHECK_THROWS_AS(confidence_interval(0, -1, 10, 0.9), InputError);
}

TEST_CASE("interval for a simulated mean matches the textbook z-interval")
{
    const MatrixXd x = testing::normal_matrix(400, 1, 9).array() * 2.0 + 3.0;
    const double mean = x.mean();
    const double var = (x.array() - mean).square().mean();
    const Interval ci = confidence_interval(mean, var, 400, 0.9);
    const double half = 1.6448536269514722 * std::sqrt(var) / 20.0;
    CHECK(ci.lo == doctest::Approx(mean - half).epsilon(1e-12));
    CHECK(ci.hi == doctest::Approx(mean + half).epsilon(1e-12));
}

TEST_CASE("property: covariance outputs are symmetric PSD")
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Sample s = composite(1500, 0.5, seed);
        const DemixingPipeline pipe(ProbeVectors::draw(2, seed), {}, sign_labeler());
        const DeltaVarianceResult dv = delta_variance(s, pipe);
        const JackknifeResult jk = jackknife_variance(s, pipe);
        for (const MatrixXd* m : {&dv.sigma_u, &dv.sigma_m, &jk.variance}) {
            CHECK((*m - m->transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(min_eigen_ratio(*m) >= -1e-10);
        }
    }
}

TEST_CASE("property: monomial reordering leaves the delta variance unchanged")
{
    const Sample s = composite(1000, 0.2, 12);
    const DeltaVarianceResult dv = delta_variance(s, ProbeVectors::draw(2, 4));
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(9);
    perm.indices() << 8, 3, 5, 0, 7, 1, 6, 2, 4;
    const MatrixXd j = dv.jacobian * perm.transpose();
    const MatrixXd sm = perm * dv.sigma_m * perm.transpose();
    CHECK((j * sm * j.transpose() - dv.sigma_u).cwiseAbs().maxCoeff() < 1e-10 * dv.sigma_u.norm());
}

TEST_CASE("property: jackknife and delta standard errors agree at n = 5000")
{
    const Sample s = composite(5000, 0.5, 77);
    const DemixingPipeline pipe(ProbeVectors::draw(2, 5), {}, sign_labeler());
    const double dse = std::sqrt(delta_variance(s, pipe).sigma_u(1, 1));
    const double jse = std::sqrt(jackknife_variance(s, pipe).variance(1, 1));
    CHECK(std::abs(dse - jse) / jse < 0.25);
}

TEST_CASE("well-separated rows never flip labels across resamples")
{
    const Sample s = composite(5000, 0.0, 3);
    const DemixingPipeline pipe(ProbeVectors::draw(2, 3), {}, sign_labeler());
    const JackknifeResult jk = jackknife_variance(s, pipe);
    CHECK(jk.label_flips == 0);
    CHECK(jk.near_degenerate == 0);
    CHECK(jk.estimates.rows() == 5000);
}
