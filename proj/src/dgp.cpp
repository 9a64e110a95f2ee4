#include "cumident/dgp.hpp"

#include <cmath>
#include <string>

#include "cumident/error.hpp"

namespace cumident {

namespace {
constexpr std::uint64_t kLatentStream = 0x4c4154454e54ULL;
}

void CompositeDgpConfig::validate() const
{
    if (n < 3)
        throw ConfigError("sample size must be at least 3");
    if (!(k >= 0.0))
        throw ConfigError("noise scale k must be non-negative");
    for (double kurt : kurtoses)
        if (!(kurt >= 3.0))
            throw ConfigError("kurtosis values must be >= 3 (symmetric Pearson type VII or normal)");
    if (std::abs(lambda_true.determinant()) < 1e-12)
        throw ConfigError("structural matrix is singular");
    Eigen::LLT<Eigen::Matrix2d> llt(meas_cov);
    if (llt.info() != Eigen::Success)
        throw ConfigError("measurement-error covariance is not positive definite");
}

PearsonSampler::PearsonSampler(double kurtosis)
{
    if (!(kurtosis >= 3.0))
        throw ConfigError("Pearson sampler needs kurtosis >= 3, got " + std::to_string(kurtosis));
    if (kurtosis > 3.0) {
        nu_ = 6.0 / (kurtosis - 3.0) + 4.0;
        scale_ = std::sqrt((nu_ - 2.0) / nu_);
        t_ = std::student_t_distribution<double>(nu_);
    }
}

double PearsonSampler::operator()(Rng& rng)
{
    if (nu_ == 0.0)
        return normal_(rng);
    return scale_ * t_(rng);
}

VectorXd pearson_symmetric(double kurtosis, int n, Rng& rng)
{
    PearsonSampler sampler(kurtosis);
    VectorXd out(n);
    for (int i = 0; i < n; ++i)
        out(i) = sampler(rng);
    return out;
}

LatentDraws gen_latent(const CompositeDgpConfig& cfg, std::uint64_t rep, int n)
{
    cfg.validate();
    Rng rng(substream_seed(cfg.seed, kLatentStream, rep));
    std::exponential_distribution<double> gamma11(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    PearsonSampler e1(cfg.kurtoses[0]), e2(cfg.kurtoses[1]), e3(cfg.kurtoses[2]);

    Eigen::Matrix2d chol = cfg.meas_cov.llt().matrixL();
    LatentDraws out;
    out.values.resize(n, LatentDraws::Count);
    for (int t = 0; t < n; ++t) {
        auto row = out.values.row(t);
        row(LatentDraws::S1) = gamma11(rng);
        row(LatentDraws::S2) = gamma11(rng);
        row(LatentDraws::E1) = e1(rng);
        row(LatentDraws::E2) = e2(rng);
        row(LatentDraws::E3) = e3(rng);
        const double u1 = normal(rng);
        const double u2 = normal(rng);
        row(LatentDraws::Eps1) = chol(0, 0) * u1;
        row(LatentDraws::Eps2) = chol(1, 0) * u1 + chol(1, 1) * u2;
        row(LatentDraws::Z) = normal(rng);
    }
    return out;
}

CompositeDraw compose(const CompositeDgpConfig& cfg, const LatentDraws& latent, int n, double k)
{
    if (n > latent.values.rows())
        throw ConfigError("requested n exceeds the generated latent draws");
    if (!(k >= 0.0))
        throw ConfigError("noise scale k must be non-negative");
    const auto v = latent.values.topRows(n);
    const Eigen::Matrix2d mixing = cfg.lambda_true.inverse();

    MatrixXd shocks(n, 2);
    shocks.col(0) = v.col(LatentDraws::S1);
    shocks.col(1) = v.col(LatentDraws::S2);
    shocks += std::sqrt(k / 3.0) * v.middleCols(LatentDraws::E1, 3) * cfg.gamma_loadings.transpose();

    CompositeDraw out;
    out.x = shocks * mixing.transpose() + std::sqrt(k) * v.middleCols(LatentDraws::Eps1, 2);
    out.s2 = v.col(LatentDraws::S2);
    out.z = v.col(LatentDraws::Z);
    return out;
}

CompositeDraw gen_composite(const CompositeDgpConfig& cfg, std::uint64_t rep)
{
    return compose(cfg, gen_latent(cfg, rep, cfg.n), cfg.n, cfg.k);
}

double iv_2sls(const VectorXd& y, const VectorXd& x, const VectorXd& z)
{
    if (y.size() != x.size() || z.size() != x.size())
        throw InputError("IV inputs must have equal length");
    if (x.size() < 2)
        throw InputError("IV needs at least two observations");
    const VectorXd yc = y.array() - y.mean();
    const VectorXd xc = x.array() - x.mean();
    const VectorXd zc = z.array() - z.mean();
    const double zx = zc.dot(xc);
    if (std::abs(zx) <= 1e-12 * zc.norm() * xc.norm() || zx == 0.0)
        throw NumericError("weak instrument: z'x is numerically zero");
    return zc.dot(yc) / zx;
}

VectorXd diluted_instrument(const VectorXd& s2, const VectorXd& z)
{
    return std::sqrt(0.3) * s2 + std::sqrt(0.7) * z;
}

}  // namespace cumident
