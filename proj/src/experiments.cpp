#include "cumident/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "cumident/error.hpp"
#include "cumident/inference.hpp"
#include "cumident/parallel.hpp"

namespace cumident {

namespace {

constexpr std::uint64_t kProbeStream = 0x50524f4245ULL;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Sample to_sample(const CompositeDraw& draw) { return Sample(draw.x); }

ProbeVectors probes_for(std::uint64_t seed, ProbePolicy policy, std::uint64_t rep)
{
    if (policy == ProbePolicy::Fixed)
        return ProbeVectors::draw(2, substream_seed(seed, kProbeStream));
    return ProbeVectors::draw(2, substream_seed(seed, kProbeStream, rep + 1));
}

void validate_common(const std::vector<int>& n, int reps)
{
    if (n.empty())
        throw ConfigError("sample-size list is empty");
    for (int v : n)
        if (v < 30)
            throw ConfigError("sample sizes must be at least 30");
    if (reps < 1)
        throw ConfigError("replication count must be positive");
}

// Aggregates per-replication outcomes (NaN = failed replication) into a cell.
McCell reduce_cell(int n, double k, std::string column, const std::vector<double>& outcomes, bool is_rate,
                   double failure_cap)
{
    McCell cell{n, k, std::move(column), 0.0, 0.0, 0, 0};
    double sum = 0.0, sumsq = 0.0;
    for (double v : outcomes) {
        if (std::isnan(v)) {
            ++cell.failed;
            continue;
        }
        ++cell.used;
        sum += v;
        sumsq += v * v;
    }
    if (cell.used > 0) {
        cell.value = sum / cell.used;
        if (is_rate) {
            cell.mc_se = std::sqrt(cell.value * (1.0 - cell.value) / cell.used);
        } else if (cell.used > 1) {
            const double var = (sumsq - cell.used * cell.value * cell.value) / (cell.used - 1);
            cell.mc_se = std::sqrt(std::max(var, 0.0) / cell.used);
        }
    } else {
        cell.value = kNaN;
    }
    const int reps = static_cast<int>(outcomes.size());
    if (cell.failed > 0 && cell.failed >= failure_cap * reps && reps >= 100) {
        std::ostringstream os;
        os << "cell n=" << n << " k=" << k << " " << cell.column << ": " << cell.failed << " of " << reps
           << " replications failed (cap " << failure_cap * 100 << "%)";
        throw NumericError(os.str());
    }
    return cell;
}

CompositeDgpConfig dgp_config(std::uint64_t seed, const std::array<double, 3>& kurtoses)
{
    CompositeDgpConfig cfg;
    cfg.seed = seed;
    cfg.kurtoses = kurtoses;
    return cfg;
}

std::string format_k(double k)
{
    std::ostringstream os;
    os << k;
    return os.str();
}

}  // namespace

const char* to_string(Estimator e)
{
    switch (e) {
    case Estimator::Eigenvector:
        return "M1";
    case Estimator::Iv1:
        return "IV-1";
    case Estimator::Iv2:
        return "IV-2";
    }
    return "?";
}

const char* to_string(CiMethod m)
{
    return m == CiMethod::Jackknife ? "jackknife" : "delta";
}

const McCell& McResult::at(int n, double k, const std::string& column) const
{
    for (const auto& c : cells)
        if (c.n == n && std::abs(c.k - k) < 1e-12 && c.column == column)
            return c;
    throw ConfigError("no cell n=" + std::to_string(n) + " k=" + format_k(k) + " column=" + column);
}

SignPattern supply_demand_pattern()
{
    SignPattern p(2, 2);
    p << 1, 1, -1, 1;
    return p;
}

double eigenvector_b1(const Sample& sample, const ProbeVectors& probes)
{
    const DemixingEstimate est = estimate_demixing(sample, probes);
    return label_by_signs(est, supply_demand_pattern()).lambda_final(0, 1);
}

McResult run_mse_experiment(const MseExperiment& cfg)
{
    validate_common(cfg.n, cfg.reps);
    if (cfg.estimators.empty())
        throw ConfigError("estimator list is empty");
    if (cfg.k.empty())
        throw ConfigError("noise-scale list is empty");
    const CompositeDgpConfig dgp = dgp_config(cfg.seed, cfg.kurtoses);
    dgp.validate();
    const int max_n = *std::max_element(cfg.n.begin(), cfg.n.end());
    const double b1 = dgp.lambda_true(0, 1);

    const std::size_t n_est = cfg.estimators.size();
    const std::size_t n_cells = cfg.n.size() * cfg.k.size() * n_est;
    std::vector<std::vector<double>> outcomes(n_cells, std::vector<double>(cfg.reps, kNaN));

    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t rep) {
        const LatentDraws latent = gen_latent(dgp, rep, max_n);
        const ProbeVectors probes = probes_for(cfg.seed, cfg.probes, rep);
        std::size_t cell = 0;
        for (int n : cfg.n)
            for (double k : cfg.k) {
                const CompositeDraw draw = compose(dgp, latent, n, k);
                for (Estimator e : cfg.estimators) {
                    double est = kNaN;
                    try {
                        switch (e) {
                        case Estimator::Eigenvector:
                            est = eigenvector_b1(to_sample(draw), probes);
                            break;
                        case Estimator::Iv1:
                            est = -iv_2sls(draw.x.col(0), draw.x.col(1), draw.s2);
                            break;
                        case Estimator::Iv2:
                            est = -iv_2sls(draw.x.col(0), draw.x.col(1), diluted_instrument(draw.s2, draw.z));
                            break;
                        }
                    } catch (const Error&) {
                        est = kNaN;
                    }
                    outcomes[cell++][rep] = std::isnan(est) ? kNaN : (est - b1) * (est - b1);
                }
            }
    });

    McResult res;
    res.table = "1";
    res.replications = cfg.reps;
    res.seed = cfg.seed;
    std::size_t cell = 0;
    for (int n : cfg.n)
        for (double k : cfg.k)
            for (Estimator e : cfg.estimators)
                res.cells.push_back(reduce_cell(n, k, to_string(e), outcomes[cell++], false, cfg.failure_cap));
    res.notes.push_back("value = mean squared error of b1 = Lambda_12 (true 1.5)");
    res.notes.push_back(std::string("w1 policy: ") +
                        (cfg.probes == ProbePolicy::Fixed ? "fixed" : "per-replication"));
    return res;
}

McResult run_coverage_experiment(const CoverageExperiment& cfg)
{
    validate_common(cfg.n, cfg.reps);
    if (cfg.methods.empty())
        throw ConfigError("method list is empty");
    if (!(cfg.level > 0.0 && cfg.level <= 1.0))
        throw ConfigError("confidence level must lie in (0, 1]");
    CompositeDgpConfig dgp = dgp_config(cfg.seed, cfg.kurtoses);
    dgp.k = cfg.k;
    dgp.validate();
    const int max_n = *std::max_element(cfg.n.begin(), cfg.n.end());
    const double b1 = dgp.lambda_true(0, 1);
    const SignPattern pattern = supply_demand_pattern();
    const Labeler labeler = [&](const MatrixXd& lt) { return label_by_signs(lt, pattern); };
    const double level = cfg.level;

    const std::size_t n_cells = cfg.n.size() * cfg.methods.size();
    std::vector<std::vector<double>> outcomes(n_cells, std::vector<double>(cfg.reps, kNaN));

    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t rep) {
        const LatentDraws latent = gen_latent(dgp, rep, max_n);
        const DemixingPipeline pipeline(probes_for(cfg.seed, cfg.probes, rep), IdentifyOptions{}, labeler);
        std::size_t cell = 0;
        for (int n : cfg.n) {
            const CompositeDraw draw = compose(dgp, latent, n, cfg.k);
            double point = kNaN;
            std::optional<Sample> sample;
            try {
                sample.emplace(draw.x);
                point = pipeline.run(raw_moments(sample->centered())).value(1);
            } catch (const Error&) {
            }
            for (CiMethod m : cfg.methods) {
                double covered = kNaN;
                if (!std::isnan(point)) {
                    try {
                        if (level >= 1.0) {
                            covered = 1.0;
                        } else {
                            const double var = m == CiMethod::Delta
                                                   ? delta_variance(*sample, pipeline).sigma_u(1, 1)
                                                   : jackknife_variance(*sample, pipeline).variance(1, 1);
                            const Interval ci = confidence_interval(point, var, static_cast<double>(n), level);
                            covered = (ci.lo <= b1 && b1 <= ci.hi) ? 1.0 : 0.0;
                        }
                    } catch (const Error&) {
                        covered = kNaN;
                    }
                }
                outcomes[cell++][rep] = covered;
            }
        }
    });

    McResult res;
    res.table = "2";
    res.replications = cfg.reps;
    res.seed = cfg.seed;
    std::size_t cell = 0;
    for (int n : cfg.n)
        for (CiMethod m : cfg.methods)
            res.cells.push_back(reduce_cell(n, cfg.k, to_string(m), outcomes[cell++], true, cfg.failure_cap));
    std::ostringstream note;
    note << "value = coverage rate of the " << cfg.level * 100 << "% interval for b1 at k = " << cfg.k;
    res.notes.push_back(note.str());
    res.notes.push_back(std::string("w1 policy: ") +
                        (cfg.probes == ProbePolicy::Fixed ? "fixed" : "per-replication"));
    return res;
}

McResult run_overid_power_experiment(const OveridExperiment& cfg)
{
    validate_common(cfg.n, cfg.reps);
    if (cfg.k.empty())
        throw ConfigError("noise-scale list is empty");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
        throw ConfigError("alpha must lie in (0, 1]");
    const CompositeDgpConfig dgp = dgp_config(cfg.seed, cfg.kurtoses);
    dgp.validate();
    const int max_n = *std::max_element(cfg.n.begin(), cfg.n.end());
    const ProbeVectors probes = probes_for(cfg.seed, ProbePolicy::Fixed, 0);
    WaldOptions wopts;
    wopts.method = cfg.method;

    const std::size_t n_cells = cfg.n.size() * cfg.k.size();
    std::vector<std::vector<double>> outcomes(n_cells, std::vector<double>(cfg.reps, kNaN));

    parallel_for(static_cast<std::size_t>(cfg.reps), [&](std::size_t rep) {
        const LatentDraws latent = gen_latent(dgp, rep, max_n);
        std::size_t cell = 0;
        for (int n : cfg.n)
            for (double k : cfg.k) {
                double reject = kNaN;
                try {
                    const TestResult t = wald_test(Sample(compose(dgp, latent, n, k).x), probes, wopts);
                    reject = t.p_value <= cfg.alpha ? 1.0 : 0.0;
                } catch (const Error&) {
                }
                outcomes[cell++][rep] = reject;
            }
    });

    McResult res;
    res.table = "3";
    res.replications = cfg.reps;
    res.seed = cfg.seed;
    std::size_t cell = 0;
    for (int n : cfg.n)
        for (double k : cfg.k)
            res.cells.push_back(reduce_cell(n, k, "reject", outcomes[cell++], true, cfg.failure_cap));
    std::ostringstream note;
    note << "value = rejection rate at alpha = " << cfg.alpha << " (" << to_string(cfg.method)
         << " Omega); w1 = (" << probes.w1(0) << ", " << probes.w1(1) << "), w2 = 1";
    res.notes.push_back(note.str());
    return res;
}

void write_csv(std::ostream& os, const McResult& result)
{
    os << "table,n,k,column,value,mc_se,used,failed\n";
    os << std::setprecision(10);
    for (const auto& c : result.cells)
        os << result.table << ',' << c.n << ',' << c.k << ',' << c.column << ',' << c.value << ',' << c.mc_se << ','
           << c.used << ',' << c.failed << '\n';
}

void write_table(std::ostream& os, const McResult& result)
{
    std::vector<int> ns;
    std::vector<double> ks;
    std::vector<std::string> cols;
    for (const auto& c : result.cells) {
        if (std::find(ns.begin(), ns.end(), c.n) == ns.end())
            ns.push_back(c.n);
        if (std::find_if(ks.begin(), ks.end(), [&](double v) { return std::abs(v - c.k) < 1e-12; }) == ks.end())
            ks.push_back(c.k);
        if (std::find(cols.begin(), cols.end(), c.column) == cols.end())
            cols.push_back(c.column);
    }
    os << std::setprecision(6);
    if (result.table == "2") {
        os << "method";
        for (int n : ns)
            os << ",n=" << n;
        os << '\n';
        for (const auto& col : cols) {
            os << col;
            for (int n : ns)
                os << ',' << 100.0 * result.at(n, ks.front(), col).value;
            os << '\n';
        }
    } else if (result.table == "3") {
        os << "n";
        for (double k : ks)
            os << ",k=" << k;
        os << '\n';
        for (int n : ns) {
            os << n;
            for (double k : ks)
                os << ',' << result.at(n, k, cols.front()).value;
            os << '\n';
        }
    } else {
        os << "n,k";
        for (const auto& col : cols)
            os << ',' << col;
        os << '\n';
        for (int n : ns)
            for (double k : ks) {
                os << n << ',' << k;
                for (const auto& col : cols)
                    os << ',' << result.at(n, k, col).value;
                os << '\n';
            }
    }
}

}  // namespace cumident
