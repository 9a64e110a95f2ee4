#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "cumident/csv.hpp"
#include "cumident/error.hpp"
#include "cumident/experiments.hpp"
#include "cumident/inference.hpp"
#include "cumident/labeling.hpp"
#include "cumident/overid.hpp"
#include "cumident/parallel.hpp"
#include "cumident/var.hpp"

#ifndef CUMIDENT_VERSION
#define CUMIDENT_VERSION "0.0.0"
#endif

using namespace cumident;

namespace {

std::string sha256_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path);
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return hex.str();
}

std::string utc_now()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    std::string command;
    std::string config;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;

    void write(std::ostream& os) const
    {
        os << "# command: " << command << '\n';
        if (!config.empty())
            os << "# config: " << config << '\n';
        os << "# seed: " << seed << '\n';
        os << "# version: cumident " << CUMIDENT_VERSION << '\n';
        os << "# timestamp: " << utc_now() << '\n';
        os << "# threads: " << worker_count() << '\n';
        for (const auto& path : inputs)
            os << "# input_sha256: " << path << ' ' << sha256_file(path) << '\n';
    }
};

// Output goes to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_)
                throw InputError("cannot write " + path);
        }
        stream().precision(std::numeric_limits<double>::max_digits10);
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::string join_args(int argc, char** argv)
{
    std::string s;
    for (int i = 0; i < argc; ++i)
        s += (i ? " " : "") + std::string(argv[i]);
    return s;
}

Labeler make_labeler(const std::string& spec)
{
    if (spec == "none")
        return {};
    if (spec == "triangular")
        return [](const MatrixXd& lt) { return label_by_triangular(lt); };
    if (spec.rfind("signs:", 0) == 0) {
        const MatrixXd raw = read_matrix_file(spec.substr(6));
        SignPattern pattern = raw.unaryExpr([](double v) { return static_cast<double>((v > 0) - (v < 0)); }).cast<int>();
        return [pattern](const MatrixXd& lt) { return label_by_signs(lt, pattern); };
    }
    throw ConfigError("--label must be signs:<file>, triangular or none");
}

std::vector<double> parse_list(const std::string& text)
{
    std::vector<double> out;
    std::string tok;
    std::istringstream ss(text);
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                ++used;
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + tok + "'");
        }
    }
    if (out.empty())
        throw ConfigError("empty list '" + text + "'");
    return out;
}

std::map<std::string, std::string> read_config(const std::string& path)
{
    std::map<std::string, std::string> kv;
    if (path.empty())
        return kv;
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto strip = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return kv;
}

void print_matrix(std::ostream& os, const char* name, const MatrixXd& m)
{
    os << name << ":\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << "  ";
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            os << std::setw(12) << std::setprecision(5) << m(i, j);
        os << '\n';
    }
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string csv;
    int order = 3;
    std::string w2 = "ones";
    std::uint64_t seed = 0;
    std::string label = "none";
    std::string se = "both";
    double level = 0.95;
    std::string out;
};

int cmd_estimate(const EstimateArgs& a, bool se_given, const std::string& cmdline)
{
    const CsvTable table = read_csv_file(a.csv);
    const Sample sample(table.values);
    const int d = static_cast<int>(sample.d());

    ProbeVectors probes = ProbeVectors::draw(d, a.seed);
    Manifest manifest{cmdline, "", a.seed, {a.csv}};
    if (a.w2 != "ones") {
        const MatrixXd w = read_matrix_file(a.w2);
        if (w.size() != d)
            throw InputError(a.w2 + ": w2 must have " + std::to_string(d) + " entries");
        probes = ProbeVectors::with_w2(d, a.seed, Eigen::Map<const VectorXd>(w.data(), d));
        manifest.inputs.push_back(a.w2);
    }

    std::string se = a.se;
    if (a.order == 4) {
        if (se_given && se != "none")
            throw ConfigError("standard errors are available for --order 3 only");
        se = "none";
    }

    IdentifyOptions opts;
    opts.order = a.order;
    const DemixingEstimate est = estimate_demixing(sample, probes, opts);
    const Labeler labeler = make_labeler(a.label);
    std::optional<LabelingResult> labels;
    if (labeler)
        labels = labeler(est.lambda_tilde);
    const MatrixXd& final_rows = labels ? labels->lambda_final : est.lambda_tilde;

    std::optional<DeltaVarianceResult> delta;
    std::optional<JackknifeResult> jack;
    if (se != "none") {
        const DemixingPipeline pipeline(probes, opts, labeler);
        if (se == "delta" || se == "both")
            delta = delta_variance(sample, pipeline);
        if (se == "jackknife" || se == "both")
            jack = jackknife_variance(sample, pipeline);
    }

    Output out(a.out);
    std::ostream& os = out.stream();
    manifest.write(os);
    os << "# columns: " ;
    for (std::size_t c = 0; c < table.headers.size(); ++c)
        os << (c ? "," : "") << table.headers[c];
    os << "\n# n: " << sample.n() << ", order: " << a.order << ", label: " << a.label << ", orientation: "
       << to_string(est.orientation_rule) << '\n';
    if (table.date_header)
        os << "# date column: " << *table.date_header << " (" << table.dates.front() << " .. " << table.dates.back()
           << ")\n";
    for (const auto& w : est.warnings)
        os << "# warning: " << w << '\n';
    if (labels)
        for (const auto& w : labels->warnings)
            os << "# warning: " << w << '\n';

    os << "quantity,row,col,value,se_delta,lo_delta,hi_delta,se_jackknife,lo_jackknife,hi_jackknife\n";
    const double n = static_cast<double>(sample.n());
    auto write_se = [&](double value, const MatrixXd* var, Eigen::Index idx) {
        if (!var) {
            os << ",,,";
            return;
        }
        const double v = (*var)(idx, idx);
        const Interval ci = confidence_interval(value, v, n, a.level);
        os << ',' << std::sqrt(v / n) << ',' << ci.lo << ',' << ci.hi;
    };
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            os << "lambda_tilde," << i + 1 << ',' << j + 1 << ',' << est.lambda_tilde(i, j) << ",,,,,,\n";
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const double v = final_rows(i, j);
            os << "lambda_final," << i + 1 << ',' << j + 1 << ',' << v;
            write_se(v, delta ? &delta->sigma_u : nullptr, i * d + j);
            write_se(v, jack ? &jack->variance : nullptr, i * d + j);
            os << '\n';
        }
    for (Eigen::Index i = 0; i < d; ++i)
        os << "eigenvalue," << i + 1 << ",," << est.eigenvalues(i) << ",,,,,,\n";
    os << "cond_g2,,," << est.cond_g2 << ",,,,,,\n";
    os << "max_imag,,," << est.max_imag << ",,,,,,\n";
    os << "min_relative_gap,,," << est.min_relative_gap << ",,,,,,\n";
    os << "near_degenerate,,," << (est.near_degenerate ? 1 : 0) << ",,,,,,\n";
    if (labels)
        for (Eigen::Index i = 0; i < d; ++i)
            os << "permutation," << i + 1 << ",," << labels->permutation[i] + 1 << ",,,,,,\n";
    if (jack)
        os << "jackknife_label_flips,,," << jack->label_flips << ",,,,,,\n";

    std::ostream& s = std::cerr;
    s << "cumident estimate: n=" << sample.n() << " d=" << d << " order=" << a.order << '\n';
    print_matrix(s, labels ? "lambda (labeled)" : "lambda (unlabeled)", final_rows);
    s << "cond(G(w2)) = " << est.cond_g2 << ", max imag = " << est.max_imag
      << ", min relative eigen gap = " << est.min_relative_gap << '\n';
    if (delta)
        print_matrix(s, "delta-method s.e.",
                     (delta->sigma_u.diagonal() / n).cwiseSqrt().reshaped<Eigen::RowMajor>(d, d));
    if (jack)
        print_matrix(s, "jackknife s.e.", (jack->variance.diagonal() / n).cwiseSqrt().reshaped<Eigen::RowMajor>(d, d));
    return 0;
}

// -------------------------------------------------------------------- test

struct TestArgs {
    std::string csv;
    std::uint64_t seed = 0;
    std::string omega = "delta";
    std::string out;
};

int cmd_test(const TestArgs& a, const std::string& cmdline)
{
    const CsvTable table = read_csv_file(a.csv);
    const Sample sample(table.values);
    WaldOptions opts;
    opts.method = a.omega == "jackknife" ? OmegaMethod::Jackknife : OmegaMethod::Delta;
    const TestResult r = wald_test(sample, ProbeVectors::draw(static_cast<int>(sample.d()), a.seed), opts);

    Output out(a.out);
    std::ostream& os = out.stream();
    Manifest{cmdline, "", a.seed, {a.csv}}.write(os);
    os << "# omega: " << to_string(r.method) << '\n';
    os << "quantity,index,value\n";
    os << "statistic,," << r.statistic << '\n';
    os << "dof,," << r.dof << '\n';
    os << "p_value,," << r.p_value << '\n';
    os << "n,," << sample.n() << '\n';
    os << "omega_condition,," << r.omega_condition << '\n';
    for (Eigen::Index i = 0; i < r.r_hat.size(); ++i)
        os << "r_hat," << i + 1 << ',' << r.r_hat(i) << '\n';

    std::cerr << "Wald overidentification test (" << to_string(r.method) << " Omega)\n"
              << "  T_n = " << r.statistic << "  dof = " << r.dof << "  p = " << r.p_value << '\n';
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string config;
    int table = 0;
    int reps = 0;
    std::optional<std::uint64_t> seed;
    std::string emit_sample;
    std::string out;
    std::string format = "long";
};

int cmd_simulate(const SimulateArgs& a, const std::string& cmdline)
{
    auto kv = read_config(a.config);
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end())
            return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    int table = a.table;
    if (auto v = take("table"); v && table == 0)
        table = static_cast<int>(parse_list(*v).at(0));
    std::optional<std::uint64_t> seed = a.seed;
    if (auto v = take("seed"); v && !seed)
        seed = std::stoull(*v);
    if (!seed)
        throw ConfigError("a seed is required (--seed or 'seed =' in the config)");
    int reps = a.reps;
    if (auto v = take("reps"); v && reps == 0)
        reps = static_cast<int>(parse_list(*v).at(0));
    if (reps == 0)
        reps = 1000;
    if (reps < 1)
        throw ConfigError("reps must be positive");

    std::vector<int> ns;
    if (auto v = take("n"))
        for (double x : parse_list(*v))
            ns.push_back(static_cast<int>(x));
    std::vector<double> ks;
    if (auto v = take("k"))
        ks = parse_list(*v);
    std::array<double, 3> kurt{3.0, 4.0, 5.0};
    if (auto v = take("kurtoses")) {
        auto list = parse_list(*v);
        if (list.size() != 3)
            throw ConfigError("kurtoses needs three values");
        std::copy(list.begin(), list.end(), kurt.begin());
    }
    ProbePolicy policy = ProbePolicy::PerReplication;
    if (auto v = take("probes")) {
        if (*v == "fixed")
            policy = ProbePolicy::Fixed;
        else if (*v != "per-replication")
            throw ConfigError("probes must be fixed or per-replication");
    }
    std::optional<double> cap;
    if (auto v = take("failure_cap"))
        cap = parse_list(*v).at(0);
    std::optional<double> level, alpha;
    if (auto v = take("level"))
        level = parse_list(*v).at(0);
    if (auto v = take("alpha"))
        alpha = parse_list(*v).at(0);
    std::optional<std::string> omega = take("omega");
    if (!kv.empty())
        throw ConfigError("unknown config key '" + kv.begin()->first + "'");

    Manifest manifest{cmdline, a.config, *seed, {}};
    if (!a.config.empty())
        manifest.inputs.push_back(a.config);

    if (!a.emit_sample.empty()) {
        CompositeDgpConfig dgp;
        dgp.n = ns.empty() ? 5000 : ns.front();
        dgp.k = ks.empty() ? 0.0 : ks.front();
        dgp.kurtoses = kurt;
        dgp.seed = *seed;
        const CompositeDraw draw = gen_composite(dgp, 0);
        std::ofstream f(a.emit_sample);
        if (!f)
            throw InputError("cannot write " + a.emit_sample);
        manifest.write(f);
        f << "# sample: n=" << dgp.n << " k=" << dgp.k << " lambda=[[1,1.5],[-0.5,1]]\n";
        write_csv(f, {"X1", "X2"}, draw.x);
        std::cerr << "wrote " << dgp.n << " observations to " << a.emit_sample << '\n';
        if (table == 0)
            return 0;
    }

    McResult result;
    switch (table) {
    case 1: {
        MseExperiment c;
        c.reps = reps;
        c.seed = *seed;
        c.kurtoses = kurt;
        c.probes = policy;
        if (!ns.empty()) c.n = ns;
        if (!ks.empty()) c.k = ks;
        if (cap) c.failure_cap = *cap;
        result = run_mse_experiment(c);
        break;
    }
    case 2: {
        CoverageExperiment c;
        c.reps = reps;
        c.seed = *seed;
        c.kurtoses = kurt;
        c.probes = policy;
        if (!ns.empty()) c.n = ns;
        if (!ks.empty()) c.k = ks.front();
        if (level) c.level = *level;
        if (cap) c.failure_cap = *cap;
        result = run_coverage_experiment(c);
        break;
    }
    case 3: {
        OveridExperiment c;
        c.reps = reps;
        c.seed = *seed;
        c.kurtoses = kurt;
        if (!ns.empty()) c.n = ns;
        if (!ks.empty()) c.k = ks;
        if (alpha) c.alpha = *alpha;
        if (omega) c.method = *omega == "jackknife" ? OmegaMethod::Jackknife : OmegaMethod::Delta;
        if (cap) c.failure_cap = *cap;
        result = run_overid_power_experiment(c);
        break;
    }
    default:
        throw ConfigError("--table must be 1, 2 or 3");
    }

    Output out(a.out);
    std::ostream& os = out.stream();
    manifest.write(os);
    os << "# reps: " << result.replications << '\n';
    for (const auto& note : result.notes)
        os << "# " << note << '\n';
    if (a.format == "wide")
        write_table(os, result);
    else
        write_csv(os, result);
    write_table(std::cerr, result);
    return 0;
}

// --------------------------------------------------------------------- var

struct VarArgs {
    std::string csv;
    int lags = 0;
    std::string pairs = "all";
    std::string controls;
    std::uint64_t seed = 0;
    std::string omega = "delta";
    double alpha = 0.05;
    std::string out;
};

std::vector<std::pair<int, int>> parse_pairs(const std::string& text, int d)
{
    if (text == "all")
        return all_pairs(d);
    std::vector<std::pair<int, int>> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ';')) {
        auto v = parse_list(item);
        if (v.size() != 2)
            throw ConfigError("pair '" + item + "' must be i,j");
        out.emplace_back(static_cast<int>(v[0]) - 1, static_cast<int>(v[1]) - 1);
    }
    return out;
}

int cmd_var(const VarArgs& a, const std::string& cmdline)
{
    const CsvTable table = read_csv_file(a.csv);
    std::vector<int> control_cols;
    if (!a.controls.empty()) {
        std::string name;
        std::istringstream ss(a.controls);
        while (std::getline(ss, name, ','))
            control_cols.push_back(table.column(name));
    }
    std::vector<int> system_cols;
    std::vector<std::string> names;
    for (int c = 0; c < static_cast<int>(table.headers.size()); ++c)
        if (std::find(control_cols.begin(), control_cols.end(), c) == control_cols.end()) {
            system_cols.push_back(c);
            names.push_back(table.headers[c]);
        }
    if (system_cols.size() < 2)
        throw InputError("the VAR system needs at least two series after removing controls");

    MatrixXd series = table.values(Eigen::all, system_cols);
    if (!control_cols.empty())
        series = partial_out(series, table.values(Eigen::all, control_cols));
    const VarFit fit = fit_var(series, a.lags);
    const auto pairs = parse_pairs(a.pairs, static_cast<int>(series.cols()));
    const PairwiseReport report = pairwise_overid(
        fit, pairs, a.seed, a.alpha, a.omega == "jackknife" ? OmegaMethod::Jackknife : OmegaMethod::Delta);

    Output out(a.out);
    std::ostream& os = out.stream();
    Manifest{cmdline, "", a.seed, {a.csv}}.write(os);
    os << "# lags: " << report.lag << ", effective n: " << report.n_effective << ", alpha: " << report.alpha << '\n';
    if (table.date_header && static_cast<int>(table.dates.size()) > a.lags)
        os << "# residual dates: " << table.dates[a.lags] << " .. " << table.dates.back() << '\n';
    os << "i,j,series_i,series_j,statistic,dof,p_value,reject,error\n";
    for (const auto& p : report.pairs) {
        os << p.i + 1 << ',' << p.j + 1 << ',' << names[p.i] << ',' << names[p.j] << ',';
        if (p.ok)
            os << p.result.statistic << ',' << p.result.dof << ',' << p.result.p_value << ','
               << (p.result.p_value < report.alpha ? 1 : 0) << ",\n";
        else
            os << ",,,,\"" << p.error << "\"\n";
    }

    std::cerr << "VAR(" << report.lag << ") residual pairs, n = " << report.n_effective << '\n';
    for (const auto& p : report.pairs) {
        std::cerr << "  (" << names[p.i] << ", " << names[p.j] << ")  ";
        if (p.ok)
            std::cerr << "T = " << std::setprecision(4) << p.result.statistic << "  p = " << p.result.p_value
                      << (p.result.p_value < report.alpha ? "  reject" : "") << '\n';
        else
            std::cerr << "failed: " << p.error << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Identification and testing from third-order cumulants"};
    app.set_version_flag("--version", CUMIDENT_VERSION);
    app.require_subcommand(1);
    const std::string cmdline = join_args(argc, argv);

    EstimateArgs ea;
    auto* est = app.add_subcommand("estimate", "Estimate the demixing matrix from a CSV sample");
    est->add_option("csv", ea.csv, "Input CSV")->required()->check(CLI::ExistingFile);
    est->add_option("--order", ea.order, "Cumulant order")->check(CLI::IsMember({3, 4}));
    est->add_option("--w2", ea.w2, "Second probe: 'ones' or a file with d numbers");
    est->add_option("--seed", ea.seed, "Seed for the w1 draw")->required();
    est->add_option("--label", ea.label, "signs:<pattern file>, triangular or none");
    auto* se_opt = est->add_option("--se", ea.se, "Standard errors")
                       ->check(CLI::IsMember({"delta", "jackknife", "both", "none"}));
    est->add_option("--level", ea.level, "Confidence level")->check(CLI::Range(0.5, 0.9999));
    est->add_option("-o,--out", ea.out, "Output CSV (default stdout)");

    TestArgs ta;
    auto* tst = app.add_subcommand("test", "Wald overidentification test");
    tst->add_option("csv", ta.csv, "Input CSV")->required()->check(CLI::ExistingFile);
    tst->add_option("--seed", ta.seed, "Seed for the w1 draw")->required();
    tst->add_option("--omega", ta.omega, "Covariance estimator")->check(CLI::IsMember({"delta", "jackknife"}));
    tst->add_option("-o,--out", ta.out, "Output CSV (default stdout)");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo experiments");
    sim->add_option("config", sa.config, "key = value config file")->check(CLI::ExistingFile);
    sim->add_option("--table", sa.table, "Experiment: 1 MSE, 2 coverage, 3 size/power")->check(CLI::IsMember({1, 2, 3}));
    sim->add_option("--reps", sa.reps, "Replications")->check(CLI::PositiveNumber);
    sim->add_option("--seed", sa.seed, "Master seed");
    sim->add_option("--emit-sample", sa.emit_sample, "Write one simulated sample to this CSV");
    sim->add_option("--format", sa.format, "long or wide")->check(CLI::IsMember({"long", "wide"}));
    sim->add_option("-o,--out", sa.out, "Output CSV (default stdout)");

    VarArgs va;
    auto* var = app.add_subcommand("var", "Pairwise tests on VAR residuals");
    var->add_option("csv", va.csv, "Input CSV")->required()->check(CLI::ExistingFile);
    var->add_option("--lags", va.lags, "Lag order")->required()->check(CLI::Range(1, 1000));
    var->add_option("--pairs", va.pairs, "'all' or i,j;k,l (1-based)");
    var->add_option("--controls", va.controls, "Comma-separated control columns");
    var->add_option("--seed", va.seed, "Seed for the w1 draw")->required();
    var->add_option("--omega", va.omega, "Covariance estimator")->check(CLI::IsMember({"delta", "jackknife"}));
    var->add_option("--alpha", va.alpha, "Test level")->check(CLI::Range(0.0, 1.0));
    var->add_option("-o,--out", va.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*est)
            return cmd_estimate(ea, se_opt->count() > 0, cmdline);
        if (*tst)
            return cmd_test(ta, cmdline);
        if (*sim)
            return cmd_simulate(sa, cmdline);
        if (*var)
            return cmd_var(va, cmdline);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what();
        if (e.condition() > 0)
            std::cerr << " (condition " << e.condition() << ")";
        std::cerr << '\n';
        return 3;
    } catch (const LabelingError& e) {
        std::cerr << "labeling error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
