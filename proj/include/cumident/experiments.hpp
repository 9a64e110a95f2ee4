#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cumident/dgp.hpp"
#include "cumident/labeling.hpp"
#include "cumident/overid.hpp"

namespace cumident {

enum class Estimator { Eigenvector, Iv1, Iv2 };
enum class CiMethod { Jackknife, Delta };

const char* to_string(Estimator e);
const char* to_string(CiMethod m);

// How w1 is drawn across replications: once for the whole experiment, or
// afresh for every replication (still seeded).
enum class ProbePolicy { Fixed, PerReplication };

struct McCell {
    int n = 0;
    double k = 0.0;
    std::string column;  // estimator or method name
    double value = 0.0;  // MSE, coverage rate or rejection rate
    double mc_se = 0.0;
    int used = 0;
    int failed = 0;
};

struct McResult {
    std::string table;
    std::vector<McCell> cells;
    int replications = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;

    const McCell& at(int n, double k, const std::string& column) const;
};

struct MseExperiment {
    std::vector<int> n{500, 3000, 5000};
    std::vector<double> k{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    int reps = 1000;
    std::vector<Estimator> estimators{Estimator::Eigenvector, Estimator::Iv1, Estimator::Iv2};
    std::uint64_t seed = 20240601;
    std::array<double, 3> kurtoses{3.0, 4.0, 5.0};
    ProbePolicy probes = ProbePolicy::PerReplication;
    double failure_cap = 0.01;
};

struct CoverageExperiment {
    std::vector<int> n{500, 3000, 5000};
    double k = 0.5;
    int reps = 1000;
    double level = 0.95;
    std::vector<CiMethod> methods{CiMethod::Jackknife, CiMethod::Delta};
    std::uint64_t seed = 20240602;
    std::array<double, 3> kurtoses{3.0, 4.0, 5.0};
    ProbePolicy probes = ProbePolicy::PerReplication;
    double failure_cap = 0.01;
};

struct OveridExperiment {
    std::vector<int> n{500, 750, 1000, 5000};
    std::vector<double> k{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    int reps = 1000;
    double alpha = 0.05;
    OmegaMethod method = OmegaMethod::Delta;
    std::uint64_t seed = 20240603;
    std::array<double, 3> kurtoses{3.0, 4.0, 5.0};
    double failure_cap = 0.01;
};

// Sign pattern of the supply/demand structural matrix [[1, 1.5], [-0.5, 1]].
SignPattern supply_demand_pattern();

// b1 = Lambda_12 from the eigenvector method with sign labeling.
double eigenvector_b1(const Sample& sample, const ProbeVectors& probes);

McResult run_mse_experiment(const MseExperiment& cfg);
McResult run_coverage_experiment(const CoverageExperiment& cfg);
McResult run_overid_power_experiment(const OveridExperiment& cfg);

// Long-format CSV: table,n,k,column,value,mc_se,used,failed
void write_csv(std::ostream& os, const McResult& result);
// Wide layout: rows n/k, one column per estimator, method or k value.
void write_table(std::ostream& os, const McResult& result);

}  // namespace cumident
