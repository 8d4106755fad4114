#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "elid/latency.hpp"
#include "elid/solver.hpp"

namespace elid {

// Initial-run parameters (bytes, bytes/s).
namespace baseline {
inline constexpr double data_rate = 100e6;
inline constexpr double beta = 0.8;
inline constexpr double mec_throughput = 0.25e9;
inline constexpr double cloud_throughput = 55e9;
inline constexpr double mec_memory = 1e9;
inline constexpr double cloud_memory = 256e9;
}  // namespace baseline

// Edge-server speeds of the data-rate sweep: slow, medium, fast.
inline constexpr double kMecSpeeds[] = {50e6, 250e6, 1e9};
inline constexpr double kFixedEpsilon = 0.1;

enum class SweptParameter { data_rate, mec_throughput, epsilon };

std::string_view to_string(SweptParameter parameter);

struct SweepSpec {
    Topology base;
    SweptParameter parameter = SweptParameter::data_rate;
    std::vector<double> values;          // strictly increasing
    std::vector<SchemeConfig> schemes;   // ignored for epsilon sweeps (always p1)
};

// Throws DomainError on an empty or non-increasing value list or values
// outside the parameter's domain.
void validate_sweep_spec(const SweepSpec& spec);

struct SweepRow {
    double value = 0.0;
    std::string scheme;
    double mean_latency = 0.0;
    double objective = 0.0;
    double cloud_fraction = 0.0;
    SolveStatus status = SolveStatus::infeasible;
    Topology topology;      // instance actually solved
    SchemeConfig scheme_config;
    Assignment assignment;  // empty when infeasible
};

struct SweepResult {
    SweptParameter parameter = SweptParameter::data_rate;
    std::string label;             // curve name for plot output
    std::vector<SweepRow> rows;    // ordered by value, then scheme order
};

struct HarnessOptions {
    unsigned workers = 1;  // sweep points solved concurrently
    SolveBudget budget;
};

SweepResult run_sweep(const SweepSpec& spec, const HarnessOptions& options);

struct InitialRun {
    SolveReport sparse;
    SolveReport dense;
};

// Solves both fixtures with the combined scheme. Throws Error when a fixture
// is infeasible or the dense network does not beat the sparse one.
InitialRun run_initial(const Topology& sparse, const Topology& dense, const HarnessOptions& options);

// One data-rate curve per edge-server speed, combined scheme.
std::vector<SweepResult> run_dlambda_sweep(const SweepSpec& spec, std::span<const double> mec_speeds,
                                           const HarnessOptions& options);

// p1 (fixed epsilon), p2 and p3 over the sweep's data-rate values.
SweepResult run_scheme_comparison(const SweepSpec& spec, double epsilon, const HarnessOptions& options);

// Header: swept_param,value,scheme,mean_latency_s,objective_s,cloud_fraction,status
std::string sweep_csv(const SweepResult& result);
// gnuplot layout: one block per (curve, scheme), blocks separated by two blank lines.
std::string sweep_plot_data(const std::vector<SweepResult>& curves);

// Coefficient of determination of the least-squares line through (x, y).
double linear_fit_r2(std::span<const double> x, std::span<const double> y);

struct ReproduceOptions {
    std::filesystem::path sparse_fixture;
    std::filesystem::path dense_fixture;
    std::filesystem::path output_dir;
    std::vector<double> data_rates;  // defaults to kDefaultSweepRates when empty
    bool plot_data = false;
    HarnessOptions harness;
};

inline constexpr double kDefaultSweepRates[] = {10e6, 25e6, 50e6, 75e6, 100e6, 150e6};

struct ReproduceSummary {
    std::vector<std::string> checks;  // one "PASS|FAIL name: detail" line each
    bool all_passed = true;
};

// Runs every experiment and writes CSV/JSON outputs plus summary.txt.
ReproduceSummary reproduce(const ReproduceOptions& options);

}  // namespace elid
