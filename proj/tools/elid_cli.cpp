// elid: validate backhaul topologies, solve routing/assignment instances,
// cross-check the exact solver against enumeration, and run the sweeps.
//
// Exit codes: 0 success, 1 validation/constraint failure, 2 usage or input
// error, 3 infeasible instance.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "elid/experiments.hpp"
#include "elid/report_io.hpp"
#include "elid/solver.hpp"
#include "elid/topology_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kInfeasible = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SchemeFlags {
    std::string scheme;
    std::optional<double> epsilon;
    std::optional<double> beta;

    void add_to(CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--scheme", scheme, "Bandwidth scheme: p1 (fixed), p2 (decoupled), p3 (combined)")
                        ->check(CLI::IsMember({"p1", "p2", "p3"}));
        if (required) opt->required();
        cmd->add_option("--epsilon", epsilon, "Fixed channel fraction for p1, in (0, 1]");
        cmd->add_option("--beta", beta, "Override the topology's downlink ratio beta");
    }

    elid::SchemeConfig resolve(const elid::Topology& topology) const {
        if (scheme == "p1") {
            if (!epsilon) throw UsageError("--scheme p1 requires --epsilon");
            return elid::SchemeConfig::fixed(*epsilon);
        }
        if (epsilon) throw UsageError("--epsilon only applies to --scheme p1");
        if (scheme == "p2") return elid::SchemeConfig::decoupled(topology.beta());
        return elid::SchemeConfig::combined();
    }
};

struct BudgetFlags {
    std::uint64_t node_limit = 0;
    std::int64_t time_limit_ms = 0;
    std::size_t hop_limit = 0;
    std::optional<unsigned> workers;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--node-limit", node_limit, "Branch-and-bound node budget (0: unlimited)");
        cmd->add_option("--time-limit", time_limit_ms, "Time budget in milliseconds (0: unlimited)");
        cmd->add_option("--hop-limit", hop_limit, "Maximum hops per path (0: number of nodes)");
        cmd->add_option("--workers", workers, "Solver worker threads (default: $ELID_WORKERS or all cores)")
            ->check(CLI::PositiveNumber);
    }

    unsigned resolved_workers() const {
        if (workers) return *workers;
        if (const char* env = std::getenv("ELID_WORKERS")) {
            try {
                const long v = std::stol(env);
                if (v > 0) return static_cast<unsigned>(v);
            } catch (const std::exception&) {
            }
            throw UsageError("ELID_WORKERS must be a positive integer");
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    elid::SolveBudget budget() const {
        elid::SolveBudget b;
        b.node_limit = node_limit;
        b.time_limit = std::chrono::milliseconds(time_limit_ms);
        b.hop_limit = hop_limit;
        b.workers = resolved_workers();
        return b;
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw elid::ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw elid::Error("cannot write " + output);
    out << text;
}

elid::Topology load(const std::string& path, const SchemeFlags* scheme) {
    auto topology = elid::load_topology(path);
    if (scheme && scheme->beta) topology = topology.with_beta(*scheme->beta);
    return topology;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--values: cannot parse '" + item + "'");
        }
    }
    return out;
}

int cmd_validate(const std::string& path, const std::string& assignment_path) {
    const auto topology = elid::load_topology(path);
    int status = kOk;
    for (const auto& v : elid::validate_topology(topology)) {
        std::cout << "topology: " << v.message << '\n';
        status = kViolation;
    }
    if (!assignment_path.empty()) {
        const auto assignment = elid::assignment_from_json(read_file(assignment_path));
        try {
            for (const auto& v : elid::check_assignment(topology, assignment)) {
                std::cout << "constraint " << static_cast<int>(v.family) << " (" << elid::to_string(v.family)
                          << "): " << v.message << '\n';
                status = kViolation;
            }
        } catch (const elid::StructuralError& e) {
            std::cout << "structure: " << e.what() << '\n';
            status = kViolation;
        }
    }
    if (status == kOk) std::cout << "valid\n";
    return status;
}

int cmd_solve(const std::string& path, const SchemeFlags& flags, const BudgetFlags& budget,
              const std::string& method, std::uint64_t seed, bool stats, const std::string& output) {
    const auto topology = load(path, &flags);
    const auto scheme = flags.resolve(topology);
    elid::SolveReport report;
    if (method == "exact") {
        report = elid::solve_exact(topology, scheme, budget.budget());
    } else if (method == "heuristic") {
        report = elid::solve_heuristic(topology, scheme, seed, budget.hop_limit);
    } else {
        report = elid::solve_oracle(topology, scheme, budget.hop_limit);
    }
    emit(elid::report_to_json(topology, report, {stats}), output);
    return report.status == elid::SolveStatus::infeasible ? kInfeasible : kOk;
}

int cmd_oracle_check(const std::string& path, const SchemeFlags& flags, const BudgetFlags& budget) {
    const auto topology = load(path, &flags);
    const auto scheme = flags.resolve(topology);
    const auto exact = elid::solve_exact(topology, scheme, budget.budget());
    const auto oracle = elid::solve_oracle(topology, scheme, budget.hop_limit);
    if (exact.status == elid::SolveStatus::infeasible && oracle.status == elid::SolveStatus::infeasible) {
        std::cout << "both solvers report infeasible\n";
        return kInfeasible;
    }
    if (exact.status != elid::SolveStatus::optimal || oracle.status != elid::SolveStatus::optimal) {
        std::cout << "status mismatch: exact " << elid::to_string(exact.status) << ", oracle "
                  << elid::to_string(oracle.status) << '\n';
        return kViolation;
    }
    const double delta = std::abs(exact.objective - oracle.objective);
    std::cout.precision(12);
    std::cout << "exact objective  " << exact.objective << " s (" << exact.stats.nodes_explored
              << " nodes)\noracle objective " << oracle.objective << " s (" << oracle.stats.nodes_explored
              << " assignments)\n";
    if (delta < 1e-9) {
        std::cout << "objectives match (Δ < 1e-9)\n";
        return kOk;
    }
    std::cout << "objectives differ (Δ = " << delta << ")\n";
    return kViolation;
}

int cmd_sweep(const std::string& path, const SchemeFlags& flags, const std::vector<std::string>& schemes,
              const BudgetFlags& budget, const std::string& param, const std::string& values,
              bool plot_data, const std::string& output) {
    elid::SweepSpec spec;
    spec.base = load(path, &flags);
    if (param == "D_lambda") {
        spec.parameter = elid::SweptParameter::data_rate;
    } else if (param == "omega_mec") {
        spec.parameter = elid::SweptParameter::mec_throughput;
    } else {
        spec.parameter = elid::SweptParameter::epsilon;
    }
    spec.values = parse_values(values);
    for (const auto& name : schemes) {
        SchemeFlags one = flags;
        one.scheme = name;
        if (name != "p1") one.epsilon.reset();
        spec.schemes.push_back(one.resolve(spec.base));
    }
    if (spec.parameter != elid::SweptParameter::epsilon && spec.schemes.empty()) {
        throw UsageError("sweep needs at least one --scheme");
    }
    try {
        elid::validate_sweep_spec(spec);
    } catch (const elid::DomainError& e) {
        throw UsageError(e.what());
    }
    elid::HarnessOptions options;
    options.workers = budget.resolved_workers();
    options.budget = budget.budget();
    auto result = elid::run_sweep(spec, options);
    result.label = param;
    emit(plot_data ? elid::sweep_plot_data({result}) : elid::sweep_csv(result), output);
    return kOk;
}

int cmd_reproduce(const std::string& fixtures, const std::string& out_dir, const BudgetFlags& budget,
                  bool plot_data) {
    elid::ReproduceOptions options;
    options.sparse_fixture = std::filesystem::path(fixtures) / "sparse.topo";
    options.dense_fixture = std::filesystem::path(fixtures) / "dense.topo";
    options.output_dir = out_dir;
    options.plot_data = plot_data;
    options.harness.workers = budget.resolved_workers();
    options.harness.budget = budget.budget();
    const auto summary = elid::reproduce(options);
    for (const auto& line : summary.checks) std::cout << line << '\n';
    std::cout << "outputs written to " << out_dir << '\n';
    return summary.all_passed ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ELiD fiber backhaul latency optimizer"};
    app.require_subcommand(1);

    std::string topology_path, assignment_path, output, method = "exact", param, values, fixtures, out_dir;
    std::uint64_t seed = 0;
    bool stats = false, plot_data = false;
    SchemeFlags scheme;
    BudgetFlags budget;
    std::vector<std::string> sweep_schemes;

    auto* validate = app.add_subcommand("validate", "Check a topology (and optionally an assignment)");
    validate->add_option("topology", topology_path, "Topology file")->required();
    validate->add_option("--assignment", assignment_path, "Solve report whose assignment is checked");

    auto* solve = app.add_subcommand("solve", "Find the latency-minimising assignment");
    solve->add_option("topology", topology_path, "Topology file")->required();
    scheme.add_to(solve);
    budget.add_to(solve);
    solve->add_option("--method", method, "exact, heuristic or oracle")
        ->check(CLI::IsMember({"exact", "heuristic", "oracle"}));
    solve->add_option("--seed", seed, "Heuristic seed");
    solve->add_flag("--stats", stats, "Include solver statistics in the report");
    solve->add_option("-o,--output", output, "Write the report here instead of stdout");

    auto* oracle = app.add_subcommand("oracle-check", "Compare branch-and-bound against enumeration");
    oracle->add_option("topology", topology_path, "Topology file")->required();
    scheme.add_to(oracle);
    budget.add_to(oracle);

    auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and emit CSV");
    sweep->add_option("topology", topology_path, "Topology file")->required();
    sweep->add_option("--param", param, "D_lambda, omega_mec or epsilon")
        ->required()
        ->check(CLI::IsMember({"D_lambda", "omega_mec", "epsilon"}));
    sweep->add_option("--values", values, "Comma-separated increasing values")->required();
    sweep->add_option("--scheme", sweep_schemes, "Schemes to run (repeatable)")
        ->check(CLI::IsMember({"p1", "p2", "p3"}));
    sweep->add_option("--epsilon", scheme.epsilon, "Fixed channel fraction for p1");
    sweep->add_option("--beta", scheme.beta, "Override the topology's downlink ratio beta");
    budget.add_to(sweep);
    sweep->add_flag("--plot-data", plot_data, "Emit gnuplot blocks instead of CSV");
    sweep->add_option("-o,--output", output, "Write here instead of stdout");

    auto* repro = app.add_subcommand("reproduce", "Run all experiments into an output directory");
    fixtures = ELID_DEFAULT_FIXTURES;
    out_dir = "results";
    repro->add_option("--fixtures", fixtures, "Directory holding sparse.topo and dense.topo");
    repro->add_option("--out", out_dir, "Output directory");
    repro->add_option("--seed", seed, "Accepted for interface symmetry; the exact solver is seed-free");
    budget.add_to(repro);
    repro->add_flag("--plot-data", plot_data, "Also write gnuplot data files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) return cmd_validate(topology_path, assignment_path);
        if (*solve) return cmd_solve(topology_path, scheme, budget, method, seed, stats, output);
        if (*oracle) return cmd_oracle_check(topology_path, scheme, budget);
        if (*sweep) {
            return cmd_sweep(topology_path, scheme, sweep_schemes, budget, param, values, plot_data, output);
        }
        if (*repro) return cmd_reproduce(fixtures, out_dir, budget, plot_data);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const elid::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const elid::OracleRefusal& e) {
        std::cerr << "oracle refused: " << e.what() << '\n';
        return kUsage;
    } catch (const elid::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const elid::StructuralError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kViolation;
    }
    return kUsage;
}
