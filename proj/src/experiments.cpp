#include "elid/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "elid/report_io.hpp"
#include "elid/topology_io.hpp"

namespace elid {

std::string_view to_string(SweptParameter parameter) {
    switch (parameter) {
        case SweptParameter::data_rate: return "D_lambda";
        case SweptParameter::mec_throughput: return "omega_mec";
        case SweptParameter::epsilon: return "epsilon";
    }
    return "?";
}

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string mbps_label(double rate) { return fmt("%.0fMBps", rate / 1e6); }

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

// Runs fn(0..count-1) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex mu;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.values.empty()) throw DomainError("sweep needs at least one value");
    for (std::size_t k = 1; k < spec.values.size(); ++k) {
        if (!(spec.values[k] > spec.values[k - 1])) {
            throw DomainError("sweep values must be strictly increasing");
        }
    }
    for (double v : spec.values) {
        const bool ok = spec.parameter == SweptParameter::epsilon ? (v > 0.0 && v <= 1.0) : v > 0.0;
        if (!ok) throw DomainError("sweep value " + fmt("%g", v) + " outside the parameter domain");
    }
    if (spec.parameter != SweptParameter::epsilon && spec.schemes.empty()) {
        throw DomainError("sweep needs at least one scheme");
    }
}

SweepResult run_sweep(const SweepSpec& spec, const HarnessOptions& options) {
    validate_sweep_spec(spec);
    const std::vector<SchemeConfig> schemes = spec.parameter == SweptParameter::epsilon
                                                  ? std::vector<SchemeConfig>{SchemeConfig::fixed(1.0)}
                                                  : spec.schemes;
    SweepResult result;
    result.parameter = spec.parameter;
    result.rows.resize(spec.values.size() * schemes.size());

    SolveBudget budget = options.budget;
    if (options.workers > 1) budget.workers = 1;

    parallel_for(result.rows.size(), options.workers, [&](std::size_t idx) {
        const double value = spec.values[idx / schemes.size()];
        SchemeConfig scheme = schemes[idx % schemes.size()];
        SweepRow row;
        row.value = value;
        switch (spec.parameter) {
            case SweptParameter::data_rate: row.topology = spec.base.with_uniform_data_rate(value); break;
            case SweptParameter::mec_throughput:
                row.topology = spec.base.with_throughput(NodeRole::mec, value);
                break;
            case SweptParameter::epsilon:
                row.topology = spec.base;
                scheme = SchemeConfig::fixed(value);
                break;
        }
        row.scheme = scheme.name();
        row.scheme_config = scheme;
        const SolveReport report = solve_exact(row.topology, scheme, budget);
        row.status = report.status;
        if (report.status != SolveStatus::infeasible) {
            row.mean_latency = report.latency.mean_latency();
            row.objective = report.objective;
            row.cloud_fraction = row.topology.cloud() ? cloud_fraction(row.topology, report.assignment) : 0.0;
            row.assignment = report.assignment;
        } else {
            row.mean_latency = row.objective = row.cloud_fraction = std::nan("");
        }
        result.rows[idx] = std::move(row);
    });
    return result;
}

InitialRun run_initial(const Topology& sparse, const Topology& dense, const HarnessOptions& options) {
    const auto scheme = SchemeConfig::combined();
    SolveBudget budget = options.budget;
    budget.workers = std::max(budget.workers, options.workers);
    InitialRun run{solve_exact(sparse, scheme, budget), solve_exact(dense, scheme, budget)};
    if (run.sparse.status == SolveStatus::infeasible) throw Error("sparse fixture is infeasible");
    if (run.dense.status == SolveStatus::infeasible) throw Error("dense fixture is infeasible");
    if (run.dense.objective > run.sparse.objective + 1e-9) {
        throw Error("dense fixture objective " + fmt("%.9f", run.dense.objective) +
                    " exceeds sparse objective " + fmt("%.9f", run.sparse.objective));
    }
    return run;
}

std::vector<SweepResult> run_dlambda_sweep(const SweepSpec& spec, std::span<const double> mec_speeds,
                                           const HarnessOptions& options) {
    std::vector<SweepResult> curves;
    for (double speed : mec_speeds) {
        SweepSpec curve = spec;
        curve.parameter = SweptParameter::data_rate;
        curve.base = spec.base.with_throughput(NodeRole::mec, speed);
        curve.schemes = {SchemeConfig::combined()};
        SweepResult r = run_sweep(curve, options);
        r.label = "omega_mec=" + mbps_label(speed);
        curves.push_back(std::move(r));
    }
    return curves;
}

SweepResult run_scheme_comparison(const SweepSpec& spec, double epsilon, const HarnessOptions& options) {
    SweepSpec cmp = spec;
    cmp.parameter = SweptParameter::data_rate;
    cmp.schemes = {SchemeConfig::fixed(epsilon), SchemeConfig::decoupled(spec.base.beta()),
                   SchemeConfig::combined()};
    SweepResult r = run_sweep(cmp, options);
    r.label = "scheme_comparison";
    return r;
}

std::string sweep_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "swept_param,value,scheme,mean_latency_s,objective_s,cloud_fraction,status\n";
    for (const auto& row : result.rows) {
        out << to_string(result.parameter) << ',' << fmt("%.12g", row.value) << ',' << row.scheme << ','
            << fmt("%.9f", row.mean_latency) << ',' << fmt("%.9f", row.objective) << ','
            << fmt("%.6f", row.cloud_fraction) << ',' << to_string(row.status) << '\n';
    }
    return out.str();
}

std::string sweep_plot_data(const std::vector<SweepResult>& curves) {
    std::ostringstream out;
    bool first = true;
    for (const auto& curve : curves) {
        std::vector<std::string> schemes;
        for (const auto& row : curve.rows) {
            if (std::find(schemes.begin(), schemes.end(), row.scheme) == schemes.end()) {
                schemes.push_back(row.scheme);
            }
        }
        for (const auto& scheme : schemes) {
            if (!first) out << "\n\n";
            first = false;
            out << "# " << curve.label << " scheme=" << scheme << '\n';
            out << "# " << to_string(curve.parameter) << " mean_latency_s objective_s cloud_fraction\n";
            for (const auto& row : curve.rows) {
                if (row.scheme != scheme) continue;
                out << fmt("%.12g", row.value) << ' ' << fmt("%.9f", row.mean_latency) << ' '
                    << fmt("%.9f", row.objective) << ' ' << fmt("%.6f", row.cloud_fraction) << '\n';
            }
        }
    }
    return out.str();
}

double linear_fit_r2(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("linear fit needs distinct x values");
    if (syy == 0.0) return 1.0;
    const double slope = sxy / sxx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + slope * (x[i] - mx));
        ss_res += r * r;
    }
    return 1.0 - ss_res / syy;
}

ReproduceSummary reproduce(const ReproduceOptions& options) {
    ReproduceSummary summary;
    auto check = [&summary](bool ok, const std::string& line) {
        summary.checks.push_back((ok ? "PASS " : "FAIL ") + line);
        summary.all_passed = summary.all_passed && ok;
    };

    const Topology sparse = load_topology(options.sparse_fixture);
    const Topology dense = load_topology(options.dense_fixture);
    std::filesystem::create_directories(options.output_dir);
    const auto& dir = options.output_dir;

    // Initial runs.
    const InitialRun initial = run_initial(sparse, dense, options.harness);
    write_file(dir / "initial_sparse.json", report_to_json(sparse, initial.sparse));
    write_file(dir / "initial_dense.json", report_to_json(dense, initial.dense));
    check(initial.dense.objective <= initial.sparse.objective + 1e-9,
          "dense_beats_sparse: dense objective " + fmt("%.9f", initial.dense.objective) +
              " s <= sparse objective " + fmt("%.9f", initial.sparse.objective) + " s");

    SweepSpec spec;
    spec.base = sparse;
    spec.parameter = SweptParameter::data_rate;
    if (options.data_rates.empty()) {
        spec.values.assign(std::begin(kDefaultSweepRates), std::end(kDefaultSweepRates));
    } else {
        spec.values = options.data_rates;
    }

    // Data-rate sweep per edge-server speed.
    const auto curves = run_dlambda_sweep(spec, kMecSpeeds, options.harness);
    for (const auto& curve : curves) {
        const std::string name = "dlambda_" + curve.label.substr(curve.label.find('=') + 1);
        write_file(dir / (name + ".csv"), sweep_csv(curve));

        std::vector<double> xs, ys;
        bool monotone = true;
        for (const auto& row : curve.rows) {
            if (row.status != SolveStatus::optimal) continue;
            if (!ys.empty() && row.mean_latency < ys.back()) monotone = false;
            xs.push_back(row.value);
            ys.push_back(row.mean_latency);
        }
        check(monotone, "latency_nondecreasing[" + curve.label + "]");
        if (xs.size() >= 2) {
            const double r2 = linear_fit_r2(xs, ys);
            check(r2 >= 0.99, "linearity[" + curve.label + "]: R^2 = " + fmt("%.6f", r2));
        }
    }
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
        bool ok = true;
        std::string detail;
        for (std::size_t c = 0; c < curves.size(); ++c) {
            detail += (c ? " >= " : "") + fmt("%.3f", curves[c].rows[v].cloud_fraction);
            if (c > 0 && curves[c].rows[v].cloud_fraction > curves[c - 1].rows[v].cloud_fraction) ok = false;
        }
        check(ok, "offload_monotone[D=" + mbps_label(spec.values[v]) + "]: cloud fraction slow..fast " +
                      detail);
    }

    // Scheme comparison.
    const auto cmp = run_scheme_comparison(spec, kFixedEpsilon, options.harness);
    write_file(dir / "scheme_comparison.csv", sweep_csv(cmp));
    for (std::size_t v = 0; v < spec.values.size(); ++v) {
        const auto& p1 = cmp.rows[3 * v];
        const auto& p2 = cmp.rows[3 * v + 1];
        const auto& p3 = cmp.rows[3 * v + 2];
        const bool ok = p3.objective <= p2.objective + 1e-9 && p2.objective <= p1.objective + 1e-9;
        check(ok, "scheme_order[D=" + mbps_label(spec.values[v]) + "]: p3 " + fmt("%.6f", p3.objective) +
                      " <= p2 " + fmt("%.6f", p2.objective) + " <= p1 " + fmt("%.6f", p1.objective));
    }

    if (options.plot_data) {
        write_file(dir / "dlambda_sweep.dat", sweep_plot_data(curves));
        write_file(dir / "scheme_comparison.dat", sweep_plot_data({cmp}));
    }

    std::string text;
    for (const auto& line : summary.checks) text += line + "\n";
    write_file(dir / "summary.txt", text);
    return summary;
}

}  // namespace elid
