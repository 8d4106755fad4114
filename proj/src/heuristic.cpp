#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>

#include "problem.hpp"

namespace elid {

namespace detail {

namespace {

// Places ELiD e (currently cleared) at the option that minimises its own
// latency, each path chosen greedily under the current loads. When `only` is
// set, that option is the sole candidate.
bool place_best(const Problem& problem, State& st, int e, int only = -1) {
    Decision best;
    double best_latency = kInf;
    const auto& options = problem.options(e);
    for (int k = 0; k < static_cast<int>(options.size()); ++k) {
        if (only >= 0 && k != only) continue;
        if (!st.apply_server(e, k)) continue;
        const auto& paths = options[k].paths;

        int up = -1;
        double up_cost = kInf;
        for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
            const double c = problem.uplink_cost_added(st, e, paths[p]);
            if (c < up_cost) {
                up_cost = c;
                up = p;
            }
        }
        if (up < 0 || !st.apply_up(e, up)) {
            st.clear(e);
            continue;
        }
        int down = -1;
        double down_cost = kInf;
        for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
            const double c = problem.downlink_cost_added(st, e, paths[p]);
            if (c < down_cost) {
                down_cost = c;
                down = p;
            }
        }
        if (down < 0 || !st.apply_down(e, down)) {
            st.clear(e);
            continue;
        }
        const double latency = problem.elid_latency(st, e);
        if (latency < best_latency) {
            best_latency = latency;
            best = st.decision(e);
        }
        st.clear(e);
    }
    if (best.option < 0) return false;
    return st.restore(e, best);
}

int option_for_server(const Problem& problem, int e, int server) {
    const auto& options = problem.options(e);
    for (int k = 0; k < static_cast<int>(options.size()); ++k) {
        if (options[k].server == server) return k;
    }
    return -1;
}

}  // namespace

bool run_heuristic(const Problem& problem, std::uint64_t seed, State& st, std::uint64_t* evaluations) {
    const int count = problem.elid_count();
    std::uint64_t evals = 0;

    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return problem.elids()[a].priority < problem.elids()[b].priority;
    });
    for (int e : order) {
        if (!place_best(problem, st, e)) return false;
    }

    double current = problem.objective(st);
    ++evals;
    std::mt19937_64 rng(seed);
    std::vector<int> scan(count);
    std::iota(scan.begin(), scan.end(), 0);

    // Evaluates the modified state; keeps it if it improves, else returns false
    // and leaves rollback to the caller.
    auto accept = [&]() {
        const double candidate = problem.objective(st);
        ++evals;
        if (candidate < current - kTolerance) {
            current = candidate;
            return true;
        }
        return false;
    };

    bool improved = true;
    while (improved) {
        improved = false;
        std::shuffle(scan.begin(), scan.end(), rng);

        // Server move.
        for (int e : scan) {
            const Decision old = st.decision(e);
            for (int k = 0; k < static_cast<int>(problem.options(e).size()) && !improved; ++k) {
                if (k == old.option) continue;
                st.clear(e);
                if (place_best(problem, st, e, k) && accept()) {
                    improved = true;
                } else {
                    st.restore(e, old);
                }
            }
            if (improved) break;
        }
        if (improved) continue;

        // Reroute one path.
        for (int e : scan) {
            const Decision old = st.decision(e);
            const int paths = static_cast<int>(problem.options(e)[old.option].paths.size());
            for (int p = 0; p < paths && !improved; ++p) {
                if (p != old.up) {
                    st.undo_up(e);
                    if (st.apply_up(e, p) && accept()) {
                        improved = true;
                        break;
                    }
                    st.restore(e, old);
                }
                if (p != old.down) {
                    st.undo_down(e);
                    if (st.apply_down(e, p) && accept()) {
                        improved = true;
                        break;
                    }
                    st.restore(e, old);
                }
            }
            if (improved) break;
        }
        if (improved) continue;

        // Swap the servers of two ELiDs.
        for (std::size_t a = 0; a < scan.size() && !improved; ++a) {
            for (std::size_t b = a + 1; b < scan.size() && !improved; ++b) {
                const int i = scan[a];
                const int j = scan[b];
                const Decision di = st.decision(i);
                const Decision dj = st.decision(j);
                const int si = problem.options(i)[di.option].server;
                const int sj = problem.options(j)[dj.option].server;
                if (si == sj) continue;
                const int ki = option_for_server(problem, i, sj);
                const int kj = option_for_server(problem, j, si);
                if (ki < 0 || kj < 0) continue;
                st.clear(i);
                st.clear(j);
                if (place_best(problem, st, i, ki) && place_best(problem, st, j, kj) && accept()) {
                    improved = true;
                } else {
                    st.clear(i);
                    st.clear(j);
                    st.restore(i, di);
                    st.restore(j, dj);
                }
            }
        }
    }
    if (evaluations) *evaluations = evals;
    return true;
}

}  // namespace detail

SolveReport solve_heuristic(const Topology& topology, const SchemeConfig& scheme, std::uint64_t seed,
                            std::size_t hop_limit) {
    const auto start = std::chrono::steady_clock::now();
    if (auto witness = detail::screen_topology(topology)) {
        return detail::infeasible_report(scheme, std::move(*witness));
    }
    const detail::Problem problem(topology, scheme, hop_limit);
    if (auto witness = detail::screen_problem(problem)) {
        return detail::infeasible_report(scheme, std::move(*witness));
    }
    detail::State st(problem);
    std::uint64_t evaluations = 0;
    if (!detail::run_heuristic(problem, seed, st, &evaluations)) {
        const bool fixed = scheme.variant == SchemeConfig::Variant::fixed;
        return detail::infeasible_report(
            scheme, {fixed ? std::nullopt : std::optional{ConstraintFamily::ram},
                     fixed ? "greedy construction found no route that fits the fixed channels"
                           : "greedy construction could not place every elid within server RAM"});
    }
    SolveReport report = detail::make_report(problem, st, SolveStatus::feasible_heuristic);
    report.stats.nodes_explored = evaluations;
    report.stats.incumbent_history.push_back(report.objective);
    report.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace elid
