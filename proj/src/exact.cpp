#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <thread>

#include "problem.hpp"

namespace elid {

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible_heuristic: return "feasible_heuristic";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "?";
}

namespace {

using detail::Decision;
using detail::Key;
using detail::kInf;
using detail::kTolerance;
using detail::Problem;
using detail::State;
using Clock = std::chrono::steady_clock;

// Incumbent and budget shared by all workers.
struct Shared {
    explicit Shared(const Problem& p) : problem(p) {}

    const Problem& problem;
    std::atomic<double> best_objective{kInf};
    std::atomic<std::uint64_t> nodes{0};
    std::atomic<bool> stop{false};
    std::uint64_t node_limit = 0;
    std::optional<Clock::time_point> deadline;

    std::mutex mu;
    bool has_incumbent = false;
    Key best_key;
    std::vector<Decision> best_decisions;
    std::vector<double> history;

    double bound_cutoff() const { return best_objective.load(std::memory_order_relaxed) + kTolerance; }

    void offer(const State& st) {
        const double obj = problem.objective(st);
        if (obj > best_objective.load(std::memory_order_relaxed)) return;
        Key key = problem.key(st);
        std::lock_guard lock(mu);
        const double best = best_objective.load(std::memory_order_relaxed);
        if (has_incumbent && (obj > best || (obj == best && !(key < best_key)))) return;
        has_incumbent = true;
        best_key = std::move(key);
        best_decisions.clear();
        for (int e = 0; e < problem.elid_count(); ++e) best_decisions.push_back(st.decision(e));
        best_objective.store(obj, std::memory_order_relaxed);
        history.push_back(obj);
    }
};

struct Child {
    double bound;
    int index;
};

class Searcher {
public:
    Searcher(Shared& shared, const std::vector<int>& order)
        : shared_(shared), problem_(shared.problem), order_(order), st_(shared.problem) {}

    State& state() { return st_; }

    void dfs(std::size_t depth) {
        if (depth == order_.size()) {
            shared_.offer(st_);
            return;
        }
        const int e = order_[depth];
        std::vector<Child> children;
        const int n = static_cast<int>(problem_.options(e).size());
        for (int k = 0; k < n; ++k) {
            if (!st_.apply_server(e, k)) continue;
            children.push_back({problem_.lower_bound(st_), k});
            st_.undo_server(e);
        }
        for (const Child& c : sorted(children)) {
            if (!tick() || c.bound > shared_.bound_cutoff()) break;
            st_.apply_server(e, c.index);
            branch_up(depth);
            st_.undo_server(e);
        }
    }

    // Expands one level below a committed server: uplink paths.
    void branch_up(std::size_t depth) {
        const int e = order_[depth];
        const auto& paths = problem_.options(e)[st_.decision(e).option].paths;
        std::vector<Child> children;
        for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
            if (!st_.apply_up(e, p)) continue;
            children.push_back({problem_.lower_bound(st_), p});
            st_.undo_up(e);
        }
        for (const Child& c : sorted(children)) {
            if (!tick() || c.bound > shared_.bound_cutoff()) break;
            st_.apply_up(e, c.index);
            branch_down(depth);
            st_.undo_up(e);
        }
    }

    void branch_down(std::size_t depth) {
        const int e = order_[depth];
        const auto& paths = problem_.options(e)[st_.decision(e).option].paths;
        std::vector<Child> children;
        for (int p = 0; p < static_cast<int>(paths.size()); ++p) {
            if (!st_.apply_down(e, p)) continue;
            children.push_back({problem_.lower_bound(st_), p});
            st_.undo_down(e);
        }
        for (const Child& c : sorted(children)) {
            if (!tick() || c.bound > shared_.bound_cutoff()) break;
            st_.apply_down(e, c.index);
            dfs(depth + 1);
            st_.undo_down(e);
        }
    }

    bool tick() {
        if (shared_.stop.load(std::memory_order_relaxed)) return false;
        const auto n = shared_.nodes.fetch_add(1, std::memory_order_relaxed) + 1;
        if ((shared_.node_limit && n > shared_.node_limit) ||
            (shared_.deadline && Clock::now() > *shared_.deadline)) {
            shared_.stop.store(true);
            return false;
        }
        return true;
    }

private:
    static std::vector<Child>& sorted(std::vector<Child>& children) {
        std::stable_sort(children.begin(), children.end(),
                         [](const Child& a, const Child& b) { return a.bound < b.bound; });
        return children;
    }

    Shared& shared_;
    const Problem& problem_;
    const std::vector<int>& order_;
    State st_;
};

}  // namespace

SolveReport solve_exact(const Topology& topology, const SchemeConfig& scheme, const SolveBudget& budget) {
    const auto start = Clock::now();
    if (auto witness = detail::screen_topology(topology)) {
        return detail::infeasible_report(scheme, std::move(*witness));
    }
    const Problem problem(topology, scheme, budget.hop_limit);
    if (auto witness = detail::screen_problem(problem)) {
        return detail::infeasible_report(scheme, std::move(*witness));
    }

    Shared shared(problem);
    shared.node_limit = budget.node_limit;
    if (budget.time_limit.count() > 0) shared.deadline = start + budget.time_limit;

    // Seed the incumbent so pruning bites from the first node.
    {
        State seed_state(problem);
        if (detail::run_heuristic(problem, 0, seed_state)) shared.offer(seed_state);
    }

    // Heavier weights first: their decisions move the bound most.
    std::vector<int> order(problem.elid_count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return problem.elids()[a].priority > problem.elids()[b].priority;
    });

    if (order.empty()) {
        State empty(problem);
        shared.offer(empty);
    } else {
        // Root tasks: every complete decision of the first ELiD.
        struct Task {
            double bound;
            Decision decision;
        };
        std::vector<Task> tasks;
        {
            State st(problem);
            const int e = order.front();
            for (int k = 0; k < static_cast<int>(problem.options(e).size()); ++k) {
                if (!st.apply_server(e, k)) continue;
                const int paths = static_cast<int>(problem.options(e)[k].paths.size());
                for (int u = 0; u < paths; ++u) {
                    if (!st.apply_up(e, u)) continue;
                    for (int d = 0; d < paths; ++d) {
                        if (!st.apply_down(e, d)) continue;
                        tasks.push_back({problem.lower_bound(st), st.decision(e)});
                        st.undo_down(e);
                    }
                    st.undo_up(e);
                }
                st.undo_server(e);
            }
        }
        std::stable_sort(tasks.begin(), tasks.end(),
                         [](const Task& a, const Task& b) { return a.bound < b.bound; });

        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            Searcher searcher(shared, order);
            while (true) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= tasks.size()) break;
                const Task& task = tasks[idx];
                if (!searcher.tick()) break;
                if (task.bound > shared.bound_cutoff()) continue;
                searcher.state().restore(order.front(), task.decision);
                searcher.dfs(1);
                searcher.state().clear(order.front());
            }
        };
        const unsigned workers = std::max(1u, budget.workers);
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
    }

    const bool complete = !shared.stop.load();
    SolveReport report;
    if (!shared.has_incumbent) {
        const bool fixed = scheme.variant == SchemeConfig::Variant::fixed;
        InfeasibilityWitness witness;
        if (!complete) {
            witness.message = "search budget exhausted before any feasible assignment was found";
        } else if (fixed) {
            witness.message = "no assignment fits both server RAM and the fixed channel supply";
        } else {
            witness = {ConstraintFamily::ram, "no split of elids over servers satisfies RAM"};
        }
        report = detail::infeasible_report(scheme, std::move(witness));
    } else {
        State best(problem);
        for (int e = 0; e < problem.elid_count(); ++e) best.restore(e, shared.best_decisions[e]);
        report = detail::make_report(problem, best,
                                     complete ? SolveStatus::optimal : SolveStatus::feasible_heuristic);
        report.stats.proven_optimal = complete;
    }
    report.stats.nodes_explored = shared.nodes.load();
    report.stats.incumbent_history = shared.history;
    report.stats.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return report;
}

}  // namespace elid
