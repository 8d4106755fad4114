#pragma once

// Index-based form of a topology shared by the exact search and the heuristic.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "elid/latency.hpp"
#include "elid/model.hpp"
#include "elid/solver.hpp"

namespace elid::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTolerance = 1e-9;

struct Path {
    std::vector<int> nodes;    // elid first, server last
    std::vector<int> links;    // links[k] joins nodes[k] and nodes[k+1]
    std::vector<std::int32_t> ids;
};

struct ElidInfo {
    int node = 0;
    NodeId id{};
    double rate = 0.0;
    double down_bytes = 0.0;
    double priority = 0.0;
};

struct ServerInfo {
    int node = 0;
    NodeId id{};
    double memory = 0.0;
    double throughput = 0.0;
};

// A server an ELiD may be processed at, with its candidate paths.
struct Option {
    int server = 0;  // index into Problem::servers
    std::vector<Path> paths;
};

struct Decision {
    int option = -1;
    int up = -1;
    int down = -1;
};

// Lexicographic encoding used to break objective ties.
struct Key {
    std::vector<std::int32_t> servers;
    std::vector<std::vector<std::int32_t>> paths;

    bool operator<(const Key& other) const {
        if (servers != other.servers) return servers < other.servers;
        return paths < other.paths;
    }
};

class Problem;

// Link loads, job counts and RAM use induced by a (partial) set of decisions.
class State {
public:
    explicit State(const Problem& problem);

    const Decision& decision(int e) const { return decisions_[e]; }
    std::int64_t up_count(int link) const { return up_[link]; }
    std::int64_t down_count(int link) const { return down_[link]; }
    std::int64_t jobs(int server) const { return jobs_[server]; }
    double ram_used(int server) const { return ram_[server]; }

    bool ram_fits(int e, int option) const;
    // Apply fails (and changes nothing) when RAM or fixed channels overflow.
    bool apply_server(int e, int option);
    bool apply_up(int e, int path);
    bool apply_down(int e, int path);
    void undo_server(int e);
    void undo_up(int e);
    void undo_down(int e);

    void clear(int e);
    bool restore(int e, const Decision& d);

private:
    bool path_fits(const Path& path) const;

    const Problem* problem_;
    std::vector<Decision> decisions_;
    std::vector<std::int64_t> up_;
    std::vector<std::int64_t> down_;
    std::vector<std::int64_t> jobs_;
    std::vector<double> ram_;
};

class Problem {
public:
    Problem(const Topology& topology, const SchemeConfig& scheme, std::size_t hop_limit);

    const Topology& topology() const { return *topology_; }
    const SchemeConfig& scheme() const { return scheme_; }
    int elid_count() const { return static_cast<int>(elids_.size()); }
    int link_count() const { return static_cast<int>(bandwidth_.size()); }
    const std::vector<ElidInfo>& elids() const { return elids_; }
    const std::vector<ServerInfo>& servers() const { return servers_; }
    const std::vector<Option>& options(int e) const { return options_[e]; }
    double bandwidth(int link) const { return bandwidth_[link]; }

    // Latency of an applied path under the current loads.
    double uplink_cost(const State& st, int e, const Path& path) const;
    double downlink_cost(const State& st, int e, const Path& path) const;
    // Same for a path not yet applied: each hop gains one more message.
    double uplink_cost_added(const State& st, int e, const Path& path) const;
    double downlink_cost_added(const State& st, int e, const Path& path) const;

    // Weighted objective of a complete state, summed exactly like evaluate().
    double objective(const State& st) const;
    double elid_latency(const State& st, int e) const;

    // Admissible bound on the objective of every completion of st.
    double lower_bound(const State& st) const;

    Key key(const State& st) const;
    Assignment to_assignment(const State& st) const;

    int node_of(NodeId id) const;

private:
    // Shortest uplink/downlink latency from ELiD e to every node assuming one
    // extra message per hop, ignoring the hop limit.
    void relaxed_distances(const State& st, int e, bool uplink, std::vector<double>& dist) const;

    const Topology* topology_;
    SchemeConfig scheme_;
    std::vector<NodeId> node_ids_;
    std::vector<bool> is_elid_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;  // (neighbor, link)
    std::vector<double> bandwidth_;
    std::vector<ElidInfo> elids_;
    std::vector<ServerInfo> servers_;
    std::vector<std::vector<Option>> options_;

    friend class State;
};

// Topology checks shared by the solvers. Returns a witness for instances that
// are infeasible outright and throws StructuralError for malformed input.
std::optional<InfeasibilityWitness> screen_topology(const Topology& topology);

std::optional<InfeasibilityWitness> screen_problem(const Problem& problem);

SolveReport make_report(const Problem& problem, const State& st, SolveStatus status);
SolveReport infeasible_report(const SchemeConfig& scheme, InfeasibilityWitness witness);

// Greedy plus local search over an existing problem; false if greedy failed.
bool run_heuristic(const Problem& problem, std::uint64_t seed, State& st,
                   std::uint64_t* evaluations = nullptr);

}  // namespace elid::detail
