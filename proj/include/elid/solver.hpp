#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elid/latency.hpp"
#include "elid/model.hpp"

namespace elid {

enum class SolveStatus { optimal, feasible_heuristic, infeasible };

std::string_view to_string(SolveStatus status);

// Why an instance has no solution. family is empty when the binding limit is
// the fixed-channel supply rather than one of the seven constraint families.
struct InfeasibilityWitness {
    std::optional<ConstraintFamily> family;
    std::string message;
};

struct SolverStats {
    std::uint64_t nodes_explored = 0;  // oracle: assignments enumerated
    double elapsed_ms = 0.0;
    bool proven_optimal = false;
    std::vector<double> incumbent_history;  // objective after each improvement
};

struct SolveReport {
    SolveStatus status = SolveStatus::infeasible;
    SchemeConfig scheme;
    Assignment assignment;
    LatencyBreakdown latency;  // evaluate() of assignment
    double objective = 0.0;    // == latency.objective
    SolverStats stats;
    std::optional<InfeasibilityWitness> witness;
};

struct SolveBudget {
    std::uint64_t node_limit = 0;              // 0: unlimited
    std::chrono::milliseconds time_limit{0};   // 0: unlimited
    unsigned workers = 1;
    std::size_t hop_limit = 0;                 // 0: number of nodes
};

/// Branch-and-bound over (server, uplink path, downlink path) per ELiD.
///
/// Returns the minimum of (objective, encoding) over all assignments whose
/// paths are simple and respect the hop limit, where the encoding compares
/// server ids in ELiD order first and then path node sequences. Because ties
/// are broken on the encoding rather than on discovery order, the result does
/// not depend on the worker count.
SolveReport solve_exact(const Topology& topology, const SchemeConfig& scheme,
                        const SolveBudget& budget = {});

// Enumeration guard rails.
inline constexpr std::size_t kOracleMaxNodes = 12;
inline constexpr std::size_t kOracleMaxElids = 5;
inline constexpr double kOracleMaxAssignments = 5e7;

class OracleRefusal : public Error {
public:
    using Error::Error;
};

// Exhaustive enumeration; throws OracleRefusal above the guard rails.
SolveReport solve_oracle(const Topology& topology, const SchemeConfig& scheme,
                         std::size_t hop_limit = 0);

// Greedy construction in priority order followed by first-improvement local
// search (server move, reroute, server swap). The seed only permutes the
// order in which ELiDs are scanned.
SolveReport solve_heuristic(const Topology& topology, const SchemeConfig& scheme,
                            std::uint64_t seed, std::size_t hop_limit = 0);

// A partly fixed decision for one ELiD; omitted fields are free.
struct PartialDecision {
    NodeId elid{};
    std::optional<NodeId> server;
    std::optional<std::vector<NodeId>> uplink;    // elid ... server
    std::optional<std::vector<NodeId>> downlink;  // server ... elid
};

// The bound the branch-and-bound uses at a search node. Returns +inf when
// the partial decisions already violate RAM or fixed-channel limits.
double partial_lower_bound(const Topology& topology, const SchemeConfig& scheme,
                           const std::vector<PartialDecision>& decisions,
                           std::size_t hop_limit = 0);

// Every simple path from the ELiD to the server that relays only through
// non-ELiD nodes and has at most hop_limit hops (0: number of nodes).
std::vector<std::vector<NodeId>> candidate_paths(const Topology& topology, NodeId elid,
                                                 NodeId server, std::size_t hop_limit = 0);

}  // namespace elid
