#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace elid {

// Node identifiers are opaque integers taken from the topology file.
enum class NodeId : std::int32_t {};

constexpr std::int32_t to_int(NodeId id) { return static_cast<std::int32_t>(id); }
constexpr NodeId node(std::int32_t v) { return static_cast<NodeId>(v); }

enum class NodeRole { elid, router, mec, cloud };

std::string_view to_string(NodeRole role);
std::optional<NodeRole> parse_role(std::string_view text);

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

// An assignment or topology refers to things that do not exist.
class StructuralError : public Error {
public:
    using Error::Error;
};

struct ElidParams {
    double data_rate = 0.0;  // D_lambda, bytes/s
    double priority = 1.0;   // rho_lambda, lower is more important
};

// Routers carry memory 0 and throughput 0 (the "cannot process" sentinel).
struct ServerParams {
    double memory = 0.0;      // M_s, bytes
    double throughput = 0.0;  // omega_s, bytes/s
};

struct Node {
    NodeId id{};
    NodeRole role = NodeRole::router;
    std::variant<ElidParams, ServerParams> params;

    bool is_elid() const { return role == NodeRole::elid; }
    bool is_server() const { return role != NodeRole::elid; }
    const ElidParams& elid() const { return std::get<ElidParams>(params); }
    const ServerParams& server() const { return std::get<ServerParams>(params); }
};

struct Link {
    NodeId i{};
    NodeId j{};
    double bandwidth = 0.0;  // R_ij, bytes/s, usable in both directions
};

/// Immutable backhaul network: nodes, fiber links and the downlink ratio beta.
///
/// Lookups tolerate malformed input (duplicate ids, dangling links) so that
/// validate_topology can report on it; the first occurrence of a duplicate wins.
class Topology {
public:
    Topology() = default;
    Topology(std::vector<Node> nodes, std::vector<Link> links, double beta);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    double beta() const { return beta_; }

    const Node* find(NodeId id) const;
    std::optional<std::size_t> index_of(NodeId id) const;
    const Link* link_between(NodeId a, NodeId b) const;

    std::vector<NodeId> elids() const;
    std::vector<NodeId> servers() const;  // every non-elid node, routers included
    std::optional<NodeId> cloud() const;

    // Copies with one parameter changed; used by the experiment sweeps.
    Topology with_uniform_data_rate(double rate) const;
    Topology with_throughput(NodeRole role, double throughput) const;
    Topology with_beta(double beta) const;

private:
    static std::uint64_t pair_key(NodeId a, NodeId b);

    std::vector<Node> nodes_;
    std::vector<Link> links_;
    double beta_ = 1.0;
    std::unordered_map<std::int32_t, std::size_t> node_index_;
    std::unordered_map<std::uint64_t, std::size_t> link_index_;
};

struct TopologyViolation {
    enum class Kind {
        no_elid,
        no_processing_node,
        duplicate_node,
        bad_elid_params,
        bad_server_params,
        unknown_endpoint,
        self_loop,
        duplicate_link,
        nonpositive_bandwidth,
        bad_beta,
        no_reachable_server,
    };
    Kind kind;
    std::string message;
};

std::vector<TopologyViolation> validate_topology(const Topology& topology);

// An ordered hop (i -> j) of one message.
struct Arc {
    NodeId from{};
    NodeId to{};
    auto operator<=>(const Arc&) const = default;
};

/// Decision variables of one ELiD: the u and delta edge sets and the servers
/// with c_s = 1. A valid route has exactly one processing server.
struct ElidRoute {
    NodeId elid{};
    std::vector<Arc> uplink;
    std::vector<Arc> downlink;
    std::vector<NodeId> processed_at;

    static ElidRoute from_paths(NodeId elid, const std::vector<NodeId>& uplink_path,
                                const std::vector<NodeId>& downlink_path);

    NodeId server() const;  // throws StructuralError unless exactly one server
};

struct Assignment {
    std::vector<ElidRoute> routes;
    // y_s as explicit variables; when absent they are derived from c.
    std::optional<std::map<NodeId, std::int64_t>> declared_jobs;

    const ElidRoute* route_of(NodeId elid) const;
};

// Node sequence of a chain of arcs starting at `start`; nullopt when the arcs
// do not form a single simple directed path.
std::optional<std::vector<NodeId>> arcs_to_path(const std::vector<Arc>& arcs, NodeId start);

enum class ConstraintFamily {
    flow_conservation = 1,
    uplink_downlink = 2,
    topology = 3,
    double_counting = 4,
    ram = 5,
    job_count = 6,
    processing = 7,
};

std::string_view to_string(ConstraintFamily family);

struct ConstraintViolation {
    ConstraintFamily family;
    std::optional<NodeId> elid;
    std::string message;
};

// Throws StructuralError for unknown nodes, routes for non-ELiD nodes,
// duplicate routes, or processing at a node outside the server set.
std::vector<ConstraintViolation> check_assignment(const Topology& topology,
                                                  const Assignment& assignment);

std::map<NodeId, std::int64_t> job_counts(const Assignment& assignment);

}  // namespace elid
