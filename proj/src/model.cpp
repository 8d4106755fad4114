#include "elid/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace elid {

namespace {

std::string id_str(NodeId id) { return std::to_string(to_int(id)); }

std::string arc_str(const Arc& a) { return "(" + id_str(a.from) + "->" + id_str(a.to) + ")"; }

}  // namespace

std::string_view to_string(NodeRole role) {
    switch (role) {
        case NodeRole::elid: return "elid";
        case NodeRole::router: return "router";
        case NodeRole::mec: return "mec";
        case NodeRole::cloud: return "cloud";
    }
    return "?";
}

std::optional<NodeRole> parse_role(std::string_view text) {
    if (text == "elid") return NodeRole::elid;
    if (text == "router") return NodeRole::router;
    if (text == "mec") return NodeRole::mec;
    if (text == "cloud") return NodeRole::cloud;
    return std::nullopt;
}

std::string_view to_string(ConstraintFamily family) {
    switch (family) {
        case ConstraintFamily::flow_conservation: return "flow-conservation";
        case ConstraintFamily::uplink_downlink: return "uplink-downlink-requirement";
        case ConstraintFamily::topology: return "topology-limitation";
        case ConstraintFamily::double_counting: return "double-counting";
        case ConstraintFamily::ram: return "server-ram";
        case ConstraintFamily::job_count: return "job-count";
        case ConstraintFamily::processing: return "processing-requirement";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Topology

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links, double beta)
    : nodes_(std::move(nodes)), links_(std::move(links)), beta_(beta) {
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        node_index_.try_emplace(to_int(nodes_[k].id), k);
    }
    for (std::size_t k = 0; k < links_.size(); ++k) {
        link_index_.try_emplace(pair_key(links_[k].i, links_[k].j), k);
    }
}

std::uint64_t Topology::pair_key(NodeId a, NodeId b) {
    auto lo = static_cast<std::uint32_t>(std::min(to_int(a), to_int(b)));
    auto hi = static_cast<std::uint32_t>(std::max(to_int(a), to_int(b)));
    return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

const Node* Topology::find(NodeId id) const {
    auto it = node_index_.find(to_int(id));
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

std::optional<std::size_t> Topology::index_of(NodeId id) const {
    auto it = node_index_.find(to_int(id));
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
}

const Link* Topology::link_between(NodeId a, NodeId b) const {
    if (a == b) return nullptr;
    auto it = link_index_.find(pair_key(a, b));
    return it == link_index_.end() ? nullptr : &links_[it->second];
}

std::vector<NodeId> Topology::elids() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
        if (n.is_elid()) out.push_back(n.id);
    }
    return out;
}

std::vector<NodeId> Topology::servers() const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
        if (n.is_server()) out.push_back(n.id);
    }
    return out;
}

std::optional<NodeId> Topology::cloud() const {
    for (const auto& n : nodes_) {
        if (n.role == NodeRole::cloud) return n.id;
    }
    return std::nullopt;
}

Topology Topology::with_uniform_data_rate(double rate) const {
    auto nodes = nodes_;
    for (auto& n : nodes) {
        if (n.is_elid()) std::get<ElidParams>(n.params).data_rate = rate;
    }
    return Topology(std::move(nodes), links_, beta_);
}

Topology Topology::with_throughput(NodeRole role, double throughput) const {
    auto nodes = nodes_;
    for (auto& n : nodes) {
        if (n.role == role && n.is_server()) std::get<ServerParams>(n.params).throughput = throughput;
    }
    return Topology(std::move(nodes), links_, beta_);
}

Topology Topology::with_beta(double beta) const { return Topology(nodes_, links_, beta); }

// ---------------------------------------------------------------------------
// validate_topology

std::vector<TopologyViolation> validate_topology(const Topology& topology) {
    using Kind = TopologyViolation::Kind;
    std::vector<TopologyViolation> out;
    auto add = [&out](Kind kind, std::string msg) { out.push_back({kind, std::move(msg)}); };

    bool has_elid = false;
    bool has_processor = false;
    std::set<std::int32_t> seen;
    for (const auto& n : topology.nodes()) {
        if (!seen.insert(to_int(n.id)).second) {
            add(Kind::duplicate_node, "node " + id_str(n.id) + ": duplicate id");
        }
        if (n.is_elid()) {
            has_elid = true;
            const auto& p = n.elid();
            if (!(p.data_rate > 0.0)) {
                add(Kind::bad_elid_params, "elid " + id_str(n.id) + ": data rate must be positive");
            }
            if (!(p.priority > 0.0)) {
                add(Kind::bad_elid_params, "elid " + id_str(n.id) + ": priority must be positive");
            }
            continue;
        }
        const auto& s = n.server();
        if (n.role == NodeRole::router) {
            if (s.memory != 0.0) {
                add(Kind::bad_server_params, "router " + id_str(n.id) + ": routers must have zero RAM");
            }
            continue;
        }
        has_processor = true;
        if (!(s.memory >= 0.0)) {
            add(Kind::bad_server_params, "server " + id_str(n.id) + ": RAM must be nonnegative");
        }
        if (!(s.throughput > 0.0)) {
            add(Kind::bad_server_params, "server " + id_str(n.id) + ": throughput must be positive");
        }
    }
    if (!has_elid) add(Kind::no_elid, "topology has no elid node");
    if (!has_processor) add(Kind::no_processing_node, "topology has no mec or cloud node");

    std::set<std::pair<std::int32_t, std::int32_t>> pairs;
    for (std::size_t k = 0; k < topology.links().size(); ++k) {
        const auto& l = topology.links()[k];
        std::string where = "link " + std::to_string(k) + " (" + id_str(l.i) + "," + id_str(l.j) + ")";
        if (!topology.find(l.i) || !topology.find(l.j)) {
            add(Kind::unknown_endpoint, where + ": unknown endpoint");
        }
        if (l.i == l.j) add(Kind::self_loop, where + ": self-loop");
        const std::pair<std::int32_t, std::int32_t> key = std::minmax({to_int(l.i), to_int(l.j)});
        if (!pairs.insert(key).second) add(Kind::duplicate_link, where + ": duplicate pair");
        if (!(l.bandwidth > 0.0)) add(Kind::nonpositive_bandwidth, where + ": nonpositive bandwidth");
    }

    if (!(topology.beta() > 0.0 && topology.beta() <= 1.0)) {
        add(Kind::bad_beta, "beta must lie in (0, 1]");
    }

    // Reachability: ELiDs never relay, so search only through server nodes.
    std::unordered_map<std::int32_t, std::vector<NodeId>> adj;
    for (const auto& l : topology.links()) {
        if (!(l.bandwidth > 0.0) || l.i == l.j) continue;
        adj[to_int(l.i)].push_back(l.j);
        adj[to_int(l.j)].push_back(l.i);
    }
    for (const auto& n : topology.nodes()) {
        if (!n.is_elid()) continue;
        const double need = n.elid().data_rate;
        std::set<std::int32_t> visited{to_int(n.id)};
        std::queue<NodeId> frontier;
        frontier.push(n.id);
        bool found = false;
        while (!frontier.empty() && !found) {
            NodeId cur = frontier.front();
            frontier.pop();
            for (NodeId next : adj[to_int(cur)]) {
                const Node* nn = topology.find(next);
                if (!nn || nn->is_elid() || !visited.insert(to_int(next)).second) continue;
                const auto& s = nn->server();
                if (nn->role != NodeRole::router && s.throughput > 0.0 && s.memory >= need) {
                    found = true;
                    break;
                }
                frontier.push(next);
            }
        }
        if (!found) {
            add(Kind::no_reachable_server,
                "elid " + id_str(n.id) + ": no reachable server with sufficient RAM");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Assignment helpers

ElidRoute ElidRoute::from_paths(NodeId elid, const std::vector<NodeId>& uplink_path,
                                const std::vector<NodeId>& downlink_path) {
    ElidRoute r;
    r.elid = elid;
    for (std::size_t k = 1; k < uplink_path.size(); ++k) {
        r.uplink.push_back({uplink_path[k - 1], uplink_path[k]});
    }
    for (std::size_t k = 1; k < downlink_path.size(); ++k) {
        r.downlink.push_back({downlink_path[k - 1], downlink_path[k]});
    }
    if (!uplink_path.empty()) r.processed_at.push_back(uplink_path.back());
    return r;
}

NodeId ElidRoute::server() const {
    if (processed_at.size() != 1) {
        throw StructuralError("elid " + id_str(elid) + " is processed at " +
                              std::to_string(processed_at.size()) + " servers");
    }
    return processed_at.front();
}

const ElidRoute* Assignment::route_of(NodeId elid) const {
    for (const auto& r : routes) {
        if (r.elid == elid) return &r;
    }
    return nullptr;
}

std::optional<std::vector<NodeId>> arcs_to_path(const std::vector<Arc>& arcs, NodeId start) {
    std::map<std::int32_t, NodeId> next;
    for (const auto& a : arcs) {
        if (!next.emplace(to_int(a.from), a.to).second) return std::nullopt;
    }
    std::vector<NodeId> path{start};
    std::set<std::int32_t> visited{to_int(start)};
    NodeId cur = start;
    while (true) {
        auto it = next.find(to_int(cur));
        if (it == next.end()) break;
        cur = it->second;
        if (!visited.insert(to_int(cur)).second) return std::nullopt;
        path.push_back(cur);
    }
    if (path.size() != arcs.size() + 1) return std::nullopt;
    return path;
}

std::map<NodeId, std::int64_t> job_counts(const Assignment& assignment) {
    std::map<NodeId, std::int64_t> y;
    for (const auto& r : assignment.routes) {
        for (NodeId s : r.processed_at) ++y[s];
    }
    return y;
}

// ---------------------------------------------------------------------------
// check_assignment

std::vector<ConstraintViolation> check_assignment(const Topology& topology,
                                                  const Assignment& assignment) {
    // Structural pass first: nothing below may meet an unknown id.
    std::set<std::int32_t> routed;
    auto require_node = [&](NodeId id, NodeId owner) -> const Node& {
        const Node* n = topology.find(id);
        if (!n) {
            throw StructuralError("route of elid " + id_str(owner) + " references unknown node " +
                                  id_str(id));
        }
        return *n;
    };
    for (const auto& r : assignment.routes) {
        const Node& owner = require_node(r.elid, r.elid);
        if (!owner.is_elid()) {
            throw StructuralError("route given for non-elid node " + id_str(r.elid));
        }
        if (!routed.insert(to_int(r.elid)).second) {
            throw StructuralError("duplicate route for elid " + id_str(r.elid));
        }
        for (const auto& a : r.uplink) {
            require_node(a.from, r.elid);
            require_node(a.to, r.elid);
        }
        for (const auto& a : r.downlink) {
            require_node(a.from, r.elid);
            require_node(a.to, r.elid);
        }
        for (NodeId s : r.processed_at) {
            if (!require_node(s, r.elid).is_server()) {
                throw StructuralError("elid " + id_str(r.elid) + " processed at non-server node " +
                                      id_str(s));
            }
        }
    }
    if (assignment.declared_jobs) {
        for (const auto& [s, count] : *assignment.declared_jobs) {
            const Node* n = topology.find(s);
            if (!n || !n->is_server()) {
                throw StructuralError("job count declared for non-server node " + id_str(s));
            }
        }
    }

    std::vector<ConstraintViolation> out;
    auto add = [&out](ConstraintFamily f, std::optional<NodeId> elid, std::string msg) {
        out.push_back({f, elid, std::move(msg)});
    };

    static const ElidRoute empty_route{};
    for (const auto& n : topology.nodes()) {
        if (!n.is_elid()) continue;
        const NodeId lambda = n.id;
        const ElidRoute* found = assignment.route_of(lambda);
        const ElidRoute& r = found ? *found : empty_route;
        const std::string who = "elid " + id_str(lambda);

        std::map<std::int32_t, int> up_in, up_out, down_in, down_out, c;
        for (const auto& a : r.uplink) {
            ++up_out[to_int(a.from)];
            ++up_in[to_int(a.to)];
        }
        for (const auto& a : r.downlink) {
            ++down_out[to_int(a.from)];
            ++down_in[to_int(a.to)];
        }
        for (NodeId s : r.processed_at) ++c[to_int(s)];

        // 1. Flow conservation at every server (routers included).
        for (const auto& s : topology.nodes()) {
            if (!s.is_server()) continue;
            const int k = to_int(s.id);
            if (up_in[k] != up_out[k] + c[k]) {
                add(ConstraintFamily::flow_conservation, lambda,
                    who + ": uplink flow not conserved at node " + id_str(s.id));
            }
            if (down_out[k] != down_in[k] + c[k]) {
                add(ConstraintFamily::flow_conservation, lambda,
                    who + ": downlink flow not conserved at node " + id_str(s.id));
            }
        }

        // 2. The ELiD emits one uplink, receives one downlink, and no ELiD relays.
        const int self = to_int(lambda);
        if (up_out[self] != 1 || up_in[self] != 0) {
            add(ConstraintFamily::uplink_downlink, lambda, who + ": must send exactly one uplink message");
        }
        if (down_in[self] != 1 || down_out[self] != 0) {
            add(ConstraintFamily::uplink_downlink, lambda,
                who + ": must receive exactly one downlink message");
        }
        for (const auto& other : topology.nodes()) {
            if (!other.is_elid() || other.id == lambda) continue;
            const int k = to_int(other.id);
            if ((up_in[k] > 0 && up_out[k] > 0) || (down_in[k] > 0 && down_out[k] > 0)) {
                add(ConstraintFamily::uplink_downlink, lambda,
                    who + ": elid " + id_str(other.id) + " acts as a router");
            }
        }

        // 3. Hops only over existing fiber.
        for (const auto* arcs : {&r.uplink, &r.downlink}) {
            for (const auto& a : *arcs) {
                if (!topology.link_between(a.from, a.to)) {
                    add(ConstraintFamily::topology, lambda, who + ": no link for hop " + arc_str(a));
                }
            }
        }

        // 4. One direction per link per direction class.
        for (const auto* arcs : {&r.uplink, &r.downlink}) {
            std::set<Arc> used(arcs->begin(), arcs->end());
            for (const auto& a : used) {
                if (to_int(a.from) < to_int(a.to) && used.count(Arc{a.to, a.from})) {
                    add(ConstraintFamily::double_counting, lambda,
                        who + (arcs == &r.uplink ? ": uplink" : ": downlink") +
                            " uses both directions of link (" + id_str(a.from) + "," + id_str(a.to) + ")");
                }
            }
            if (used.size() != arcs->size()) {
                add(ConstraintFamily::double_counting, lambda, who + ": repeated hop");
            }
        }

        // 7. Exactly one processing server.
        if (r.processed_at.size() != 1) {
            add(ConstraintFamily::processing, lambda,
                who + ": processed at " + std::to_string(r.processed_at.size()) + " servers");
        }
    }

    // 5. RAM.
    std::map<std::int32_t, double> load;
    for (const auto& r : assignment.routes) {
        const double rate = topology.find(r.elid)->elid().data_rate;
        for (NodeId s : r.processed_at) load[to_int(s)] += rate;
    }
    for (const auto& [s, bytes] : load) {
        const double cap = topology.find(node(s))->server().memory;
        if (bytes > cap) {
            std::ostringstream msg;
            msg << "server " << s << ": assigned " << bytes << " bytes exceeds RAM " << cap;
            add(ConstraintFamily::ram, std::nullopt, msg.str());
        }
    }

    // 6. Declared job counts must match the processing variables.
    if (assignment.declared_jobs) {
        auto y = job_counts(assignment);
        for (const auto& s : topology.nodes()) {
            if (!s.is_server()) continue;
            auto dit = assignment.declared_jobs->find(s.id);
            auto yit = y.find(s.id);
            const std::int64_t declared = dit == assignment.declared_jobs->end() ? 0 : dit->second;
            const std::int64_t actual = yit == y.end() ? 0 : yit->second;
            if (declared != actual) {
                add(ConstraintFamily::job_count, std::nullopt,
                    "server " + id_str(s.id) + ": declared " + std::to_string(declared) +
                        " jobs but " + std::to_string(actual) + " are assigned");
            }
        }
    }

    return out;
}

}  // namespace elid
