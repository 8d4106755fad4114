// Exhaustive reference solver. Deliberately shares nothing with the compiled
// search in problem.cpp: its own path enumeration, evaluation through
// evaluate(), and its own tie-break encoding.

#include <chrono>
#include <map>
#include <set>

#include "problem.hpp"

namespace elid {

namespace {

using NodePath = std::vector<NodeId>;

std::vector<NodePath> enumerate_paths(const Topology& topology, NodeId from, NodeId to,
                                      std::size_t hop_limit) {
    std::map<std::int32_t, std::vector<NodeId>> adj;
    for (const auto& l : topology.links()) {
        adj[to_int(l.i)].push_back(l.j);
        adj[to_int(l.j)].push_back(l.i);
    }
    std::vector<NodePath> out;
    NodePath cur{from};
    std::set<std::int32_t> on_path{to_int(from)};
    auto walk = [&](auto&& self, NodeId at) -> void {
        if (at == to) {
            out.push_back(cur);
            return;
        }
        if (cur.size() - 1 >= hop_limit) return;
        for (NodeId next : adj[to_int(at)]) {
            if (on_path.count(to_int(next)) || topology.find(next)->is_elid()) continue;
            on_path.insert(to_int(next));
            cur.push_back(next);
            self(self, next);
            cur.pop_back();
            on_path.erase(to_int(next));
        }
    };
    walk(walk, from);
    return out;
}

struct Choice {
    NodeId server;
    NodePath up;
    NodePath down;
};

using Encoding = std::pair<std::vector<std::int32_t>, std::vector<std::vector<std::int32_t>>>;

Encoding encode(const std::vector<const Choice*>& picks) {
    Encoding enc;
    for (const Choice* c : picks) enc.first.push_back(to_int(c->server));
    for (const Choice* c : picks) {
        std::vector<std::int32_t> up, down;
        for (NodeId v : c->up) up.push_back(to_int(v));
        for (NodeId v : c->down) down.push_back(to_int(v));
        enc.second.push_back(std::move(up));
        enc.second.push_back(std::move(down));
    }
    return enc;
}

}  // namespace

SolveReport solve_oracle(const Topology& topology, const SchemeConfig& scheme, std::size_t hop_limit) {
    const auto start = std::chrono::steady_clock::now();
    const auto elids = topology.elids();
    if (topology.nodes().size() > kOracleMaxNodes || elids.size() > kOracleMaxElids) {
        throw OracleRefusal("oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes and " +
                            std::to_string(kOracleMaxElids) + " elids");
    }
    if (auto witness = detail::screen_topology(topology)) {
        return detail::infeasible_report(scheme, std::move(*witness));
    }
    if (hop_limit == 0) hop_limit = topology.nodes().size();

    std::vector<std::vector<Choice>> choices(elids.size());
    double space = 1.0;
    for (std::size_t e = 0; e < elids.size(); ++e) {
        const double rate = topology.find(elids[e])->elid().data_rate;
        for (const auto& n : topology.nodes()) {
            if (n.role != NodeRole::mec && n.role != NodeRole::cloud) continue;
            if (!(n.server().throughput > 0.0) || n.server().memory < rate) continue;
            const auto paths = enumerate_paths(topology, elids[e], n.id, hop_limit);
            for (const auto& up : paths) {
                for (const auto& fwd : paths) {
                    choices[e].push_back({n.id, up, NodePath(fwd.rbegin(), fwd.rend())});
                }
            }
        }
        space *= static_cast<double>(choices[e].size());
    }
    if (space > kOracleMaxAssignments) {
        throw OracleRefusal("oracle enumeration space too large");
    }

    SolveReport best;
    best.scheme = scheme;
    bool found = false;
    Encoding best_encoding;
    std::uint64_t enumerated = 0;

    std::vector<const Choice*> picks(elids.size(), nullptr);
    std::map<std::int32_t, double> ram;
    auto recurse = [&](auto&& self, std::size_t e) -> void {
        if (e == elids.size()) {
            Assignment a;
            for (std::size_t k = 0; k < elids.size(); ++k) {
                a.routes.push_back(ElidRoute::from_paths(elids[k], picks[k]->up, picks[k]->down));
            }
            LatencyBreakdown lat;
            try {
                lat = evaluate(topology, a, scheme);
            } catch (const ChannelCapacityError&) {
                return;
            }
            ++enumerated;
            Encoding enc = encode(picks);
            if (!found || lat.objective < best.objective ||
                (lat.objective == best.objective && enc < best_encoding)) {
                found = true;
                best.assignment = std::move(a);
                best.latency = std::move(lat);
                best.objective = best.latency.objective;
                best.stats.incumbent_history.push_back(best.objective);
                best_encoding = std::move(enc);
            }
            return;
        }
        const double rate = topology.find(elids[e])->elid().data_rate;
        for (const Choice& c : choices[e]) {
            const double cap = topology.find(c.server)->server().memory;
            double& used = ram[to_int(c.server)];
            if (used + rate > cap) continue;
            used += rate;
            picks[e] = &c;
            self(self, e + 1);
            used -= rate;
        }
    };
    recurse(recurse, 0);

    if (!found) {
        const bool fixed = scheme.variant == SchemeConfig::Variant::fixed;
        return detail::infeasible_report(
            scheme, {fixed ? std::nullopt : std::optional{ConstraintFamily::ram},
                     fixed ? "no assignment fits both server RAM and the fixed channel supply"
                           : "no split of elids over servers satisfies RAM"});
    }
    best.status = SolveStatus::optimal;
    best.stats.proven_optimal = true;
    best.stats.nodes_explored = enumerated;
    best.stats.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return best;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<NodeId>> candidate_paths(const Topology& topology, NodeId elid, NodeId server,
                                                 std::size_t hop_limit) {
    const detail::Problem problem(topology, SchemeConfig::combined(), hop_limit);
    for (int e = 0; e < problem.elid_count(); ++e) {
        if (problem.elids()[e].id != elid) continue;
        for (const auto& opt : problem.options(e)) {
            if (problem.servers()[opt.server].id != server) continue;
            std::vector<std::vector<NodeId>> out;
            for (const auto& p : opt.paths) {
                std::vector<NodeId> ids;
                for (auto v : p.ids) ids.push_back(node(v));
                out.push_back(std::move(ids));
            }
            return out;
        }
        return {};
    }
    throw StructuralError("node " + std::to_string(to_int(elid)) + " is not an elid");
}

double partial_lower_bound(const Topology& topology, const SchemeConfig& scheme,
                           const std::vector<PartialDecision>& decisions, std::size_t hop_limit) {
    const detail::Problem problem(topology, scheme, hop_limit);
    detail::State st(problem);
    auto find_path = [](const detail::Option& opt, const std::vector<NodeId>& path) {
        std::vector<std::int32_t> ids;
        for (NodeId v : path) ids.push_back(to_int(v));
        for (int p = 0; p < static_cast<int>(opt.paths.size()); ++p) {
            if (opt.paths[p].ids == ids) return p;
        }
        throw StructuralError("path is not a candidate path of its elid");
    };
    for (const auto& d : decisions) {
        int e = 0;
        while (e < problem.elid_count() && problem.elids()[e].id != d.elid) ++e;
        if (e == problem.elid_count()) throw StructuralError("decision for unknown elid");
        std::optional<NodeId> server = d.server;
        if (!server && d.uplink && !d.uplink->empty()) server = d.uplink->back();
        if (!server && d.downlink && !d.downlink->empty()) server = d.downlink->front();
        if (!server) continue;
        int k = 0;
        const auto& options = problem.options(e);
        while (k < static_cast<int>(options.size()) && problem.servers()[options[k].server].id != *server) ++k;
        if (k == static_cast<int>(options.size())) throw StructuralError("server is not an option of the elid");
        if (!st.apply_server(e, k)) return detail::kInf;
        if (d.uplink && !st.apply_up(e, find_path(options[k], *d.uplink))) return detail::kInf;
        if (d.downlink) {
            std::vector<NodeId> fwd(d.downlink->rbegin(), d.downlink->rend());
            if (!st.apply_down(e, find_path(options[k], fwd))) return detail::kInf;
        }
    }
    return problem.lower_bound(st);
}

}  // namespace elid
