#include "problem.hpp"

#include <algorithm>
#include <numeric>

#include "elid/scan.hpp"

namespace elid::detail {

// ---------------------------------------------------------------------------
// Problem

Problem::Problem(const Topology& topology, const SchemeConfig& scheme, std::size_t hop_limit)
    : topology_(&topology), scheme_(scheme) {
    const auto& nodes = topology.nodes();
    const int n = static_cast<int>(nodes.size());
    if (hop_limit == 0) hop_limit = nodes.size();

    node_ids_.reserve(n);
    for (const auto& nd : nodes) {
        node_ids_.push_back(nd.id);
        is_elid_.push_back(nd.is_elid());
    }
    adjacency_.resize(n);
    for (const auto& l : topology.links()) {
        const int a = node_of(l.i);
        const int b = node_of(l.j);
        const int slot = static_cast<int>(bandwidth_.size());
        bandwidth_.push_back(l.bandwidth);
        adjacency_[a].emplace_back(b, slot);
        adjacency_[b].emplace_back(a, slot);
    }

    std::vector<int> server_slot(n, -1);
    for (int k = 0; k < n; ++k) {
        const Node& nd = nodes[k];
        if (nd.is_elid()) {
            const auto& p = nd.elid();
            elids_.push_back({k, nd.id, p.data_rate, downlink_size(p.data_rate, topology.beta()),
                              p.priority});
        } else if (nd.role != NodeRole::router && nd.server().throughput > 0.0) {
            server_slot[k] = static_cast<int>(servers_.size());
            servers_.push_back({k, nd.id, nd.server().memory, nd.server().throughput});
        }
    }

    // Depth-first enumeration of simple paths; ELiDs never relay.
    options_.resize(elids_.size());
    for (std::size_t e = 0; e < elids_.size(); ++e) {
        std::vector<std::vector<Path>> per_server(servers_.size());
        std::vector<bool> visited(n, false);
        Path cur;
        const int source = elids_[e].node;
        cur.nodes.push_back(source);
        visited[source] = true;

        auto dfs = [&](auto&& self, int at) -> void {
            if (cur.links.size() >= hop_limit) return;
            for (auto [next, link] : adjacency_[at]) {
                if (visited[next] || is_elid_[next]) continue;
                visited[next] = true;
                cur.nodes.push_back(next);
                cur.links.push_back(link);
                if (server_slot[next] >= 0) per_server[server_slot[next]].push_back(cur);
                self(self, next);
                cur.nodes.pop_back();
                cur.links.pop_back();
                visited[next] = false;
            }
        };
        dfs(dfs, source);

        for (std::size_t s = 0; s < servers_.size(); ++s) {
            auto& paths = per_server[s];
            if (paths.empty() || servers_[s].memory < elids_[e].rate) continue;
            for (auto& p : paths) {
                for (int v : p.nodes) p.ids.push_back(to_int(node_ids_[v]));
            }
            std::sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) {
                if (a.nodes.size() != b.nodes.size()) return a.nodes.size() < b.nodes.size();
                return a.ids < b.ids;
            });
            options_[e].push_back({static_cast<int>(s), std::move(paths)});
        }
    }
}

int Problem::node_of(NodeId id) const {
    auto idx = topology_->index_of(id);
    if (!idx) throw StructuralError("unknown node " + std::to_string(to_int(id)));
    return static_cast<int>(*idx);
}

double Problem::uplink_cost(const State& st, int e, const Path& path) const {
    double sum = 0.0;
    for (int link : path.links) {
        sum += hop_seconds(elids_[e].rate,
                           uplink_share(scheme_, st.up_count(link), st.down_count(link)),
                           bandwidth_[link]);
    }
    return sum;
}

double Problem::downlink_cost(const State& st, int e, const Path& path) const {
    double sum = 0.0;
    for (auto it = path.links.rbegin(); it != path.links.rend(); ++it) {
        sum += hop_seconds(elids_[e].down_bytes,
                           downlink_share(scheme_, st.up_count(*it), st.down_count(*it)),
                           bandwidth_[*it]);
    }
    return sum;
}

double Problem::uplink_cost_added(const State& st, int e, const Path& path) const {
    double sum = 0.0;
    for (int link : path.links) {
        const auto up = st.up_count(link) + 1;
        const auto down = st.down_count(link);
        if (scheme_.variant == SchemeConfig::Variant::fixed && !fixed_channels_fit(scheme_, up + down)) {
            return kInf;
        }
        sum += hop_seconds(elids_[e].rate, uplink_share(scheme_, up, down), bandwidth_[link]);
    }
    return sum;
}

double Problem::downlink_cost_added(const State& st, int e, const Path& path) const {
    double sum = 0.0;
    for (auto it = path.links.rbegin(); it != path.links.rend(); ++it) {
        const auto up = st.up_count(*it);
        const auto down = st.down_count(*it) + 1;
        if (scheme_.variant == SchemeConfig::Variant::fixed && !fixed_channels_fit(scheme_, up + down)) {
            return kInf;
        }
        sum += hop_seconds(elids_[e].down_bytes, downlink_share(scheme_, up, down), bandwidth_[*it]);
    }
    return sum;
}

double Problem::elid_latency(const State& st, int e) const {
    const Decision& d = st.decision(e);
    const Option& opt = options_[e][d.option];
    const ServerInfo& s = servers_[opt.server];
    const double up = uplink_cost(st, e, opt.paths[d.up]);
    const double down = downlink_cost(st, e, opt.paths[d.down]);
    const double proc = processing_seconds(st.jobs(opt.server), elids_[e].rate, s.throughput);
    return up + down + proc;
}

double Problem::objective(const State& st) const {
    double total = 0.0;
    for (int e = 0; e < elid_count(); ++e) total += elids_[e].priority * elid_latency(st, e);
    return total;
}

void Problem::relaxed_distances(const State& st, int e, bool uplink, std::vector<double>& dist) const {
    const int n = static_cast<int>(node_ids_.size());
    dist.assign(n, kInf);
    std::vector<bool> done(n, false);
    dist[elids_[e].node] = 0.0;
    const bool fixed = scheme_.variant == SchemeConfig::Variant::fixed;
    for (int round = 0; round < n; ++round) {
        int at = -1;
        for (int v = 0; v < n; ++v) {
            if (!done[v] && dist[v] < kInf && (at < 0 || dist[v] < dist[at])) at = v;
        }
        if (at < 0) break;
        done[at] = true;
        if (is_elid_[at] && at != elids_[e].node) continue;
        for (auto [next, link] : adjacency_[at]) {
            if (done[next] || is_elid_[next]) continue;
            auto up = st.up_count(link);
            auto down = st.down_count(link);
            (uplink ? up : down) += 1;
            if (fixed && !fixed_channels_fit(scheme_, up + down)) continue;
            const double w = uplink
                                 ? hop_seconds(elids_[e].rate, uplink_share(scheme_, up, down), bandwidth_[link])
                                 : hop_seconds(elids_[e].down_bytes, downlink_share(scheme_, up, down),
                                               bandwidth_[link]);
            dist[next] = std::min(dist[next], dist[at] + w);
        }
    }
}

double Problem::lower_bound(const State& st) const {
    double total = 0.0;
    std::vector<double> up_dist, down_dist;
    for (int e = 0; e < elid_count(); ++e) {
        const Decision& d = st.decision(e);
        const ElidInfo& info = elids_[e];
        if (d.option < 0) {
            relaxed_distances(st, e, true, up_dist);
            relaxed_distances(st, e, false, down_dist);
            double best = kInf;
            for (int k = 0; k < static_cast<int>(options_[e].size()); ++k) {
                if (!st.ram_fits(e, k)) continue;
                const int s = options_[e][k].server;
                const int v = servers_[s].node;
                const double val = up_dist[v] + down_dist[v] +
                                   processing_seconds(st.jobs(s) + 1, info.rate, servers_[s].throughput);
                best = std::min(best, val);
            }
            if (best == kInf) return kInf;
            total += info.priority * best;
            continue;
        }
        const Option& opt = options_[e][d.option];
        const int v = servers_[opt.server].node;
        double up, down;
        if (d.up >= 0) {
            up = uplink_cost(st, e, opt.paths[d.up]);
        } else {
            relaxed_distances(st, e, true, up_dist);
            up = up_dist[v];
        }
        if (d.down >= 0) {
            down = downlink_cost(st, e, opt.paths[d.down]);
        } else {
            relaxed_distances(st, e, false, down_dist);
            down = down_dist[v];
        }
        if (up == kInf || down == kInf) return kInf;
        total += info.priority *
                 (up + down + processing_seconds(st.jobs(opt.server), info.rate, servers_[opt.server].throughput));
    }
    return total;
}

Key Problem::key(const State& st) const {
    Key k;
    for (int e = 0; e < elid_count(); ++e) {
        const Decision& d = st.decision(e);
        const Option& opt = options_[e][d.option];
        k.servers.push_back(to_int(servers_[opt.server].id));
    }
    for (int e = 0; e < elid_count(); ++e) {
        const Decision& d = st.decision(e);
        const Option& opt = options_[e][d.option];
        k.paths.push_back(opt.paths[d.up].ids);
        auto down = opt.paths[d.down].ids;
        std::reverse(down.begin(), down.end());
        k.paths.push_back(std::move(down));
    }
    return k;
}

Assignment Problem::to_assignment(const State& st) const {
    Assignment a;
    for (int e = 0; e < elid_count(); ++e) {
        const Decision& d = st.decision(e);
        const Option& opt = options_[e][d.option];
        std::vector<NodeId> up, down;
        for (auto id : opt.paths[d.up].ids) up.push_back(node(id));
        for (auto id : opt.paths[d.down].ids) down.push_back(node(id));
        std::reverse(down.begin(), down.end());
        a.routes.push_back(ElidRoute::from_paths(elids_[e].id, up, down));
    }
    return a;
}

// ---------------------------------------------------------------------------
// State

State::State(const Problem& problem)
    : problem_(&problem),
      decisions_(problem.elid_count()),
      up_(problem.link_count(), 0),
      down_(problem.link_count(), 0),
      jobs_(problem.servers().size(), 0),
      ram_(problem.servers().size(), 0.0) {}

bool State::ram_fits(int e, int option) const {
    const int s = problem_->options_[e][option].server;
    return ram_[s] + problem_->elids_[e].rate <= problem_->servers_[s].memory;
}

bool State::path_fits(const Path& path) const {
    if (problem_->scheme_.variant != SchemeConfig::Variant::fixed) return true;
    for (int link : path.links) {
        if (!fixed_channels_fit(problem_->scheme_, up_[link] + down_[link] + 1)) return false;
    }
    return true;
}

bool State::apply_server(int e, int option) {
    if (!ram_fits(e, option)) return false;
    const int s = problem_->options_[e][option].server;
    decisions_[e].option = option;
    ++jobs_[s];
    ram_[s] += problem_->elids_[e].rate;
    return true;
}

bool State::apply_up(int e, int path) {
    const Path& p = problem_->options_[e][decisions_[e].option].paths[path];
    if (!path_fits(p)) return false;
    decisions_[e].up = path;
    for (int link : p.links) ++up_[link];
    return true;
}

bool State::apply_down(int e, int path) {
    const Path& p = problem_->options_[e][decisions_[e].option].paths[path];
    if (!path_fits(p)) return false;
    decisions_[e].down = path;
    for (int link : p.links) ++down_[link];
    return true;
}

void State::undo_server(int e) {
    const int s = problem_->options_[e][decisions_[e].option].server;
    --jobs_[s];
    ram_[s] -= problem_->elids_[e].rate;
    decisions_[e].option = -1;
}

void State::undo_up(int e) {
    const Path& p = problem_->options_[e][decisions_[e].option].paths[decisions_[e].up];
    for (int link : p.links) --up_[link];
    decisions_[e].up = -1;
}

void State::undo_down(int e) {
    const Path& p = problem_->options_[e][decisions_[e].option].paths[decisions_[e].down];
    for (int link : p.links) --down_[link];
    decisions_[e].down = -1;
}

void State::clear(int e) {
    if (decisions_[e].down >= 0) undo_down(e);
    if (decisions_[e].up >= 0) undo_up(e);
    if (decisions_[e].option >= 0) undo_server(e);
}

bool State::restore(int e, const Decision& d) {
    clear(e);
    if (d.option < 0) return true;
    if (!apply_server(e, d.option)) return false;
    if (d.up >= 0 && !apply_up(e, d.up)) {
        clear(e);
        return false;
    }
    if (d.down >= 0 && !apply_down(e, d.down)) {
        clear(e);
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Shared screening and reporting

std::optional<InfeasibilityWitness> screen_topology(const Topology& topology) {
    std::string fatal;
    std::optional<InfeasibilityWitness> witness;
    for (const auto& v : validate_topology(topology)) {
        using Kind = TopologyViolation::Kind;
        if (v.kind == Kind::no_elid || v.kind == Kind::no_processing_node) continue;
        if (v.kind == Kind::no_reachable_server) {
            if (!witness) witness = InfeasibilityWitness{ConstraintFamily::processing, v.message};
            continue;
        }
        fatal += (fatal.empty() ? "" : "; ") + v.message;
    }
    if (!fatal.empty()) throw StructuralError("invalid topology: " + fatal);
    return witness;
}

std::optional<InfeasibilityWitness> screen_problem(const Problem& problem) {
    double demand = 0.0;
    for (int e = 0; e < problem.elid_count(); ++e) {
        if (problem.options(e).empty()) {
            return InfeasibilityWitness{
                ConstraintFamily::processing,
                "elid " + std::to_string(to_int(problem.elids()[e].id)) +
                    ": no server with sufficient RAM within the hop limit"};
        }
        demand += problem.elids()[e].rate;
    }
    double supply = 0.0;
    for (const auto& s : problem.servers()) supply += s.memory;
    if (demand > supply) {
        return InfeasibilityWitness{ConstraintFamily::ram,
                                    "aggregate data rate exceeds total server RAM"};
    }
    return std::nullopt;
}

SolveReport make_report(const Problem& problem, const State& st, SolveStatus status) {
    SolveReport r;
    r.status = status;
    r.scheme = problem.scheme();
    r.assignment = problem.to_assignment(st);
    r.latency = evaluate(problem.topology(), r.assignment, problem.scheme());
    r.objective = r.latency.objective;
    return r;
}

SolveReport infeasible_report(const SchemeConfig& scheme, InfeasibilityWitness witness) {
    SolveReport r;
    r.status = SolveStatus::infeasible;
    r.scheme = scheme;
    r.witness = std::move(witness);
    return r;
}

}  // namespace elid::detail
