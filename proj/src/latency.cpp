#include "elid/latency.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include "elid/scan.hpp"

namespace elid {

SchemeConfig SchemeConfig::fixed(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
    SchemeConfig s;
    s.variant = Variant::fixed;
    s.epsilon = epsilon;
    return s;
}

SchemeConfig SchemeConfig::decoupled(double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
    SchemeConfig s;
    s.variant = Variant::decoupled;
    s.sigma = 1.0 / (1.0 + beta);
    return s;
}

SchemeConfig SchemeConfig::combined() { return SchemeConfig{}; }

std::string SchemeConfig::name() const {
    switch (variant) {
        case Variant::fixed: return "p1";
        case Variant::decoupled: return "p2";
        case Variant::combined: return "p3";
    }
    return "?";
}

namespace {

struct LinkLoad {
    std::int64_t up = 0;
    std::int64_t down = 0;
};

using LoadMap = std::map<std::size_t, LinkLoad>;

std::size_t link_slot(const Topology& topology, const Arc& arc) {
    const Link* l = topology.link_between(arc.from, arc.to);
    if (!l) {
        throw StructuralError("hop (" + std::to_string(to_int(arc.from)) + "->" +
                              std::to_string(to_int(arc.to)) + ") has no link");
    }
    return static_cast<std::size_t>(l - topology.links().data());
}

LoadMap count_loads(const Topology& topology, const Assignment& assignment) {
    LoadMap loads;
    for (const auto& r : assignment.routes) {
        for (const auto& a : r.uplink) ++loads[link_slot(topology, a)].up;
        for (const auto& a : r.downlink) ++loads[link_slot(topology, a)].down;
    }
    return loads;
}

void require_capacity(const Topology& topology, const LoadMap& loads, const SchemeConfig& scheme) {
    if (scheme.variant != SchemeConfig::Variant::fixed) return;
    for (const auto& [slot, load] : loads) {
        if (!fixed_channels_fit(scheme, load.up + load.down)) {
            const Link& l = topology.links()[slot];
            throw ChannelCapacityError("link (" + std::to_string(to_int(l.i)) + "," +
                                       std::to_string(to_int(l.j)) + ") carries " +
                                       std::to_string(load.up + load.down) +
                                       " messages but fixed channels of epsilon=" +
                                       std::to_string(scheme.epsilon) + " fit fewer");
        }
    }
}

}  // namespace

std::vector<LinkShare> link_shares(const Topology& topology, const Assignment& assignment,
                                   const SchemeConfig& scheme) {
    const auto loads = count_loads(topology, assignment);
    require_capacity(topology, loads, scheme);
    std::vector<LinkShare> out;
    for (const auto& [slot, load] : loads) {
        const Link& l = topology.links()[slot];
        LinkShare s{l.i, l.j, load.up, load.down, 0.0, 0.0};
        if (load.up > 0) s.uplink_share = uplink_share(scheme, load.up, load.down);
        if (load.down > 0) s.downlink_share = downlink_share(scheme, load.up, load.down);
        out.push_back(s);
    }
    return out;
}

double LatencyBreakdown::mean_latency() const {
    if (per_elid.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& e : per_elid) sum += e.total;
    return sum / static_cast<double>(per_elid.size());
}

LatencyBreakdown evaluate(const Topology& topology, const Assignment& assignment,
                          const SchemeConfig& scheme) {
    const auto loads = count_loads(topology, assignment);
    require_capacity(topology, loads, scheme);
    const auto jobs = job_counts(assignment);

    LatencyBreakdown out;
    for (NodeId lambda : topology.elids()) {
        const ElidRoute* route = assignment.route_of(lambda);
        if (!route) throw StructuralError("no route for elid " + std::to_string(to_int(lambda)));
        const ElidParams& p = topology.find(lambda)->elid();
        const double down_bytes = downlink_size(p.data_rate, topology.beta());

        ElidLatency e;
        e.elid = lambda;
        e.server = route->server();
        for (const auto& a : route->uplink) {
            const std::size_t slot = link_slot(topology, a);
            const LinkLoad& load = loads.at(slot);
            e.uplink += hop_seconds(p.data_rate, uplink_share(scheme, load.up, load.down),
                                    topology.links()[slot].bandwidth);
        }
        for (const auto& a : route->downlink) {
            const std::size_t slot = link_slot(topology, a);
            const LinkLoad& load = loads.at(slot);
            e.downlink += hop_seconds(down_bytes, downlink_share(scheme, load.up, load.down),
                                      topology.links()[slot].bandwidth);
        }
        const Node* server = topology.find(e.server);
        if (!server || !server->is_server() || !(server->server().throughput > 0.0)) {
            throw StructuralError("elid " + std::to_string(to_int(lambda)) +
                                  " is processed at a node that cannot process");
        }
        e.processing = processing_seconds(jobs.at(e.server), p.data_rate, server->server().throughput);
        e.total = e.uplink + e.downlink + e.processing;
        out.objective += p.priority * e.total;
        out.per_elid.push_back(e);
    }
    return out;
}

double cloud_fraction(const Topology& topology, const Assignment& assignment) {
    const auto cloud = topology.cloud();
    if (!cloud) throw StructuralError("topology has no cloud node");
    const auto elids = topology.elids();
    if (elids.empty()) return 0.0;
    std::size_t at_cloud = 0;
    for (NodeId lambda : elids) {
        const ElidRoute* r = assignment.route_of(lambda);
        if (r && r->processed_at.size() == 1 && r->processed_at.front() == *cloud) ++at_cloud;
    }
    return static_cast<double>(at_cloud) / static_cast<double>(elids.size());
}

double cloud_fraction_by_bytes(const Topology& topology, const Assignment& assignment) {
    const auto cloud = topology.cloud();
    if (!cloud) throw StructuralError("topology has no cloud node");
    double total = 0.0, at_cloud = 0.0;
    for (NodeId lambda : topology.elids()) {
        const double rate = topology.find(lambda)->elid().data_rate;
        total += rate;
        const ElidRoute* r = assignment.route_of(lambda);
        if (r && r->processed_at.size() == 1 && r->processed_at.front() == *cloud) at_cloud += rate;
    }
    return total > 0.0 ? at_cloud / total : 0.0;
}

std::string latency_csv(const LatencyBreakdown& breakdown) {
    std::ostringstream out;
    char buf[256];
    out << "elid_id,uplink_s,downlink_s,processing_s,total_s,server_id\n";
    for (const auto& e : breakdown.per_elid) {
        std::snprintf(buf, sizeof buf, "%d,%.12f,%.12f,%.12f,%.12f,%d\n", to_int(e.elid), e.uplink,
                      e.downlink, e.processing, e.total, to_int(e.server));
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "objective,,,,%.12f,\n", breakdown.objective);
    out << buf;
    return out.str();
}

}  // namespace elid
