#include "elid/report_io.hpp"

#include <json.hpp>

#include "elid/topology_io.hpp"

namespace elid {

using nlohmann::json;

namespace {

json path_json(const std::vector<Arc>& arcs, NodeId start) {
    json out = json::array();
    if (auto path = arcs_to_path(arcs, start)) {
        for (NodeId v : *path) out.push_back(to_int(v));
    }
    return out;
}

std::vector<NodeId> path_from_json(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ParseError(where + ": expected an array of node ids");
    std::vector<NodeId> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer()) throw ParseError(where + ": expected integer node ids");
        out.push_back(node(v.get<std::int32_t>()));
    }
    return out;
}

}  // namespace

std::string report_to_json(const Topology& topology, const SolveReport& report,
                           const ReportOptions& options) {
    json doc;
    doc["status"] = std::string(to_string(report.status));
    json scheme{{"name", report.scheme.name()}};
    if (report.scheme.variant == SchemeConfig::Variant::fixed) scheme["epsilon"] = report.scheme.epsilon;
    if (report.scheme.variant == SchemeConfig::Variant::decoupled) scheme["sigma"] = report.scheme.sigma;
    doc["scheme"] = scheme;

    if (report.status != SolveStatus::infeasible) {
        doc["objective_s"] = report.objective;
        doc["mean_latency_s"] = report.latency.mean_latency();
        if (topology.cloud()) doc["cloud_fraction"] = cloud_fraction(topology, report.assignment);
        json routes = json::array();
        for (const auto& r : report.assignment.routes) {
            json entry;
            entry["elid"] = to_int(r.elid);
            entry["server"] = to_int(r.server());
            entry["uplink"] = path_json(r.uplink, r.elid);
            entry["downlink"] = path_json(r.downlink, r.server());
            routes.push_back(std::move(entry));
        }
        doc["assignment"] = std::move(routes);
        doc["latency_csv"] = latency_csv(report.latency);
    }
    if (report.witness) {
        json w{{"message", report.witness->message}};
        if (report.witness->family) {
            w["constraint_family"] = static_cast<int>(*report.witness->family);
            w["constraint"] = std::string(to_string(*report.witness->family));
        }
        doc["witness"] = std::move(w);
    }
    if (options.include_statistics) {
        doc["statistics"] = {{"nodes_explored", report.stats.nodes_explored},
                             {"elapsed_ms", report.stats.elapsed_ms},
                             {"proven_optimal", report.stats.proven_optimal}};
    }
    return doc.dump(2) + "\n";
}

Assignment assignment_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("assignment document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("assignment") || !doc["assignment"].is_array()) {
        throw ParseError("assignment: expected an array");
    }
    Assignment a;
    const auto& routes = doc["assignment"];
    for (std::size_t k = 0; k < routes.size(); ++k) {
        const std::string where = "assignment[" + std::to_string(k) + "]";
        const auto& entry = routes[k];
        if (!entry.is_object() || !entry.contains("elid") || !entry["elid"].is_number_integer()) {
            throw ParseError(where + ": expected an object with an integer 'elid'");
        }
        ElidRoute r;
        r.elid = node(entry["elid"].get<std::int32_t>());
        const auto up = path_from_json(entry.value("uplink", json::array()), where + ".uplink");
        const auto down = path_from_json(entry.value("downlink", json::array()), where + ".downlink");
        for (std::size_t i = 1; i < up.size(); ++i) r.uplink.push_back({up[i - 1], up[i]});
        for (std::size_t i = 1; i < down.size(); ++i) r.downlink.push_back({down[i - 1], down[i]});
        if (entry.contains("server")) {
            if (!entry["server"].is_number_integer()) throw ParseError(where + ".server: expected an integer");
            r.processed_at.push_back(node(entry["server"].get<std::int32_t>()));
        }
        a.routes.push_back(std::move(r));
    }
    return a;
}

}  // namespace elid
