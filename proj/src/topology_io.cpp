#include "elid/topology_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "elid/scan.hpp"

namespace elid {

namespace {

using nlohmann::json;

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double number_field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
    if (!it->is_number()) throw ParseError(where + "." + key + ": expected a number");
    return it->get<double>();
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    return number_field(obj, key, where);
}

NodeId id_field(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
    if (!it->is_number_integer()) throw ParseError(where + "." + key + ": expected an integer id");
    return node(it->get<std::int32_t>());
}

Node parse_node(const json& obj, const std::string& where, int elid_ordinal) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    Node n;
    n.id = id_field(obj, "id", where);
    auto role_it = obj.find("role");
    if (role_it == obj.end() || !role_it->is_string()) {
        throw ParseError(where + ".role: expected a role string");
    }
    auto role = parse_role(role_it->get<std::string>());
    if (!role) {
        throw ParseError(where + ".role: unknown role '" + role_it->get<std::string>() + "'");
    }
    n.role = *role;

    if (n.role == NodeRole::elid) {
        ElidParams p;
        const bool has_rate = obj.contains("D_lambda");
        const bool has_depth = obj.contains("d");
        if (has_rate == has_depth) {
            throw ParseError(where + ": elid needs exactly one of 'D_lambda' or 'd'");
        }
        if (has_rate) {
            p.data_rate = number_field(obj, "D_lambda", where);
        } else {
            if (!obj["d"].is_number_integer()) throw ParseError(where + ".d: expected an integer");
            ScanProfile profile;
            profile.depth = obj["d"].get<int>();
            profile.scan_frequency = number_field(obj, "f_scan", where);
            profile.scan_volume = number_field(obj, "V_scan", where);
            profile.compression = optional_number(obj, "gamma", where).value_or(1.0);
            try {
                p.data_rate = static_cast<double>(data_rate(profile));
            } catch (const DomainError& e) {
                throw ParseError(where + ": " + e.what());
            }
        }
        p.priority = optional_number(obj, "rho", where).value_or(static_cast<double>(elid_ordinal));
        n.params = p;
    } else if (n.role == NodeRole::router) {
        if (obj.contains("M") || obj.contains("omega")) {
            throw ParseError(where + ": routers take no 'M' or 'omega'");
        }
        n.params = ServerParams{};
    } else {
        n.params = ServerParams{number_field(obj, "M", where), number_field(obj, "omega", where)};
    }
    return n;
}

}  // namespace

Topology parse_topology(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("syntax error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                         e.what());
    }
    if (!doc.is_object()) throw ParseError("document: expected an object");

    auto nodes_it = doc.find("nodes");
    if (nodes_it == doc.end() || !nodes_it->is_array()) throw ParseError("nodes: expected an array");
    auto links_it = doc.find("links");
    if (links_it == doc.end() || !links_it->is_array()) throw ParseError("links: expected an array");
    const double beta = number_field(doc, "beta", "document");

    std::vector<Node> nodes;
    int elid_ordinal = 0;
    for (std::size_t k = 0; k < nodes_it->size(); ++k) {
        const auto& obj = (*nodes_it)[k];
        const bool is_elid = obj.is_object() && obj.value("role", "") == "elid";
        if (is_elid) ++elid_ordinal;
        nodes.push_back(parse_node(obj, "nodes[" + std::to_string(k) + "]", elid_ordinal));
    }

    std::vector<Link> links;
    std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> first_seen;
    for (std::size_t k = 0; k < links_it->size(); ++k) {
        const std::string where = "links[" + std::to_string(k) + "]";
        const auto& obj = (*links_it)[k];
        if (!obj.is_object()) throw ParseError(where + ": expected an object");
        Link l{id_field(obj, "i", where), id_field(obj, "j", where), number_field(obj, "R", where)};
        const std::pair<std::int32_t, std::int32_t> key = std::minmax({to_int(l.i), to_int(l.j)});
        auto [it, fresh] = first_seen.emplace(key, k);
        if (!fresh) {
            throw ParseError(where + ": duplicate pair (" + std::to_string(key.first) + "," +
                             std::to_string(key.second) + "), first given at links[" +
                             std::to_string(it->second) + "]");
        }
        links.push_back(l);
    }
    return Topology(std::move(nodes), std::move(links), beta);
}

Topology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_topology(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string serialize_topology(const Topology& topology) {
    json doc;
    doc["beta"] = topology.beta();
    doc["nodes"] = json::array();
    for (const auto& n : topology.nodes()) {
        json obj{{"id", to_int(n.id)}, {"role", std::string(to_string(n.role))}};
        if (n.is_elid()) {
            obj["D_lambda"] = n.elid().data_rate;
            obj["rho"] = n.elid().priority;
        } else if (n.role != NodeRole::router) {
            obj["M"] = n.server().memory;
            obj["omega"] = n.server().throughput;
        }
        doc["nodes"].push_back(std::move(obj));
    }
    doc["links"] = json::array();
    for (const auto& l : topology.links()) {
        doc["links"].push_back({{"i", to_int(l.i)}, {"j", to_int(l.j)}, {"R", l.bandwidth}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace elid
