#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "elid/model.hpp"
#include "elid/topology_io.hpp"

namespace elid::test {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(ELID_FIXTURE_DIR) / name;
}

inline Node make_elid(int id, double rate, double rho = 1.0) {
    return Node{node(id), NodeRole::elid, ElidParams{rate, rho}};
}

inline Node make_server(int id, NodeRole role, double memory = 0.0, double omega = 0.0) {
    return Node{node(id), role, ServerParams{memory, omega}};
}

inline Link make_link(int i, int j, double r) { return Link{node(i), node(j), r}; }

// One ELiD wired straight to one MEC: 100 MB scans, beta 0.8, 1 GB/s fiber,
// 250 MB/s processing.
inline Topology single_link_instance() {
    return Topology({make_elid(0, 1e8), make_server(1, NodeRole::mec, 1e9, 2.5e8)},
                    {make_link(0, 1, 1e9)}, 0.8);
}

// ELiDs 0 and 1, router 2, MEC 3 (room for one scan), cloud 4.
inline Topology constraint_topology() {
    return Topology({make_elid(0, 1e8), make_elid(1, 1e8), make_server(2, NodeRole::router),
                     make_server(3, NodeRole::mec, 1.5e8, 2.5e8),
                     make_server(4, NodeRole::cloud, 2.56e11, 5.5e10)},
                    {make_link(0, 2, 1e9), make_link(1, 2, 1e9), make_link(2, 3, 5e9),
                     make_link(2, 4, 1e10), make_link(3, 4, 5e9), make_link(0, 1, 1e9)},
                    0.8);
}

inline Assignment constraint_base() {
    Assignment a;
    a.routes.push_back(ElidRoute::from_paths(node(0), {node(0), node(2), node(3)}, {node(3), node(2), node(0)}));
    a.routes.push_back(ElidRoute::from_paths(node(1), {node(1), node(2), node(4)}, {node(4), node(2), node(1)}));
    return a;
}

// Small random backhaul. Servers are connected by a random spanning tree plus
// a few chords; every ELiD hangs off one or two servers.
inline Topology random_instance(std::mt19937_64& rng) {
    auto pick = [&rng](const std::vector<double>& v) {
        return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
    };
    auto roll = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto chance = [&rng](double p) { return std::bernoulli_distribution(p)(rng); };

    const int n_elid = roll(1, 4);
    const int n_router = roll(0, 2);
    const int n_mec = roll(1, 2);
    const bool with_cloud = chance(0.8);

    std::vector<Node> nodes;
    int next = 0;
    for (int k = 0; k < n_elid; ++k) {
        nodes.push_back(make_elid(next++, pick({0.5e8, 1e8, 2e8}), static_cast<double>(roll(1, 5))));
    }
    std::vector<int> servers;
    for (int k = 0; k < n_router; ++k) {
        servers.push_back(next);
        nodes.push_back(make_server(next++, NodeRole::router));
    }
    for (int k = 0; k < n_mec; ++k) {
        servers.push_back(next);
        nodes.push_back(make_server(next++, NodeRole::mec, pick({1e8, 2e8, 4e8, 1e9}),
                                    pick({5e7, 2.5e8, 1e9})));
    }
    if (with_cloud) {
        servers.push_back(next);
        nodes.push_back(make_server(next++, NodeRole::cloud, 2.56e11, 5.5e10));
    }

    const std::vector<double> rates{1e9, 2e9, 5e9, 1e10};
    std::vector<Link> links;
    std::vector<std::vector<bool>> linked(next, std::vector<bool>(next, false));
    auto connect = [&](int a, int b) {
        if (a == b || linked[a][b]) return;
        linked[a][b] = linked[b][a] = true;
        links.push_back(make_link(a, b, pick(rates)));
    };
    std::shuffle(servers.begin(), servers.end(), rng);
    for (std::size_t k = 1; k < servers.size(); ++k) {
        connect(servers[k], servers[static_cast<std::size_t>(roll(0, static_cast<int>(k) - 1))]);
    }
    for (std::size_t a = 0; a < servers.size(); ++a) {
        for (std::size_t b = a + 1; b < servers.size(); ++b) {
            if (chance(0.2)) connect(servers[a], servers[b]);
        }
    }
    const int last = static_cast<int>(servers.size()) - 1;
    for (int e = 0; e < n_elid; ++e) {
        connect(e, servers[static_cast<std::size_t>(roll(0, last))]);
        if (chance(0.3)) connect(e, servers[static_cast<std::size_t>(roll(0, last))]);
    }
    return Topology(std::move(nodes), std::move(links), pick({0.5, 0.8, 1.0}));
}

}  // namespace elid::test
