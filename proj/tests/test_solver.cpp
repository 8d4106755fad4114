#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "elid/solver.hpp"
#include "elid/topology_io.hpp"
#include "support.hpp"

using namespace elid;
using elid::test::make_elid;
using elid::test::make_link;
using elid::test::make_server;

namespace {

constexpr double kTol = 1e-9;

std::vector<SchemeConfig> all_schemes(const Topology& t, double epsilon = 0.1) {
    return {SchemeConfig::fixed(epsilon), SchemeConfig::decoupled(t.beta()), SchemeConfig::combined()};
}

struct Full {
    std::vector<PartialDecision> decisions;
    double objective;
};

// Every feasible complete assignment, by brute force over candidate paths.
std::vector<Full> all_feasible(const Topology& t, const SchemeConfig& s) {
    std::vector<Full> out;
    const auto elids = t.elids();
    std::vector<PartialDecision> chosen;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == elids.size()) {
            Assignment a;
            for (const auto& d : chosen) a.routes.push_back(ElidRoute::from_paths(d.elid, *d.uplink, *d.downlink));
            if (!check_assignment(t, a).empty()) return;
            try {
                out.push_back({chosen, evaluate(t, a, s).objective});
            } catch (const ChannelCapacityError&) {
            }
            return;
        }
        for (NodeId server : t.servers()) {
            const auto& p = t.find(server)->server();
            if (!(p.throughput > 0.0)) continue;
            const auto up = candidate_paths(t, elids[k], server);
            for (const auto& u : up) {
                for (const auto& d : up) {
                    std::vector<NodeId> down(d.rbegin(), d.rend());
                    chosen.push_back({elids[k], server, u, down});
                    rec(k + 1);
                    chosen.pop_back();
                }
            }
        }
    };
    rec(0);
    return out;
}

std::vector<std::vector<NodeId>> paths_of(const SolveReport& r) {
    std::vector<std::vector<NodeId>> out;
    for (const auto& route : r.assignment.routes) {
        out.push_back(*arcs_to_path(route.uplink, route.elid));
        out.push_back(*arcs_to_path(route.downlink, route.server()));
    }
    return out;
}

// Two ELiDs share a router; the MEC holds one scan and the cloud sits behind
// a slow link.
Topology ram_split() {
    return Topology({make_elid(0, 1e8, 1), make_elid(1, 1e8, 2), make_server(2, NodeRole::router),
                     make_server(3, NodeRole::mec, 1.5e8, 1e9), make_server(4, NodeRole::cloud, 2.56e11, 5.5e10)},
                    {make_link(0, 2, 1e9), make_link(1, 2, 1e9), make_link(2, 3, 1e10), make_link(2, 4, 1e8)}, 0.8);
}

}  // namespace

TEST_CASE("exact search matches enumeration on random instances") {
    std::mt19937_64 rng(99);
    int compared = 0;
    for (int k = 0; k < 25; ++k) {
        const auto t = test::random_instance(rng);
        for (const auto& s : all_schemes(t, 0.25)) {
            SolveReport oracle;
            try {
                oracle = solve_oracle(t, s);
            } catch (const OracleRefusal&) {
                continue;
            }
            const auto exact = solve_exact(t, s);
            CAPTURE(k);
            CAPTURE(s.name());
            REQUIRE(exact.status == oracle.status);
            if (exact.status != SolveStatus::optimal) continue;
            ++compared;
            CHECK(std::abs(exact.objective - oracle.objective) <= kTol);
            CHECK(check_assignment(t, exact.assignment).empty());
            CHECK(evaluate(t, exact.assignment, s).objective == exact.objective);
        }
    }
    CHECK(compared >= 40);
}

TEST_CASE("the search bound never exceeds a reachable objective") {
    std::mt19937_64 rng(5);
    std::vector<Topology> instances{load_topology(test::fixture("tiny.topo"))};
    while (instances.size() < 6) {
        auto t = test::random_instance(rng);
        if (t.elids().size() >= 2 && t.nodes().size() <= 7) instances.push_back(std::move(t));
    }
    for (const auto& t : instances) {
        for (const auto& s : all_schemes(t, 0.25)) {
            const auto fulls = all_feasible(t, s);
            for (const auto& f : fulls) {
                CHECK(partial_lower_bound(t, s, {}) <= f.objective + kTol);
                std::vector<PartialDecision> prefix;
                for (const auto& d : f.decisions) {
                    prefix.push_back({d.elid, d.server, std::nullopt, std::nullopt});
                    CHECK(partial_lower_bound(t, s, prefix) <= f.objective + kTol);
                    prefix.back().uplink = d.uplink;
                    CHECK(partial_lower_bound(t, s, prefix) <= f.objective + kTol);
                    prefix.back().downlink = d.downlink;
                    CHECK(partial_lower_bound(t, s, prefix) <= f.objective + kTol);
                }
                CHECK(partial_lower_bound(t, s, prefix) == doctest::Approx(f.objective).epsilon(1e-12));
            }
            if (!fulls.empty()) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& f : fulls) best = std::min(best, f.objective);
                const auto exact = solve_exact(t, s);
                REQUIRE(exact.status == SolveStatus::optimal);
                CHECK(std::abs(exact.objective - best) <= kTol);
            }
        }
    }
}

TEST_CASE("incumbents only improve") {
    for (const char* name : {"sparse.topo", "dense.topo"}) {
        const auto t = load_topology(test::fixture(name));
        for (const auto& s : all_schemes(t)) {
            const auto r = solve_exact(t, s);
            REQUIRE(r.status == SolveStatus::optimal);
            CHECK(r.stats.proven_optimal);
            REQUIRE_FALSE(r.stats.incumbent_history.empty());
            for (std::size_t k = 1; k < r.stats.incumbent_history.size(); ++k) {
                CHECK(r.stats.incumbent_history[k] < r.stats.incumbent_history[k - 1]);
            }
            CHECK(r.stats.incumbent_history.back() == doctest::Approx(r.objective).epsilon(1e-12));
        }
    }
}

TEST_CASE("the result does not depend on the worker count") {
    std::vector<Topology> instances{load_topology(test::fixture("dense.topo"))};
    std::mt19937_64 rng(17);
    for (int k = 0; k < 5; ++k) instances.push_back(test::random_instance(rng));
    for (const auto& t : instances) {
        for (const auto& s : all_schemes(t)) {
            const auto one = solve_exact(t, s, {0, {}, 1, 0});
            for (unsigned w : {2u, 4u}) {
                const auto many = solve_exact(t, s, {0, {}, w, 0});
                CHECK(many.status == one.status);
                CHECK(many.objective == one.objective);
                if (one.status == SolveStatus::optimal) CHECK(paths_of(many) == paths_of(one));
            }
        }
    }
}

TEST_CASE("the heuristic is feasible and never beats the optimum") {
    std::mt19937_64 rng(41);
    for (int k = 0; k < 20; ++k) {
        const auto t = test::random_instance(rng);
        for (const auto& s : all_schemes(t, 0.25)) {
            const auto exact = solve_exact(t, s);
            const auto h = solve_heuristic(t, s, 3);
            if (h.status == SolveStatus::infeasible) continue;
            CHECK(h.status == SolveStatus::feasible_heuristic);
            CHECK(check_assignment(t, h.assignment).empty());
            REQUIRE(exact.status == SolveStatus::optimal);
            CHECK(h.objective >= exact.objective - kTol);
            const auto again = solve_heuristic(t, s, 3);
            CHECK(again.objective == h.objective);
        }
    }
    const auto dense = load_topology(test::fixture("dense.topo"));
    const auto h = solve_heuristic(dense, SchemeConfig::combined(), 0);
    CHECK(h.objective >= solve_exact(dense, SchemeConfig::combined()).objective - kTol);
}

TEST_CASE("candidate paths") {
    const auto tiny = load_topology(test::fixture("tiny.topo"));
    const auto to_mec = candidate_paths(tiny, node(0), node(3));
    REQUIRE(to_mec.size() == 2);
    CHECK(to_mec[0] == std::vector<NodeId>{node(0), node(2), node(3)});
    CHECK(to_mec[1] == std::vector<NodeId>{node(0), node(2), node(4), node(3)});
    CHECK(candidate_paths(tiny, node(0), node(3), 2).size() == 1);

    const Topology chain({make_elid(0, 1e8), make_server(1, NodeRole::router), make_server(2, NodeRole::router),
                          make_server(3, NodeRole::mec, 1e9, 1e9)},
                         {make_link(0, 1, 1e9), make_link(1, 2, 1e9), make_link(2, 3, 1e9)}, 0.8);
    CHECK(candidate_paths(chain, node(0), node(3)).size() == 1);
    for (const auto& s : all_schemes(chain)) {
        const auto r = solve_exact(chain, s);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.assignment.routes[0].server() == node(3));
    }
}

TEST_CASE("no server with RAM means no solution") {
    const Topology t({make_elid(0, 1e8), make_server(1, NodeRole::router), make_server(2, NodeRole::mec, 0.0, 1e9)},
                     {make_link(0, 1, 1e9), make_link(1, 2, 1e9)}, 0.8);
    for (const auto& r : {solve_exact(t, SchemeConfig::combined()), solve_oracle(t, SchemeConfig::combined()),
                          solve_heuristic(t, SchemeConfig::combined(), 0)}) {
        CHECK(r.status == SolveStatus::infeasible);
        REQUIRE(r.witness.has_value());
        CHECK(r.witness->family == ConstraintFamily::processing);
    }
}

TEST_CASE("total demand above total RAM") {
    const Topology t({make_elid(0, 1e8), make_elid(1, 1e8), make_server(2, NodeRole::mec, 1.5e8, 1e9)},
                     {make_link(0, 2, 1e9), make_link(1, 2, 1e9)}, 0.8);
    const auto r = solve_exact(t, SchemeConfig::combined());
    CHECK(r.status == SolveStatus::infeasible);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->family == ConstraintFamily::ram);
}

TEST_CASE("fixed channels can make an instance infeasible") {
    const Topology t({make_elid(0, 1e8), make_elid(1, 1e8), make_server(2, NodeRole::mec, 1e9, 1e9)},
                     {make_link(0, 2, 1e9), make_link(1, 2, 1e9)}, 0.8);
    CHECK(solve_exact(t, SchemeConfig::fixed(0.5)).status == SolveStatus::optimal);
    const auto r = solve_exact(t, SchemeConfig::fixed(0.6));
    CHECK(r.status == SolveStatus::infeasible);
    CHECK(solve_oracle(t, SchemeConfig::fixed(0.6)).status == SolveStatus::infeasible);
}

TEST_CASE("a full edge server pushes one ELiD elsewhere") {
    const auto t = ram_split();
    for (const auto& s : all_schemes(t)) {
        const auto r = solve_exact(t, s);
        REQUIRE(r.status == SolveStatus::optimal);
        const auto y = job_counts(r.assignment);
        CHECK(y.at(node(3)) == 1);
        CHECK(y.at(node(4)) == 1);
        CHECK(std::abs(r.objective - solve_oracle(t, s).objective) <= kTol);
    }
}

TEST_CASE("node budget") {
    const auto t = load_topology(test::fixture("dense.topo"));
    const auto r = solve_exact(t, SchemeConfig::combined(), {5, {}, 1, 0});
    CHECK_FALSE(r.stats.proven_optimal);
    CHECK(r.status == SolveStatus::feasible_heuristic);
    CHECK(r.objective >= solve_exact(t, SchemeConfig::combined()).objective - kTol);
}

TEST_CASE("the oracle refuses large instances") {
    CHECK_THROWS_AS(solve_oracle(load_topology(test::fixture("dense.topo")), SchemeConfig::combined()),
                    OracleRefusal);
    std::vector<Node> nodes;
    std::vector<Link> links;
    for (int k = 0; k < 6; ++k) {
        nodes.push_back(make_elid(k, 1e8));
        links.push_back(make_link(k, 6, 1e9));
    }
    nodes.push_back(make_server(6, NodeRole::mec, 1e12, 1e9));
    CHECK_THROWS_AS(solve_oracle(Topology(nodes, links, 0.8), SchemeConfig::combined()), OracleRefusal);
}

TEST_CASE("status names") {
    CHECK(to_string(SolveStatus::optimal) == "optimal");
    CHECK(to_string(SolveStatus::feasible_heuristic) == "feasible_heuristic");
    CHECK(to_string(SolveStatus::infeasible) == "infeasible");
}

TEST_CASE("fixture objectives stay pinned") {
    struct Pin {
        const char* file;
        double p1, p2, p3;
    };
    // tiny and sparse certified by enumeration, dense by the exact search.
    for (const Pin& pin : {Pin{"tiny.topo", 5.950909090909, 1.306909090909, 1.260909090909},
                           Pin{"sparse.topo", 23.472727272727, 6.245090909091, 6.245090909091},
                           Pin{"dense.topo", 21.132727272727, 5.273090909091, 3.571090909091}}) {
        CAPTURE(pin.file);
        const auto t = load_topology(test::fixture(pin.file));
        const auto schemes = all_schemes(t);
        const double expected[] = {pin.p1, pin.p2, pin.p3};
        for (std::size_t k = 0; k < 3; ++k) {
            const auto r = solve_exact(t, schemes[k]);
            REQUIRE(r.status == SolveStatus::optimal);
            CHECK(std::abs(r.objective - expected[k]) <= kTol);
        }
    }
}

TEST_CASE("fixed shares no larger than the combined ones are never faster") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 30; ++k) {
        const auto t = test::random_instance(rng);
        const auto best = solve_exact(t, SchemeConfig::combined());
        if (best.status != SolveStatus::optimal) continue;
        double epsilon = 1.0;
        for (const auto& ls : link_shares(t, best.assignment, SchemeConfig::combined())) {
            if (ls.uplink_messages > 0) epsilon = std::min(epsilon, ls.uplink_share);
            if (ls.downlink_messages > 0) epsilon = std::min(epsilon, ls.downlink_share);
        }
        const auto p1 = evaluate(t, best.assignment, SchemeConfig::fixed(epsilon));
        CHECK(p1.objective >= best.objective - kTol);
        CHECK(solve_exact(t, SchemeConfig::fixed(epsilon)).objective >= best.objective - kTol);
    }
}

TEST_CASE("every ELiD runs exactly one job") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
        const auto t = test::random_instance(rng);
        const auto r = solve_exact(t, SchemeConfig::combined());
        if (r.status != SolveStatus::optimal) continue;
        std::int64_t jobs = 0;
        for (const auto& [s, y] : job_counts(r.assignment)) jobs += y;
        CHECK(jobs == static_cast<std::int64_t>(t.elids().size()));
    }
}
