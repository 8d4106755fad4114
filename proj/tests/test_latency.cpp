#include <doctest.h>

#include <cmath>

#include "elid/latency.hpp"
#include "elid/topology_io.hpp"
#include "support.hpp"

using namespace elid;
using elid::test::make_elid;
using elid::test::make_link;
using elid::test::make_server;

namespace {

Assignment direct(int elid, int server) {
    Assignment a;
    a.routes.push_back(ElidRoute::from_paths(node(elid), {node(elid), node(server)}, {node(server), node(elid)}));
    return a;
}

// n ELiDs behind router n, which feeds MEC n+1 over a 5 GB/s link.
Topology star(int n, double beta = 0.8) {
    std::vector<Node> nodes;
    std::vector<Link> links;
    for (int k = 0; k < n; ++k) {
        nodes.push_back(make_elid(k, 1e8, k + 1));
        links.push_back(make_link(k, n, 1e9));
    }
    nodes.push_back(make_server(n, NodeRole::router));
    nodes.push_back(make_server(n + 1, NodeRole::mec, 1e12, 2.5e8));
    links.push_back(make_link(n, n + 1, 5e9));
    return Topology(std::move(nodes), std::move(links), beta);
}

Assignment star_routes(int n) {
    Assignment a;
    for (int k = 0; k < n; ++k) {
        a.routes.push_back(
            ElidRoute::from_paths(node(k), {node(k), node(n), node(n + 1)}, {node(n + 1), node(n), node(k)}));
    }
    return a;
}

}  // namespace

TEST_CASE("single link worked example") {
    const auto t = test::single_link_instance();
    const auto b = evaluate(t, direct(0, 1), SchemeConfig::combined());
    REQUIRE(b.per_elid.size() == 1);
    const auto& l = b.per_elid[0];
    CHECK(std::abs(l.uplink - 0.2) <= 1e-12);
    CHECK(std::abs(l.downlink - 0.16) <= 1e-12);
    CHECK(std::abs(l.processing - 0.4) <= 1e-12);
    CHECK(std::abs(l.total - 0.76) <= 1e-12);
    CHECK(l.server == node(1));
    CHECK(b.objective == l.total);
}

TEST_CASE("decoupled shares") {
    const auto s = SchemeConfig::decoupled(0.8);
    CHECK(s.sigma == doctest::Approx(1.0 / 1.8));
    const auto t = star(2);
    const auto shares = link_shares(t, star_routes(2), s);
    const auto& trunk = shares.back();
    CHECK(trunk.uplink_messages == 2);
    CHECK(trunk.downlink_messages == 2);
    CHECK(trunk.uplink_share == doctest::Approx(0.2778).epsilon(1e-4));
    CHECK(trunk.downlink_share == doctest::Approx(0.2222).epsilon(1e-4));
}

TEST_CASE("fixed channels run out") {
    const auto p1 = SchemeConfig::fixed(0.1);
    CHECK_NOTHROW(evaluate(star(5), star_routes(5), p1));
    CHECK_THROWS_AS(evaluate(star(6), star_routes(6), p1), ChannelCapacityError);
    CHECK(fixed_channels_fit(p1, 10));
    CHECK_FALSE(fixed_channels_fit(p1, 11));
}

TEST_CASE("shares never allocate more than the link") {
    for (int n : {1, 2, 3, 5}) {
        const auto t = star(n);
        const auto a = star_routes(n);
        for (const auto& s : {SchemeConfig::fixed(0.1), SchemeConfig::decoupled(t.beta()), SchemeConfig::combined()}) {
            CAPTURE(n);
            CAPTURE(s.name());
            for (const auto& ls : link_shares(t, a, s)) {
                const double total = static_cast<double>(ls.uplink_messages) * ls.uplink_share +
                                     static_cast<double>(ls.downlink_messages) * ls.downlink_share;
                CHECK(total <= 1.0 + 1e-12);
                if (s.variant != SchemeConfig::Variant::fixed) CHECK(total == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("only used links get a share") {
    const auto t = load_topology(test::fixture("tiny.topo"));
    Assignment a;
    a.routes.push_back(ElidRoute::from_paths(node(0), {node(0), node(2), node(3)}, {node(3), node(2), node(0)}));
    a.routes.push_back(ElidRoute::from_paths(node(1), {node(1), node(2), node(3)}, {node(3), node(2), node(1)}));
    const auto shares = link_shares(t, a, SchemeConfig::combined());
    CHECK(shares.size() == 3);
    for (const auto& ls : shares) CHECK_FALSE((ls.i == node(2) && ls.j == node(4)));
}

TEST_CASE("latency is linear in the data rate") {
    const auto t = load_topology(test::fixture("tiny.topo"));
    Assignment a;
    a.routes.push_back(ElidRoute::from_paths(node(0), {node(0), node(2), node(3)}, {node(3), node(2), node(0)}));
    a.routes.push_back(ElidRoute::from_paths(node(1), {node(1), node(2), node(4)}, {node(4), node(3), node(2), node(1)}));
    for (const auto& s : {SchemeConfig::fixed(0.2), SchemeConfig::decoupled(t.beta()), SchemeConfig::combined()}) {
        const double base = evaluate(t, a, s).objective;
        for (double k : {0.5, 2.0, 3.0, 10.0}) {
            const double scaled = evaluate(t.with_uniform_data_rate(1e8 * k), a, s).objective;
            CHECK(scaled == doctest::Approx(k * base).epsilon(1e-12));
        }
    }
}

TEST_CASE("faster links and servers never hurt") {
    const auto t = test::single_link_instance();
    const auto a = direct(0, 1);
    const auto s = SchemeConfig::combined();
    const double base = evaluate(t, a, s).per_elid[0].total;
    const Topology fast_link(t.nodes(), {make_link(0, 1, 2e9)}, t.beta());
    CHECK(evaluate(fast_link, a, s).per_elid[0].total < base);
    CHECK(evaluate(t.with_throughput(NodeRole::mec, 5e8), a, s).per_elid[0].total < base);
    CHECK(evaluate(t.with_beta(0.5), a, s).per_elid[0].total < base);
}

TEST_CASE("processing time counts concurrent jobs") {
    const auto t = star(3);
    const auto b = evaluate(t, star_routes(3), SchemeConfig::combined());
    for (const auto& l : b.per_elid) CHECK(l.processing == doctest::Approx(3 * 1e8 / 2.5e8));
}

TEST_CASE("a second job on the same server doubles processing") {
    const Topology t({make_elid(0, 1e8), make_elid(1, 1e8), make_server(2, NodeRole::mec, 1e9, 2.5e8)},
                     {make_link(0, 2, 1e9), make_link(1, 2, 1e9)}, 0.8);
    Assignment a = direct(0, 2);
    a.routes.push_back(direct(1, 2).routes[0]);
    const auto b = evaluate(t, a, SchemeConfig::combined());
    CHECK(std::abs(b.per_elid[0].processing - 0.8) <= 1e-12);
    CHECK(std::abs(b.per_elid[0].uplink - 0.2) <= 1e-12);
}

TEST_CASE("objective weights latency by priority") {
    const auto t = star(3);
    const auto b = evaluate(t, star_routes(3), SchemeConfig::combined());
    double weighted = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < b.per_elid.size(); ++k) {
        weighted += static_cast<double>(k + 1) * b.per_elid[k].total;
        sum += b.per_elid[k].total;
        CHECK(b.per_elid[k].total == doctest::Approx(b.per_elid[k].uplink + b.per_elid[k].downlink +
                                                     b.per_elid[k].processing));
    }
    CHECK(b.objective == doctest::Approx(weighted));
    CHECK(b.mean_latency() == doctest::Approx(sum / 3));

    std::vector<Node> zero = t.nodes();
    for (auto& n : zero) {
        if (n.is_elid()) std::get<ElidParams>(n.params).priority = 0.0;
    }
    CHECK(evaluate(Topology(zero, t.links(), t.beta()), star_routes(3), SchemeConfig::combined()).objective == 0.0);
}

TEST_CASE("evaluation is deterministic") {
    const auto t = star(4);
    const auto a = star_routes(4);
    const auto s = SchemeConfig::decoupled(t.beta());
    CHECK(latency_csv(evaluate(t, a, s)) == latency_csv(evaluate(t, a, s)));
}

TEST_CASE("cloud fraction") {
    const auto t = load_topology(test::fixture("tiny.topo"));
    Assignment a;
    a.routes.push_back(ElidRoute::from_paths(node(0), {node(0), node(2), node(3)}, {node(3), node(2), node(0)}));
    a.routes.push_back(ElidRoute::from_paths(node(1), {node(1), node(2), node(4)}, {node(4), node(2), node(1)}));
    CHECK(cloud_fraction(t, a) == 0.5);
    CHECK(cloud_fraction_by_bytes(t, a) == 0.5);
    CHECK_THROWS_AS(cloud_fraction(test::single_link_instance(), direct(0, 1)), Error);
}

TEST_CASE("latency csv layout") {
    const auto csv = latency_csv(evaluate(test::single_link_instance(), direct(0, 1), SchemeConfig::combined()));
    CHECK(csv.rfind("elid_id,uplink_s,downlink_s,processing_s,total_s,server_id\n", 0) == 0);
    CHECK(csv.find("0,0.200000000000,0.160000000000,0.400000000000,0.760000000000,1\n") != std::string::npos);
    CHECK(csv.find("objective,,,,0.760000000000,") != std::string::npos);
}

TEST_CASE("scheme names") {
    CHECK(SchemeConfig::fixed(0.1).name() == "p1");
    CHECK(SchemeConfig::decoupled(0.8).name() == "p2");
    CHECK(SchemeConfig::combined().name() == "p3");
}
