#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "elid/model.hpp"

namespace elid {

// How a link's bandwidth is divided between the messages crossing it.
//   fixed:     every message gets the same fraction epsilon (P1)
//   decoupled: sigma = 1/(1+beta) pooled for uplinks, 1-sigma for downlinks (P2)
//   combined:  one pool split evenly over all messages on the link (P3)
struct SchemeConfig {
    enum class Variant { fixed, decoupled, combined };

    Variant variant = Variant::combined;
    double epsilon = 0.0;  // fixed only
    double sigma = 0.0;    // decoupled only

    static SchemeConfig fixed(double epsilon);
    static SchemeConfig decoupled(double beta);
    static SchemeConfig combined();

    std::string name() const;  // "p1" / "p2" / "p3"
};

// Thrown when fixed channels cannot carry the messages routed over a link.
class ChannelCapacityError : public Error {
public:
    using Error::Error;
};

// Bandwidth split on one physical link. Message counts cover both travel
// directions; shares are per message.
struct LinkShare {
    NodeId i{};
    NodeId j{};
    std::int64_t uplink_messages = 0;
    std::int64_t downlink_messages = 0;
    double uplink_share = 0.0;
    double downlink_share = 0.0;
};

// Per-hop and per-job timing shared by every evaluator so that all code
// paths produce bit-identical latencies.
inline double uplink_share(const SchemeConfig& scheme, std::int64_t up, std::int64_t down) {
    switch (scheme.variant) {
        case SchemeConfig::Variant::fixed: return scheme.epsilon;
        case SchemeConfig::Variant::decoupled: return scheme.sigma / static_cast<double>(up);
        case SchemeConfig::Variant::combined: return 1.0 / static_cast<double>(up + down);
    }
    return 0.0;
}

inline double downlink_share(const SchemeConfig& scheme, std::int64_t up, std::int64_t down) {
    switch (scheme.variant) {
        case SchemeConfig::Variant::fixed: return scheme.epsilon;
        case SchemeConfig::Variant::decoupled: return (1.0 - scheme.sigma) / static_cast<double>(down);
        case SchemeConfig::Variant::combined: return 1.0 / static_cast<double>(up + down);
    }
    return 0.0;
}

// Fixed channels: every message on the link holds epsilon of it.
inline bool fixed_channels_fit(const SchemeConfig& scheme, std::int64_t messages) {
    return static_cast<double>(messages) * scheme.epsilon <= 1.0 + 1e-12;
}

inline double hop_seconds(double bytes, double share, double bandwidth) {
    return bytes / (share * bandwidth);
}

inline double processing_seconds(std::int64_t jobs, double bytes, double throughput) {
    return static_cast<double>(jobs) * bytes / throughput;
}

// Only links that carry traffic are listed, in link-table order.
std::vector<LinkShare> link_shares(const Topology& topology, const Assignment& assignment,
                                   const SchemeConfig& scheme);

struct ElidLatency {
    NodeId elid{};
    NodeId server{};
    double uplink = 0.0;      // seconds
    double downlink = 0.0;
    double processing = 0.0;
    double total = 0.0;
};

struct LatencyBreakdown {
    std::vector<ElidLatency> per_elid;  // topology ELiD order
    double objective = 0.0;             // sum of rho * total

    double mean_latency() const;
};

LatencyBreakdown evaluate(const Topology& topology, const Assignment& assignment,
                          const SchemeConfig& scheme);

// Fraction of ELiDs processed at the cloud node. Throws if there is no cloud.
double cloud_fraction(const Topology& topology, const Assignment& assignment);
// Same, weighted by data rate.
double cloud_fraction_by_bytes(const Topology& topology, const Assignment& assignment);

// CSV: elid_id,uplink_s,downlink_s,processing_s,total_s,server_id then an
// objective row.
std::string latency_csv(const LatencyBreakdown& breakdown);

}  // namespace elid
