#pragma once

#include <string>
#include <string_view>

#include "elid/solver.hpp"

namespace elid {

struct ReportOptions {
    bool include_statistics = false;  // wall time and node counts vary run to run
};

// JSON document: status, scheme, objective, per-ELiD paths as node-id
// sequences, the latency CSV, and optionally the infeasibility witness and
// solver statistics.
std::string report_to_json(const Topology& topology, const SolveReport& report,
                           const ReportOptions& options = {});

// Reads the "assignment" array of a report document back into edge sets.
Assignment assignment_from_json(std::string_view text);

}  // namespace elid
