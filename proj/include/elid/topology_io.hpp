#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "elid/model.hpp"

namespace elid {

// Malformed topology document. The message carries a position: a line/column
// for syntax errors, a JSON path such as nodes[3].role for schema errors.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Topology document (JSON syntax):
///
///   { "beta": 0.8,
///     "nodes": [ {"id": 0, "role": "elid", "D_lambda": 1e8, "rho": 1},
///                {"id": 1, "role": "elid", "d": 5, "f_scan": 10, "V_scan": 1000, "gamma": 0.1},
///                {"id": 2, "role": "router"},
///                {"id": 3, "role": "mec", "M": 1e9, "omega": 2.5e8} ],
///     "links": [ {"i": 0, "j": 2, "R": 1e9} ] }
///
/// rho defaults to the ELiD's 1-based position among ELiDs in the file.
Topology parse_topology(std::string_view text);
Topology load_topology(const std::filesystem::path& path);

std::string serialize_topology(const Topology& topology);

}  // namespace elid
