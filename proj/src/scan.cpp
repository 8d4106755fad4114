#include "elid/scan.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "elid/model.hpp"

namespace elid {

std::uint64_t octree_bytes_per_m3(int depth) {
    if (depth < 2) {
        throw DomainError("octree depth must be at least 2, got " + std::to_string(depth));
    }
    // 8^(d-2) = 2^(3(d-2)); leave room for the +12.
    const int shift = 3 * (depth - 2);
    if (shift > 63) {
        throw DomainError("octree depth " + std::to_string(depth) + " overflows 64-bit byte count");
    }
    const std::uint64_t cells = std::uint64_t{1} << shift;
    if (cells > std::numeric_limits<std::uint64_t>::max() - 12) {
        throw DomainError("octree depth " + std::to_string(depth) + " overflows 64-bit byte count");
    }
    return cells + 12;
}

double scan_precision_m(int depth) { return std::ldexp(1.0, 1 - depth); }

std::uint64_t data_rate(const ScanProfile& profile) {
    if (!(profile.scan_frequency > 0.0) || !(profile.scan_volume > 0.0) ||
        !(profile.compression > 0.0 && profile.compression <= 1.0)) {
        throw DomainError("scan profile fields must be positive with compression in (0, 1]");
    }
    const auto per_m3 = static_cast<double>(octree_bytes_per_m3(profile.depth));
    // Integer-valued factors multiply exactly below 2^53; compression last.
    const double raw = per_m3 * profile.scan_frequency * profile.scan_volume * profile.compression;
    const double rounded = std::floor(raw + 0.5);
    if (!(rounded < 18446744073709551616.0)) {
        throw DomainError("data rate overflows 64-bit byte count");
    }
    return static_cast<std::uint64_t>(rounded);
}

double downlink_size(double data_rate, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw DomainError("beta must lie in (0, 1]");
    }
    return beta * data_rate;
}

}  // namespace elid
