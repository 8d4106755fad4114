#pragma once

#include <cstdint>

namespace elid {

// Sensing parameters of one ELiD. depth is the octree recursion depth d.
struct ScanProfile {
    int depth = 2;
    double scan_frequency = 1.0;  // rotations per second
    double scan_volume = 1.0;     // m^3
    double compression = 1.0;     // Gamma in (0, 1]
};

// Upper bound on octree bytes per cubic meter per scan: 8^(d-2) + 12.
// Throws DomainError for d < 2 or when the value overflows 64 bits.
std::uint64_t octree_bytes_per_m3(int depth);

// Spatial resolution 2^(1-d) meters of a depth-d octree.
double scan_precision_m(int depth);

// D_lambda in bytes/s, rounded half up to whole bytes.
std::uint64_t data_rate(const ScanProfile& profile);

// Size of the processed map returned to the ELiD: beta * D_lambda.
double downlink_size(double data_rate, double beta);

}  // namespace elid
