#pragma once

#include <cstdint>
#include <string>

#include "nsstab/field.hpp"

namespace nsstab {

/// Binary field snapshot: magic "NSSTABF1", version, box lengths, resolution,
/// then the three real component arrays in x-fastest order, little-endian
/// IEEE doubles. Round-trips bit-exactly.
void write_snapshot(const PhysicalVectorField& f, const std::string& path);
PhysicalVectorField read_snapshot(const std::string& path);

/// Solver checkpoint: magic "NSSTABC1", version, t, config hash, box, then
/// the three complex coefficient arrays (re/im interleaved). Stores the
/// spectral state bit-exactly so a restarted march reproduces the original
/// tail bit for bit.
struct Checkpoint {
    double t = 0.0;
    std::uint64_t config_hash = 0;
    SpectralVectorField field;
};

void write_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace nsstab
