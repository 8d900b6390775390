#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "spttn/tensor.hpp"

namespace spttn {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads FROSTT-style .tns text: '#' comment lines, then one entry per line
/// as d 1-based coordinates followed by a value. Coordinates are converted
/// to 0-based; duplicates are summed; dimensions default to the maximum
/// coordinate per mode. Index names are left empty for the caller to bind.
CooTensor read_tns(std::istream& in);
CooTensor read_tns_file(const std::string& path);

/// Writes 1-based coordinates with shortest-round-trip float text.
void write_tns(std::ostream& out, const CooTensor& coo);
void write_tns_dense(std::ostream& out, const DenseTensor& t);

/// ceil(density * prod(dims)) distinct coordinates sampled without
/// replacement, values uniform in [-1,1]; reproducible per seed.
CooTensor gen_random(const std::vector<Index>& indices, double density, uint64_t seed);

/// Dense tensor with values uniform in [-1,1]; reproducible per seed.
DenseTensor gen_dense(const std::vector<Index>& indices, uint64_t seed);

/// Stable string hash for deriving per-tensor seeds (FNV-1a).
uint64_t stable_hash(const std::string& s);

}  // namespace spttn
