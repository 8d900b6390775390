#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace spttn {

/// Small index set over kernel index ids (capped at 32 indices per kernel).
using IndexSet = uint32_t;

constexpr int kMaxIndices = 32;

inline IndexSet set_of(int id) { return IndexSet{1} << id; }
inline bool contains(IndexSet s, int id) { return (s >> id) & 1u; }
inline int set_size(IndexSet s) { return std::popcount(s); }

inline std::vector<int> set_elements(IndexSet s) {
  std::vector<int> out;
  while (s) {
    int id = std::countr_zero(s);
    out.push_back(id);
    s &= s - 1;
  }
  return out;
}

}  // namespace spttn
