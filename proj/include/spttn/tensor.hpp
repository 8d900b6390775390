#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace spttn {

/// A symbolic tensor index together with its dimension size.
struct Index {
  std::string name;
  int64_t dim = 0;

  bool operator==(const Index& o) const { return name == o.name && dim == o.dim; }
};

/// Dense tensor in row-major layout (last index fastest).
struct DenseTensor {
  std::vector<Index> indices;
  std::vector<double> values;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<Index> idx);

  int64_t order() const { return static_cast<int64_t>(indices.size()); }
  int64_t size() const { return static_cast<int64_t>(values.size()); }
  int64_t offset(const std::vector<int64_t>& coord) const;
  double& at(const std::vector<int64_t>& coord) { return values[offset(coord)]; }
  double at(const std::vector<int64_t>& coord) const { return values[offset(coord)]; }
};

/// Coordinate-format sparse tensor. `normalize()` sorts entries
/// lexicographically and sums duplicates; explicitly stored zeros are kept.
struct CooTensor {
  std::vector<Index> indices;
  std::vector<std::pair<std::vector<int64_t>, double>> entries;

  int64_t order() const { return static_cast<int64_t>(indices.size()); }
  int64_t nnz() const { return static_cast<int64_t>(entries.size()); }

  void normalize();
  bool operator==(const CooTensor& o) const;
};

/// Compressed sparse fiber tree. Level l stores the nonzero index values at
/// that level (`idx[l]`) and, for all levels but the last, `ptr[l]` with the
/// child range of each node: children of node p at level l are
/// [ptr[l][p], ptr[l][p+1]) in level l+1. Leaf level carries the values.
struct CsfTensor {
  std::vector<Index> modes;  // root-to-leaf mode order
  std::vector<std::vector<int64_t>> idx;
  std::vector<std::vector<int64_t>> ptr;
  std::vector<double> values;

  int64_t order() const { return static_cast<int64_t>(modes.size()); }
  int64_t nnz() const { return static_cast<int64_t>(values.size()); }
};

/// Builds a CSF tree whose root-to-leaf order is `mode_order`.
/// `mode_order` must name a permutation of coo's indices; coo must be
/// normalized.
CsfTensor build_csf(const CooTensor& coo, const std::vector<std::string>& mode_order);

/// Node count at level k (1-based), i.e. the number of distinct k-prefixes
/// among the nonzero coordinates.
int64_t nnz_at_level(const CsfTensor& csf, int64_t k);

/// Depth-first traversal back to sorted COO form (mode order preserved).
CooTensor csf_to_coo(const CsfTensor& csf);

}  // namespace spttn
