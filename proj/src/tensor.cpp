#include "spttn/tensor.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace spttn {

DenseTensor::DenseTensor(std::vector<Index> idx) : indices(std::move(idx)) {
  int64_t n = 1;
  for (const auto& ix : indices) {
    if (ix.dim < 1) throw std::invalid_argument("dense tensor dimension must be >= 1");
    n *= ix.dim;
  }
  values.assign(n, 0.0);
}

int64_t DenseTensor::offset(const std::vector<int64_t>& coord) const {
  int64_t off = 0;
  for (size_t d = 0; d < indices.size(); ++d) off = off * indices[d].dim + coord[d];
  return off;
}

void CooTensor::normalize() {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::vector<int64_t>, double>> merged;
  for (auto& e : entries) {
    if (!merged.empty() && merged.back().first == e.first)
      merged.back().second += e.second;
    else
      merged.push_back(std::move(e));
  }
  entries = std::move(merged);
}

bool CooTensor::operator==(const CooTensor& o) const {
  return indices == o.indices && entries == o.entries;
}

CsfTensor build_csf(const CooTensor& coo, const std::vector<std::string>& mode_order) {
  const int64_t d = coo.order();
  if (static_cast<int64_t>(mode_order.size()) != d)
    throw std::invalid_argument("mode_order size does not match tensor order");

  // Map mode_order position -> source position in coo's index list.
  std::vector<int> perm(d, -1);
  std::vector<bool> used(d, false);
  for (int64_t l = 0; l < d; ++l) {
    for (int64_t s = 0; s < d; ++s)
      if (coo.indices[s].name == mode_order[l]) perm[l] = static_cast<int>(s);
    if (perm[l] == -1 || used[perm[l]])
      throw std::invalid_argument("mode_order is not a permutation of tensor indices: " +
                                  mode_order[l]);
    used[perm[l]] = true;
  }

  CsfTensor csf;
  csf.modes.resize(d);
  for (int64_t l = 0; l < d; ++l) csf.modes[l] = coo.indices[perm[l]];
  csf.idx.resize(d);
  csf.ptr.resize(d > 0 ? d - 1 : 0);

  std::vector<std::pair<std::vector<int64_t>, double>> rows;
  rows.reserve(coo.entries.size());
  for (const auto& e : coo.entries) {
    std::vector<int64_t> c(d);
    for (int64_t l = 0; l < d; ++l) {
      c[l] = e.first[perm[l]];
      if (c[l] < 0 || c[l] >= csf.modes[l].dim)
        throw std::invalid_argument("coordinate out of bounds for index " + csf.modes[l].name);
    }
    rows.emplace_back(std::move(c), e.second);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  csf.values.reserve(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (int64_t l = 0; l < d; ++l) {
      const bool new_node =
          r == 0 || !std::equal(rows[r].first.begin(), rows[r].first.begin() + l + 1,
                                rows[r - 1].first.begin());
      if (new_node) {
        if (l + 1 < d) csf.ptr[l].push_back(static_cast<int64_t>(csf.idx[l + 1].size()));
        csf.idx[l].push_back(rows[r].first[l]);
      }
    }
    csf.values.push_back(rows[r].second);
  }
  // Close the child ranges: ptr[l] has one entry per node plus a sentinel.
  for (int64_t l = 0; l + 1 < d; ++l) csf.ptr[l].push_back(static_cast<int64_t>(csf.idx[l + 1].size()));
  return csf;
}

int64_t nnz_at_level(const CsfTensor& csf, int64_t k) {
  if (k < 1 || k > csf.order())
    throw std::invalid_argument("nnz_at_level: level out of range");
  return static_cast<int64_t>(csf.idx[k - 1].size());
}

CooTensor csf_to_coo(const CsfTensor& csf) {
  CooTensor coo;
  coo.indices = csf.modes;
  const int64_t d = csf.order();
  if (d == 0) return coo;
  coo.entries.reserve(csf.values.size());

  // Walk the leaves; reconstruct each coordinate by following parents.
  std::vector<int64_t> coord(d, 0);
  std::vector<int64_t> up(d, 0);  // monotone node cursor per level
  for (int64_t leaf = 0; leaf < static_cast<int64_t>(csf.values.size()); ++leaf) {
    // advance ancestor positions so that each level's range contains `leaf`
    int64_t pos = leaf;
    for (int64_t l = d - 1; l >= 0; --l) {
      coord[l] = csf.idx[l][pos];
      if (l > 0) {
        // find parent of `pos` at level l-1 (monotone scan)
        while (csf.ptr[l - 1][up[l - 1] + 1] <= pos) ++up[l - 1];
        pos = up[l - 1];
      }
    }
    coo.entries.emplace_back(coord, csf.values[leaf]);
  }
  return coo;
}

}  // namespace spttn
