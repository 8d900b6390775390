#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spttn/contraction_path.hpp"
#include "spttn/kernel_spec.hpp"

namespace spttn {

/// Per-term index orders A = (A_1,...,A_N); each A_i is a permutation of
/// term i's index union.
struct LoopOrder {
  std::vector<std::vector<int>> per_term;

  bool operator==(const LoopOrder& o) const { return per_term == o.per_term; }
  bool operator<(const LoopOrder& o) const { return per_term < o.per_term; }
};

/// Removes the shared first index across the maximal prefix of terms whose
/// heads agree, dropping per-term lists that empty out.
struct PeelResult {
  LoopOrder first;  // the peeled prefix group, heads removed
  LoopOrder rest;   // remaining terms, untouched
};
PeelResult peel(const LoopOrder& order);

struct ForestNode {
  bool is_leaf = false;
  int index = -1;      // loop index id (vertices only)
  bool sparse = false;
  int csf_level = -1;  // CSF level iterated by a sparse vertex
  int term = -1;       // term id (leaves only)
  int term_begin = 0, term_end = 0;  // covered term range [begin, end)
  int parent = -1;
  std::vector<int> children;
};

struct BufferInfo {
  int producer = -1, consumer = -1;
  std::vector<int> indices;  // ordered as in the producer's A_i
};

/// Fully-fused loop nest forest obtained by iterative peeling, with the
/// intermediate buffers between producer/consumer terms.
struct FusedLoopForest {
  std::vector<ForestNode> nodes;
  std::vector<int> roots;
  std::vector<BufferInfo> buffers;  // one per term except the last, in term order

  /// Loop vertices on the root-to-leaf path of term t, outermost first.
  std::vector<int> path_of_term(int t) const;

  /// No two consecutive children anywhere (roots included) share an index.
  bool fully_fused() const;
};

FusedLoopForest build_forest(const KernelSpec& spec, const ContractionPath& path,
                             const LoopOrder& order);

struct BufferDims {
  int order = 0;
  int64_t size = 1;
};
/// Index count and element count per buffer, keyed by producer term id.
std::vector<BufferDims> buffer_dims(const KernelSpec& spec, const FusedLoopForest& forest);

/// CSF mode order as index ids; by default the sparse input's declared order.
std::vector<int> default_csf_order(const KernelSpec& spec);

/// Indices of term t that must be iterated in CSF order: the term's
/// sparse-mode indices when the term reads the sparse tensor directly or via
/// a sparse-prefix intermediate, empty otherwise.
std::vector<int> constrained_indices(const KernelSpec& spec, const ContractionPath& path, int t,
                                     const std::vector<int>& csf_order);

/// True when every A_i is a permutation of term i's union and the
/// constrained indices appear as a subsequence in CSF order.
bool order_admissible(const KernelSpec& spec, const ContractionPath& path, const LoopOrder& order,
                      const std::vector<int>& csf_order);

/// All admissible per-term orders for one term, lexicographically sorted by
/// index id. Count is |I_i|!/k_i! with k_i constrained indices.
std::vector<std::vector<int>> enumerate_term_orders(const KernelSpec& spec,
                                                    const ContractionPath& path, int t,
                                                    const std::vector<int>& csf_order);

/// Cartesian product of per-term order choices.
std::vector<LoopOrder> enumerate_orders(const KernelSpec& spec, const ContractionPath& path,
                                        const std::vector<int>& csf_order);

/// Number of admissible loop orders, capped at `cap`.
int64_t count_orders(const KernelSpec& spec, const ContractionPath& path,
                     const std::vector<int>& csf_order, int64_t cap);

/// Streaming variant of enumerate_orders.
void for_each_order(const KernelSpec& spec, const ContractionPath& path,
                    const std::vector<int>& csf_order,
                    const std::function<void(const LoopOrder&)>& fn);

/// Indented pseudo-loop rendering of the fused forest (stable format).
std::string render_loop_nest(const KernelSpec& spec, const ContractionPath& path,
                             const FusedLoopForest& forest);

/// Name of the tensor with the given handle: inputs/output by kernel name,
/// intermediates X, Y, Z, X3, X4, ...
std::string tensor_handle_name(const KernelSpec& spec, const ContractionPath& path, int handle);

}  // namespace spttn
