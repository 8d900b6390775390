#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spttn/index_set.hpp"
#include "spttn/kernel_spec.hpp"

namespace spttn {

/// One pairwise contraction. Tensor handles: input tensors are 0..n-1 in
/// kernel order; the intermediate produced by term i is n+i. The last term's
/// output is the kernel output.
struct ContractionTerm {
  IndexSet lhs = 0, rhs = 0, out = 0;
  int lhs_id = -1, rhs_id = -1, out_id = -1;

  IndexSet all() const { return lhs | rhs | out; }
};

/// Binary contraction tree given as its ordered term list: each intermediate
/// is produced before it is consumed.
struct ContractionPath {
  std::vector<ContractionTerm> terms;

  int num_terms() const { return static_cast<int>(terms.size()); }

  /// Term that consumes term t's output, or -1 for the final term.
  int consumer_of(int t) const;

  /// Term that reads the sparse input tensor directly.
  int sparse_term() const;

  /// True if term t is the sparse term or (transitively) consumes its output.
  bool on_sparse_chain(int t) const;

  /// Nesting description like "((T*V)*U)" using kernel tensor names.
  std::string describe(const KernelSpec& spec) const;
};

/// All contraction paths for the kernel's inputs, enumerated by repeatedly
/// contracting unordered pairs. The count follows T(n) = C(n,2) * T(n-1),
/// T(2) = 1. Materializes the full list; beyond 8 inputs use for_each_path.
std::vector<ContractionPath> enumerate_paths(const KernelSpec& spec);

/// Streaming enumeration in the same canonical order, for kernels too large
/// to materialize.
void for_each_path(const KernelSpec& spec,
                   const std::function<void(const ContractionPath&)>& fn);

/// Loop-nest depth the path requires: max over terms of |lhs U rhs U out|.
int max_loop_depth(const ContractionPath& path);

/// Paths achieving the minimum max_loop_depth.
std::vector<ContractionPath> filter_min_depth(const std::vector<ContractionPath>& paths);

}  // namespace spttn
