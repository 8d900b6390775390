#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spttn/contraction_path.hpp"
#include "spttn/cost_model.hpp"
#include "spttn/kernel_spec.hpp"
#include "spttn/loop_nest.hpp"

namespace spttn {

struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Candidate {
  LoopOrder order;
  CostValue cost;
  int root = -1;  // first loop vertex of the fused forest
  bool valid = false;
};

struct SearchStats {
  int64_t subproblems = 0;
  int64_t memo_hits = 0;
  int64_t orders_scanned = 0;  // exhaustive only
  double wall_seconds = 0.0;
};

struct SearchResult {
  Candidate best;
  Candidate second_best_diff_root;  // invalid when no different root exists
  SearchStats stats;
};

struct DpOptions {
  bool use_memo = true;
  std::vector<int> csf_order;  // empty = kernel declared order
};

/// Memoized dynamic program over term subsequences and removed index sets.
/// The best order is cost-minimal among all admissible orders; the second
/// best has a fused forest with a different first root.
SearchResult order_dp(const KernelSpec& spec, const ContractionPath& path, const CostModel& model,
                      const DpOptions& opts = {});

/// Exact scan over all admissible orders. Throws budget_error when the order
/// count exceeds `budget`.
SearchResult order_exhaustive(const KernelSpec& spec, const ContractionPath& path,
                              const CostModel& model, int64_t budget = 1'000'000,
                              const std::vector<int>& csf_order = {});

struct JointOptions {
  bool use_depth_filter = true;
  std::vector<int> csf_order;
};

/// Best (path, order) over the enumerated contraction paths, optionally
/// restricted to minimum-depth paths. Ties break toward the earlier path in
/// canonical enumeration order.
std::pair<ContractionPath, SearchResult> joint_search(const KernelSpec& spec,
                                                      const CostModel& model,
                                                      const JointOptions& opts = {});

}  // namespace spttn
