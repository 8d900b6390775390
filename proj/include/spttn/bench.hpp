#pragma once

#include <cstdint>
#include <vector>

#include "spttn/executor.hpp"
#include "spttn/optimizer.hpp"

namespace spttn {

struct BenchRow {
  LoopOrder order;
  CostValue cost;
  double seconds = 0.0;
  int64_t multiply_adds = 0;
};

/// Ranks admissible orders of `path` by model cost, keeps the top k, and
/// times their execution. Rows come back in model rank order.
std::vector<BenchRow> bench_orders(const KernelSpec& spec, const ContractionPath& path,
                                   const CostModel& model, const ExecInputs& inputs, int top_k,
                                   int64_t enumeration_budget = 200000, int repeats = 3);

/// Pairs ranked better by the model but measured slower.
int ranking_inversions(const std::vector<BenchRow>& rows);

}  // namespace spttn
