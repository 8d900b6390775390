#include "spttn/bench.hpp"

#include <algorithm>
#include <chrono>

namespace spttn {

std::vector<BenchRow> bench_orders(const KernelSpec& spec, const ContractionPath& path,
                                   const CostModel& model, const ExecInputs& inputs, int top_k,
                                   int64_t enumeration_budget, int repeats) {
  std::vector<int> csf_order = default_csf_order(spec);
  std::vector<std::pair<CostValue, LoopOrder>> ranked;
  if (count_orders(spec, path, csf_order, enumeration_budget) <= enumeration_budget) {
    for_each_order(spec, path, csf_order, [&](const LoopOrder& o) {
      ranked.emplace_back(eval_cost(model, spec, path, o), o);
    });
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first == b.first) return a.second < b.second;
      return a.first < b.first;
    });
  } else {
    SearchResult r = order_dp(spec, path, model);
    ranked.emplace_back(r.best.cost, r.best.order);
    if (r.second_best_diff_root.valid)
      ranked.emplace_back(r.second_best_diff_root.cost, r.second_best_diff_root.order);
  }
  if (static_cast<int>(ranked.size()) > top_k) ranked.resize(top_k);

  std::vector<BenchRow> rows;
  for (auto& [cost, order] : ranked) {
    BenchRow row;
    row.order = order;
    row.cost = cost;
    ExecPlan plan = prepare(spec, path, order, inputs);
    double best = 0.0;
    for (int r = 0; r < std::max(1, repeats); ++r) {
      ExecResult res = execute(plan);
      if (r == 0 || res.stats.wall_seconds < best) best = res.stats.wall_seconds;
      row.multiply_adds = res.stats.multiply_adds;
    }
    row.seconds = best;
    rows.push_back(std::move(row));
  }
  return rows;
}

int ranking_inversions(const std::vector<BenchRow>& rows) {
  int inv = 0;
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = i + 1; j < rows.size(); ++j)
      if (rows[i].seconds > rows[j].seconds) ++inv;
  return inv;
}

}  // namespace spttn
