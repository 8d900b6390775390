#include "spttn/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spttn {

namespace {

using Clock = std::chrono::steady_clock;

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.valid != b.valid) return a.valid;
  if (!a.valid) return false;
  if (a.cost == b.cost) return a.order < b.order;
  return a.cost < b.cost;
}

// Per-subproblem orders cover only the terms of that range; the root is the
// first loop vertex, or -1 when the subrange opens with exhausted terms (a
// leading leaf never conflicts with a preceding sibling of any index).
struct Entry {
  Candidate best;
  Candidate second;
};

struct DpSolver {
  const KernelSpec& spec;
  const ContractionPath& path;
  const CostModel& model;
  std::vector<int> csf_order;
  bool use_memo;

  int N = 0;
  IndexSet modes = 0;
  int sparse_term = -1;
  std::vector<std::vector<int>> constrained;  // per term, CSF-ordered
  std::unordered_map<uint64_t, Entry> memo;
  SearchStats stats;

  DpSolver(const KernelSpec& s, const ContractionPath& p, const CostModel& m,
           std::vector<int> csf, bool memoize)
      : spec(s), path(p), model(m), csf_order(std::move(csf)), use_memo(memoize) {}

  uint64_t key(int u, int v, IndexSet S) const {
    return (static_cast<uint64_t>(u) << 56) | (static_cast<uint64_t>(v) << 48) |
           static_cast<uint64_t>(S);
  }

  // First constrained index of term t not yet iterated, or -1.
  int next_constrained(int t, IndexSet S) const {
    for (int id : constrained[t])
      if (!contains(S, id)) return id;
    return -1;
  }

  bool admits_root(int t, IndexSet S, int q) const {
    if (!contains(modes, q)) return true;
    if (constrained[t].empty()) return true;
    return next_constrained(t, S) == q;
  }

  Entry solve(int u, int v, IndexSet S) {
    if (u == v) {
      Entry e;
      e.best = Candidate{LoopOrder{}, model.identity(), -1, true};
      return e;
    }
    const uint64_t k = key(u, v, S);
    if (use_memo) {
      auto it = memo.find(k);
      if (it != memo.end()) {
        ++stats.memo_hits;
        return it->second;
      }
    }
    ++stats.subproblems;

    Entry result;
    const IndexSet remaining = path.terms[u].all() & ~S;
    if (remaining == 0) {
      // Term u has no indices left: it becomes a leaf here.
      Entry sub = solve(u + 1, v, S);
      const CostValue seed = model.leaf_value(u);
      auto lift = [&](const Candidate& c) {
        if (!c.valid) return c;
        Candidate out;
        out.valid = true;
        out.root = -1;  // leading leaf: no adjacency constraint
        out.cost = model.combine(seed, c.cost);
        out.order.per_term.reserve(1 + c.order.per_term.size());
        out.order.per_term.emplace_back();
        for (const auto& o : c.order.per_term) out.order.per_term.push_back(o);
        return out;
      };
      result.best = lift(sub.best);
      result.second = lift(sub.second);
    } else {
      for (int q : set_elements(remaining)) {
        if (!admits_root(u, S, q)) continue;
        int run = 0;
        while (u + run < v) {
          const int t = u + run;
          if (!contains(path.terms[t].all() & ~S, q)) break;
          if (!admits_root(t, S, q)) break;
          ++run;
        }
        Candidate best_for_q;  // best over splits s for this root
        for (int s = 1; s <= run; ++s) {
          Entry x = solve(u, u + s, S | set_of(q));
          if (!x.best.valid) continue;
          Entry y = solve(u + s, v, S);
          // A following sibling tree rooted at q would not be fully fused.
          const Candidate& pick = (y.best.valid && y.best.root == q) ? y.second : y.best;
          if (!pick.valid) continue;

          RootCtx ctx{spec, path, u, v, s, S, q};
          Candidate cand;
          cand.valid = true;
          cand.root = q;
          cand.cost = model.combine(model.phi(ctx, x.best.cost), pick.cost);
          cand.order.per_term.reserve(v - u);
          for (int t = 0; t < s; ++t) {
            std::vector<int> o;
            o.reserve(1 + x.best.order.per_term[t].size());
            o.push_back(q);
            o.insert(o.end(), x.best.order.per_term[t].begin(),
                     x.best.order.per_term[t].end());
            cand.order.per_term.push_back(std::move(o));
          }
          for (const auto& o : pick.order.per_term) cand.order.per_term.push_back(o);
          if (candidate_less(cand, best_for_q)) best_for_q = std::move(cand);
        }
        if (!best_for_q.valid) continue;
        if (candidate_less(best_for_q, result.best)) {
          result.second = std::move(result.best);
          result.best = std::move(best_for_q);
        } else if (candidate_less(best_for_q, result.second)) {
          result.second = std::move(best_for_q);
        }
      }
    }
    if (use_memo) memo.emplace(k, result);
    return result;
  }
};

int forest_first_root(const LoopOrder& order) {
  for (const auto& o : order.per_term) {
    if (!o.empty()) return o[0];
    return -1;  // leading leaf
  }
  return -1;
}

}  // namespace

SearchResult order_dp(const KernelSpec& spec, const ContractionPath& path, const CostModel& model,
                      const DpOptions& opts) {
  for (const auto& t : path.terms)
    if (t.all() == 0)
      throw std::invalid_argument("order_dp: term with empty index union");
  const auto start = Clock::now();
  DpSolver solver{spec, path, model,
                  opts.csf_order.empty() ? default_csf_order(spec) : opts.csf_order,
                  opts.use_memo};
  solver.N = path.num_terms();
  solver.modes = spec.sparse_modes();
  solver.sparse_term = path.sparse_term();
  for (int t = 0; t < solver.N; ++t)
    solver.constrained.push_back(constrained_indices(spec, path, t, solver.csf_order));

  Entry top = solver.solve(0, solver.N, 0);
  SearchResult res;
  res.best = top.best;
  res.second_best_diff_root = top.second;
  res.stats = solver.stats;
  res.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

SearchResult order_exhaustive(const KernelSpec& spec, const ContractionPath& path,
                              const CostModel& model, int64_t budget,
                              const std::vector<int>& csf_order_in) {
  const auto start = Clock::now();
  std::vector<int> csf_order = csf_order_in.empty() ? default_csf_order(spec) : csf_order_in;
  const int64_t total = count_orders(spec, path, csf_order, budget);
  if (total > budget)
    throw budget_error("order_exhaustive: admissible order count exceeds budget of " +
                       std::to_string(budget));

  SearchResult res;
  for_each_order(spec, path, csf_order, [&](const LoopOrder& order) {
    ++res.stats.orders_scanned;
    Candidate cand;
    cand.valid = true;
    cand.order = order;
    cand.cost = eval_cost(model, spec, path, order);
    cand.root = forest_first_root(order);
    if (candidate_less(cand, res.best)) {
      if (res.best.valid && res.best.root != cand.root &&
          candidate_less(res.best, res.second_best_diff_root))
        res.second_best_diff_root = res.best;
      res.best = std::move(cand);
    } else if (cand.root != res.best.root &&
               candidate_less(cand, res.second_best_diff_root)) {
      res.second_best_diff_root = std::move(cand);
    }
  });
  res.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

std::pair<ContractionPath, SearchResult> joint_search(const KernelSpec& spec,
                                                      const CostModel& model,
                                                      const JointOptions& opts) {
  DpOptions d;
  d.csf_order = opts.csf_order;

  // Path lists stay small up to 8 inputs and are worth materializing so the
  // per-path searches can run in parallel; above that, stream them.
  if (spec.num_inputs() <= 8) {
    std::vector<ContractionPath> paths = enumerate_paths(spec);
    if (opts.use_depth_filter) paths = filter_min_depth(paths);

    std::vector<SearchResult> results(paths.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (int p = 0; p < static_cast<int>(paths.size()); ++p)
      results[p] = order_dp(spec, paths[p], model, d);

    size_t win = 0;
    for (size_t p = 1; p < paths.size(); ++p)
      if (candidate_less(results[p].best, results[win].best)) win = p;
    return {paths[win], results[win]};
  }

  int min_depth = std::numeric_limits<int>::max();
  if (opts.use_depth_filter)
    for_each_path(spec,
                  [&](const ContractionPath& p) { min_depth = std::min(min_depth, max_loop_depth(p)); });
  ContractionPath best_path;
  SearchResult best;
  for_each_path(spec, [&](const ContractionPath& p) {
    if (opts.use_depth_filter && max_loop_depth(p) != min_depth) return;
    SearchResult r = order_dp(spec, p, model, d);
    if (candidate_less(r.best, best.best)) {
      best = std::move(r);
      best_path = p;
    }
  });
  return {best_path, best};
}

}  // namespace spttn
