#include "spttn/cost_model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace spttn {

std::string CostValue::to_string() const {
  if (inf) return "inf";
  std::ostringstream os;
  if (v.size() == 1) {
    os << v[0];
    return os.str();
  }
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) os << ",";
    os << v[i];
  }
  os << ")";
  return os.str();
}

int RootCtx::cross_edge_max_dim() const {
  int best = 0;
  for (int t = begin; t < begin + split; ++t) {
    const int c = path.consumer_of(t);
    if (c < begin + split || c >= end) continue;
    best = std::max(best, set_size(path.terms[t].out & ~removed));
  }
  return best;
}

int64_t RootCtx::cross_edge_max_size() const {
  int64_t best = 0;
  for (int t = begin; t < begin + split; ++t) {
    const int c = path.consumer_of(t);
    if (c < begin + split || c >= end) continue;
    int64_t sz = 1;
    for (int id : set_elements(path.terms[t].out & ~removed)) sz *= spec.dim(id);
    best = std::max(best, sz);
  }
  return best;
}

namespace {

class MaxBufferDimModel : public CostModel {
 public:
  std::string name() const override { return "max-buf-dim"; }
  CostValue identity() const override { return CostValue{{0}}; }
  CostValue combine(const CostValue& a, const CostValue& b) const override {
    if (a.inf || b.inf) return CostValue::infinity();
    return CostValue{{std::max(a.v[0], b.v[0])}};
  }
  CostValue phi(const RootCtx& ctx, const CostValue& x) const override {
    if (x.inf) return x;
    return CostValue{{std::max<int64_t>(ctx.cross_edge_max_dim(), x.v[0])}};
  }
};

class MaxBufferSizeModel : public CostModel {
 public:
  std::string name() const override { return "max-buf-size"; }
  CostValue identity() const override { return CostValue{{0}}; }
  CostValue combine(const CostValue& a, const CostValue& b) const override {
    if (a.inf || b.inf) return CostValue::infinity();
    return CostValue{{std::max(a.v[0], b.v[0])}};
  }
  CostValue phi(const RootCtx& ctx, const CostValue& x) const override {
    if (x.inf) return x;
    return CostValue{{std::max(ctx.cross_edge_max_size(), x.v[0])}};
  }
};

class CacheMissModel : public CostModel {
 public:
  explicit CacheMissModel(int64_t D) : d_(D) {
    if (D < 0) throw std::invalid_argument("cache model: D must be >= 0");
  }
  std::string name() const override { return "cache:D=" + std::to_string(d_); }
  CostValue identity() const override { return CostValue{{0}}; }
  CostValue combine(const CostValue& a, const CostValue& b) const override {
    if (a.inf || b.inf) return CostValue::infinity();
    return CostValue{{a.v[0] + b.v[0]}};
  }
  CostValue phi(const RootCtx& ctx, const CostValue& x) const override {
    if (x.inf) return x;
    int64_t tau = 0;
    for (int t = ctx.begin; t < ctx.begin + ctx.split; ++t) {
      const auto& term = ctx.path.terms[t];
      for (IndexSet v : {term.lhs, term.rhs, term.out}) {
        const IndexSet cur = v & ~ctx.removed;
        if (contains(cur, ctx.q) && set_size(cur) > d_) ++tau;
      }
    }
    return CostValue{{ctx.spec.dim(ctx.q) * (tau + x.v[0])}};
  }

 private:
  int64_t d_;
};

// Value layout: (violating buffer edges, -sum of chain lengths, -open chain
// count), compared lexicographically. A chain counts a term's trailing run
// of independent dense loops: vertices private to that term (the offloadable
// ones). Chains stay open while every vertex from the leaf upward is private
// and dense; the first sparse or shared vertex above closes them.
//
// Violations are counted per edge rather than kept as a 0/1 flag: combine
// must stay monotone in the lexicographic order, which componentwise
// addition is and a max-flag mixed with sums is not. Every buffer edge is
// scored exactly once, at the split separating its producer from its
// consumer.
class DenseLoopMetric : public CostModel {
 public:
  explicit DenseLoopMetric(int bound) : bound_(bound) {
    if (bound < 0) throw std::invalid_argument("dense-loops metric: bound must be >= 0");
  }
  std::string name() const override { return "dense-loops:bound=" + std::to_string(bound_); }
  CostValue identity() const override { return CostValue{{0, 0, 0}}; }
  CostValue leaf_value(int) const override { return CostValue{{0, 0, -1}}; }
  CostValue combine(const CostValue& a, const CostValue& b) const override {
    if (a.inf || b.inf) return CostValue::infinity();
    return CostValue{{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2]}};
  }
  CostValue phi(const RootCtx& ctx, const CostValue& x) const override {
    if (x.inf) return x;
    int64_t viol = x.v[0];
    for (int t = ctx.begin; t < ctx.begin + ctx.split; ++t) {
      const int c = ctx.path.consumer_of(t);
      if (c < ctx.begin + ctx.split || c >= ctx.end) continue;
      if (set_size(ctx.path.terms[t].out & ~ctx.removed) > bound_) ++viol;
    }
    const bool sparse = contains(ctx.spec.sparse_modes(), ctx.q) &&
                        [&] {
                          const int st = ctx.path.sparse_term();
                          return st >= ctx.begin && st < ctx.begin + ctx.split;
                        }();
    if (sparse || ctx.split > 1) return CostValue{{viol, x.v[1], 0}};
    // A private dense loop grows the covered term's open chain.
    return CostValue{{viol, x.v[1] + x.v[2], x.v[2]}};
  }

 private:
  int bound_;
};

}  // namespace

std::unique_ptr<CostModel> max_buffer_dim_model() { return std::make_unique<MaxBufferDimModel>(); }
std::unique_ptr<CostModel> max_buffer_size_model() {
  return std::make_unique<MaxBufferSizeModel>();
}
std::unique_ptr<CostModel> cache_miss_model(int64_t D) {
  return std::make_unique<CacheMissModel>(D);
}
std::unique_ptr<CostModel> dense_loop_metric(int max_buffer_dim_bound) {
  return std::make_unique<DenseLoopMetric>(max_buffer_dim_bound);
}

std::unique_ptr<CostModel> parse_cost_model(const std::string& text) {
  if (text == "max-buf-dim") return max_buffer_dim_model();
  if (text == "max-buf-size") return max_buffer_size_model();
  const std::string cache_prefix = "cache:D=";
  if (text.rfind(cache_prefix, 0) == 0)
    return cache_miss_model(std::stoll(text.substr(cache_prefix.size())));
  const std::string dense_prefix = "dense-loops:bound=";
  if (text.rfind(dense_prefix, 0) == 0)
    return dense_loop_metric(std::stoi(text.substr(dense_prefix.size())));
  throw std::invalid_argument("unknown cost model '" + text +
                              "' (expected max-buf-dim, max-buf-size, cache:D=<d>, "
                              "dense-loops:bound=<b>)");
}

namespace {

struct OrderEval {
  const CostModel& model;
  const KernelSpec& spec;
  const ContractionPath& path;
  const LoopOrder& order;
  std::vector<size_t> pos;

  CostValue eval(int b, int e, IndexSet removed) {
    if (b == e) return model.identity();
    if (pos[b] >= order.per_term[b].size()) {
      size_t saved = pos[b];
      CostValue rest = eval(b + 1, e, removed);
      pos[b] = saved;
      return model.combine(model.leaf_value(b), rest);
    }
    const int q = order.per_term[b][pos[b]];
    int s = 0;
    while (b + s < e && pos[b + s] < order.per_term[b + s].size() &&
           order.per_term[b + s][pos[b + s]] == q)
      ++s;
    std::vector<size_t> saved(pos.begin() + b, pos.begin() + b + s);
    for (int t = b; t < b + s; ++t) ++pos[t];
    CostValue inner = eval(b, b + s, removed | set_of(q));
    for (int t = b; t < b + s; ++t) pos[t] = saved[t - b];
    RootCtx ctx{spec, path, b, e, s, removed, q};
    CostValue first = model.phi(ctx, inner);
    CostValue rest = eval(b + s, e, removed);
    return model.combine(first, rest);
  }
};

struct ForestEval {
  const CostModel& model;
  const KernelSpec& spec;
  const ContractionPath& path;
  const FusedLoopForest& forest;

  CostValue eval_nodes(const std::vector<int>& nodes, int scope_end, IndexSet removed) {
    CostValue acc = model.identity();
    for (int n : nodes) {
      const ForestNode& nd = forest.nodes[n];
      if (nd.is_leaf) {
        acc = model.combine(acc, model.leaf_value(nd.term));
        continue;
      }
      CostValue inner = eval_nodes(nd.children, nd.term_end, removed | set_of(nd.index));
      RootCtx ctx{spec, path, nd.term_begin, scope_end, nd.term_end - nd.term_begin,
                  removed, nd.index};
      acc = model.combine(acc, model.phi(ctx, inner));
    }
    return acc;
  }
};

}  // namespace

CostValue eval_cost(const CostModel& model, const KernelSpec& spec, const ContractionPath& path,
                    const LoopOrder& order) {
  OrderEval ev{model, spec, path, order, std::vector<size_t>(path.num_terms(), 0)};
  return ev.eval(0, path.num_terms(), 0);
}

CostValue eval_cost_on_forest(const CostModel& model, const KernelSpec& spec,
                              const ContractionPath& path, const FusedLoopForest& forest) {
  ForestEval ev{model, spec, path, forest};
  return ev.eval_nodes(forest.roots, path.num_terms(), 0);
}

}  // namespace spttn
