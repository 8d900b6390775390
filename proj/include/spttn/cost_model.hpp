#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "spttn/contraction_path.hpp"
#include "spttn/kernel_spec.hpp"
#include "spttn/loop_nest.hpp"

namespace spttn {

/// Totally ordered cost: a lexicographic tuple of integers, with an explicit
/// infinity for infeasible subproblems. Scalar models use arity 1.
struct CostValue {
  std::vector<int64_t> v;
  bool inf = false;

  static CostValue infinity() { return CostValue{{}, true}; }

  bool operator==(const CostValue& o) const { return inf == o.inf && (inf || v == o.v); }
  bool operator<(const CostValue& o) const {
    if (inf != o.inf) return !inf;
    if (inf) return false;
    return v < o.v;
  }
  std::string to_string() const;
};

/// Everything phi may inspect when applied at a root index q covering the
/// first `split` terms of the subproblem [begin, end): the original term
/// sets, the already-iterated (removed) indices, and the kernel.
struct RootCtx {
  const KernelSpec& spec;
  const ContractionPath& path;
  int begin = 0, end = 0;  // current subproblem's term range
  int split = 0;           // terms [begin, begin+split) lie under q
  IndexSet removed = 0;    // ancestor loop indices (q excluded)
  int q = -1;              // root index id

  /// max over buffer edges leaving the q-subtree of |K3| (current sets).
  int cross_edge_max_dim() const;
  /// same with the product of K3's dimensions; 0 when no edge crosses.
  int64_t cross_edge_max_size() const;
};

/// Tree-separable cost function: phi applied at each loop vertex, combine
/// across sibling trees, identity for the empty forest, and a per-leaf seed
/// (identity for all models except the dense-loops metric).
class CostModel {
 public:
  virtual ~CostModel() = default;
  virtual std::string name() const = 0;
  virtual CostValue identity() const = 0;
  virtual CostValue leaf_value(int /*term*/) const { return identity(); }
  virtual CostValue combine(const CostValue& a, const CostValue& b) const = 0;
  virtual CostValue phi(const RootCtx& ctx, const CostValue& x) const = 0;
};

/// Maximum buffer dimension passed through any loop vertex.
std::unique_ptr<CostModel> max_buffer_dim_model();

/// Maximum buffer element count (product of K3 dimensions; scalar buffer 1).
std::unique_ptr<CostModel> max_buffer_size_model();

/// Cache misses: phi(x) = I(q) * (tau + x) with tau counting operand/result
/// index sets v of covered terms with q in v and |v| > D; combine is +.
std::unique_ptr<CostModel> cache_miss_model(int64_t D);

/// Composite framework metric: lexicographic
/// (buffer-dim-bound violation, -sum of trailing dense chain lengths,
///  -count of chains still open at the forest roots); smaller is better.
std::unique_ptr<CostModel> dense_loop_metric(int max_buffer_dim_bound);

/// Parses "max-buf-dim", "max-buf-size", "cache:D=<d>",
/// "dense-loops:bound=<b>".
std::unique_ptr<CostModel> parse_cost_model(const std::string& text);

/// Recursive evaluation of f over the peeling structure of `order`.
CostValue eval_cost(const CostModel& model, const KernelSpec& spec, const ContractionPath& path,
                    const LoopOrder& order);

/// Direct bottom-up evaluation on a materialized forest; must agree with
/// eval_cost.
CostValue eval_cost_on_forest(const CostModel& model, const KernelSpec& spec,
                              const ContractionPath& path, const FusedLoopForest& forest);

}  // namespace spttn
