#include "spttn/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

#include "spttn/micro_kernels.hpp"

namespace spttn {

namespace {
using Clock = std::chrono::steady_clock;
}

std::string hook_kind_name(HookKind k) {
  switch (k) {
    case HookKind::None: return "none";
    case HookKind::VectorAccumulate: return "vector-accumulate";
    case HookKind::Rank1Update: return "rank-1-update";
  }
  return "none";
}

namespace {

enum class OperandKind { SparseValue, DenseInput, Buffer, OutputDense, OutputSparse };

struct Access {
  OperandKind kind = OperandKind::DenseInput;
  int slot = -1;                                // dense input id or buffer id
  std::vector<std::pair<int, int64_t>> addr;    // (index id, stride)

  int64_t stride_of(int id) const {
    for (const auto& [i, s] : addr)
      if (i == id) return s;
    return 0;
  }
  bool uses(int id) const {
    for (const auto& [i, s] : addr)
      if (i == id) return true;
    return false;
  }
};

struct TermOps {
  Access lhs, rhs, out;
};

struct HookExec {
  HookKind kind = HookKind::None;
  int term = -1;
  std::vector<int> span;  // outermost..innermost covered indices
  // axpy
  int64_t len = 0;
  int64_t out_inc = 0, vec_inc = 0;
  bool vec_is_lhs = false;
  // rank1
  int64_t m = 0, n = 0;
  int64_t x_inc = 0, y_inc = 0, out_row = 0, out_col = 0;
  bool x_is_lhs = false;
};

}  // namespace

class ExecPlanImpl {
 public:
  KernelSpec spec;
  ContractionPath path;
  LoopOrder order;
  FusedLoopForest forest;
  ExecInputs inputs;
  ExecOptions opts;
  std::vector<TermHook> term_hooks;

  std::vector<TermOps> ops;                    // per term
  std::vector<std::vector<double>> buf_data;   // per buffer
  std::vector<std::vector<int>> node_resets;   // per node: buffer ids
  std::vector<int> node_hook;                  // per node: index into hooks or -1
  std::vector<HookExec> hooks;
  std::unordered_map<int64_t, int64_t> leaf_lookup;  // packed coord -> leaf
  bool need_leaf_lookup = false;
  std::vector<int64_t> mode_key_stride;        // packing strides for lookup
  int64_t total_buffer_bytes = 0;

  // ---- execution state ----
  std::vector<int64_t> ival;  // per index id
  std::vector<int64_t> pos;   // per CSF level
  DenseTensor out_dense;
  std::vector<double> out_sparse;
  ExecStats stats;

  const CsfTensor& csf() const { return *inputs.sparse; }

  void run();
  void exec_node(int n);
  void exec_leaf(int term);
  void exec_hook(const HookExec& h);
  double read(const Access& a) const;
  int64_t offset(const Access& a) const {
    int64_t off = 0;
    for (const auto& [id, stride] : a.addr) off += ival[id] * stride;
    return off;
  }
};

const FusedLoopForest& ExecPlan::forest() const { return impl->forest; }
const std::vector<TermHook>& ExecPlan::hooks() const { return impl->term_hooks; }
int64_t ExecPlan::total_buffer_bytes() const { return impl->total_buffer_bytes; }

namespace {

void validate_inputs(const KernelSpec& spec, const ExecInputs& inputs) {
  const int n = spec.num_inputs();
  if (inputs.sparse == nullptr) throw std::invalid_argument("execute: missing sparse tensor");
  const auto& sp = spec.sparse_input();
  const CsfTensor& csf = *inputs.sparse;
  if (csf.order() != static_cast<int64_t>(sp.indices.size()))
    throw std::invalid_argument("execute: sparse tensor order mismatch");
  for (size_t l = 0; l < sp.indices.size(); ++l) {
    if (csf.modes[l].name != spec.index_names[sp.indices[l]])
      throw std::invalid_argument("execute: CSF mode order must match the kernel's sparse index order");
    if (csf.modes[l].dim != spec.dim(sp.indices[l]))
      throw std::invalid_argument("execute: sparse tensor dimension mismatch on " + csf.modes[l].name);
  }
  if (static_cast<int>(inputs.dense.size()) != n - 1)
    throw std::invalid_argument("execute: expected " + std::to_string(n - 1) + " dense inputs");
  for (int t = 1; t < n; ++t) {
    const auto& ref = spec.tensors[t];
    const DenseTensor& d = *inputs.dense[t - 1];
    if (d.order() != static_cast<int64_t>(ref.indices.size()))
      throw std::invalid_argument("execute: dense tensor order mismatch for " + ref.name);
    for (size_t k = 0; k < ref.indices.size(); ++k) {
      if (d.indices[k].name != spec.index_names[ref.indices[k]] ||
          d.indices[k].dim != spec.dim(ref.indices[k]))
        throw std::invalid_argument("execute: dense tensor shape mismatch for " + ref.name);
    }
    if (d.size() != static_cast<int64_t>(d.values.size()))
      throw std::invalid_argument("execute: dense tensor value count mismatch for " + ref.name);
  }
}

Access make_tensor_access(const KernelSpec& spec, const std::vector<int>& idx_ids,
                          OperandKind kind, int slot) {
  Access a;
  a.kind = kind;
  a.slot = slot;
  int64_t stride = 1;
  a.addr.resize(idx_ids.size());
  for (int k = static_cast<int>(idx_ids.size()) - 1; k >= 0; --k) {
    a.addr[k] = {idx_ids[k], stride};
    stride *= spec.dim(idx_ids[k]);
  }
  return a;
}

// Affine flattening: the span (outer..inner) maps to a single stride when
// each outer stride equals the next inner stride times that dimension.
bool affine_over(const KernelSpec& spec, const Access& a, const std::vector<int>& span,
                 int64_t* inc_out) {
  for (int id : span)
    if (!a.uses(id)) return false;
  int64_t inc = a.stride_of(span.back());
  for (int k = static_cast<int>(span.size()) - 2; k >= 0; --k) {
    if (a.stride_of(span[k]) != a.stride_of(span[k + 1]) * spec.dim(span[k + 1])) return false;
  }
  *inc_out = inc;
  return true;
}

}  // namespace

ExecPlan prepare(const KernelSpec& spec, const ContractionPath& path, const LoopOrder& order,
                 const ExecInputs& inputs, const ExecOptions& opts) {
  validate_inputs(spec, inputs);
  std::vector<int> csf_order = default_csf_order(spec);
  if (!order_admissible(spec, path, order, csf_order))
    throw unsupported_order_error(
        "prepare: loop order does not keep the sparse tensor's indices in CSF order");

  auto impl = std::make_shared<ExecPlanImpl>();
  impl->spec = spec;
  impl->path = path;
  impl->order = order;
  impl->inputs = inputs;
  impl->opts = opts;
  impl->forest = build_forest(spec, path, order);
  const FusedLoopForest& forest = impl->forest;
  const int N = path.num_terms();
  const int n = spec.num_inputs();

  // Buffers.
  auto dims = buffer_dims(spec, forest);
  impl->buf_data.resize(forest.buffers.size());
  for (size_t b = 0; b < forest.buffers.size(); ++b) {
    const int64_t bytes = dims[b].size * static_cast<int64_t>(sizeof(double));
    impl->total_buffer_bytes += bytes;
    if (impl->total_buffer_bytes > opts.buffer_limit_bytes)
      throw resource_error("prepare: intermediate buffers exceed the buffer byte limit");
    impl->buf_data[b].assign(dims[b].size, 0.0);
  }

  // Operand addressing per term.
  auto handle_access = [&](int handle, bool is_out) {
    if (handle == 0) return Access{OperandKind::SparseValue, 0, {}};
    if (handle < n)
      return make_tensor_access(spec, spec.tensors[handle].indices, OperandKind::DenseInput,
                                handle);
    if (handle == n + N - 1) {
      if (spec.output_sparse) {
        (void)is_out;
        return Access{OperandKind::OutputSparse, 0, {}};
      }
      return make_tensor_access(spec, spec.output().indices, OperandKind::OutputDense, 0);
    }
    const int b = handle - n;
    return make_tensor_access(spec, forest.buffers[b].indices, OperandKind::Buffer, b);
  };
  for (int t = 0; t < N; ++t) {
    TermOps to;
    to.lhs = handle_access(path.terms[t].lhs_id, false);
    to.rhs = handle_access(path.terms[t].rhs_id, false);
    to.out = handle_access(path.terms[t].out_id, true);
    impl->ops.push_back(std::move(to));
  }

  // Reset lists: a buffer is zeroed on entry of the topmost node covering its
  // producer but not its consumer.
  impl->node_resets.resize(forest.nodes.size());
  for (size_t b = 0; b < forest.buffers.size(); ++b) {
    const auto& buf = forest.buffers[b];
    for (size_t nid = 0; nid < forest.nodes.size(); ++nid) {
      const ForestNode& nd = forest.nodes[nid];
      if (buf.producer < nd.term_begin || buf.producer >= nd.term_end) continue;
      if (buf.consumer >= nd.term_begin && buf.consumer < nd.term_end) continue;
      bool topmost = nd.parent == -1;
      if (!topmost) {
        const ForestNode& p = forest.nodes[nd.parent];
        topmost = buf.consumer >= p.term_begin && buf.consumer < p.term_end;
      }
      if (topmost) impl->node_resets[nid].push_back(static_cast<int>(b));
    }
  }

  // Offload hooks over each term's trailing chain of private dense loops.
  impl->node_hook.assign(forest.nodes.size(), -1);
  impl->term_hooks.assign(N, TermHook{});
  for (int t = 0; t < N; ++t) {
    std::vector<int> chain_nodes;  // innermost..outermost
    int leaf = -1;
    for (size_t nid = 0; nid < forest.nodes.size(); ++nid)
      if (forest.nodes[nid].is_leaf && forest.nodes[nid].term == t) leaf = static_cast<int>(nid);
    for (int cur = forest.nodes[leaf].parent; cur != -1; cur = forest.nodes[cur].parent) {
      const ForestNode& nd = forest.nodes[cur];
      if (nd.sparse || nd.term_end - nd.term_begin != 1) break;
      chain_nodes.push_back(cur);
    }
    const int chain_len = static_cast<int>(chain_nodes.size());
    if (chain_len == 0) continue;
    std::vector<int> chain_ids(chain_len);  // outermost..innermost
    for (int k = 0; k < chain_len; ++k)
      chain_ids[k] = forest.nodes[chain_nodes[chain_len - 1 - k]].index;

    const TermOps& to = impl->ops[t];
    const IndexSet out_set = path.terms[t].out;
    auto in_out = [&](int id) { return contains(out_set, id); };

    HookExec h;
    h.term = t;
    auto try_axpy = [&](int L) {
      if (to.out.kind == OperandKind::OutputSparse) return;
      std::vector<int> span(chain_ids.end() - L, chain_ids.end());
      for (int id : span)
        if (!in_out(id)) return;
      const bool in_lhs = std::any_of(span.begin(), span.end(),
                                      [&](int id) { return to.lhs.uses(id); });
      const bool in_rhs = std::any_of(span.begin(), span.end(),
                                      [&](int id) { return to.rhs.uses(id); });
      if (in_lhs == in_rhs) return;  // both or neither touch the span
      const Access& vec = in_lhs ? to.lhs : to.rhs;
      if (vec.kind == OperandKind::SparseValue) return;
      int64_t vinc = 0, oinc = 0;
      if (!affine_over(spec, vec, span, &vinc)) return;
      if (!affine_over(spec, to.out, span, &oinc)) return;
      h.kind = HookKind::VectorAccumulate;
      h.span = span;
      h.vec_is_lhs = in_lhs;
      h.vec_inc = vinc;
      h.out_inc = oinc;
      h.len = 1;
      for (int id : span) h.len *= spec.dim(id);
    };
    // Prefer the widest flattenable vector-accumulate, then a rank-1 update,
    // then a single-index vector-accumulate.
    for (int L = chain_len; L >= 2 && h.kind == HookKind::None; --L) try_axpy(L);
    if (h.kind == HookKind::None && chain_len >= 2 && to.out.kind != OperandKind::OutputSparse) {
      const int p = chain_ids[chain_len - 2];
      const int q = chain_ids[chain_len - 1];
      if (in_out(p) && in_out(q)) {
        const bool lhs_p = to.lhs.uses(p), lhs_q = to.lhs.uses(q);
        const bool rhs_p = to.rhs.uses(p), rhs_q = to.rhs.uses(q);
        bool x_is_lhs = false;
        bool ok = false;
        if (lhs_p && !lhs_q && rhs_q && !rhs_p) {
          x_is_lhs = true;
          ok = true;
        } else if (rhs_p && !rhs_q && lhs_q && !lhs_p) {
          x_is_lhs = false;
          ok = true;
        }
        if (ok && to.lhs.kind != OperandKind::SparseValue &&
            to.rhs.kind != OperandKind::SparseValue) {
          const Access& x = x_is_lhs ? to.lhs : to.rhs;
          const Access& y = x_is_lhs ? to.rhs : to.lhs;
          h.kind = HookKind::Rank1Update;
          h.span = {p, q};
          h.x_is_lhs = x_is_lhs;
          h.m = spec.dim(p);
          h.n = spec.dim(q);
          h.x_inc = x.stride_of(p);
          h.y_inc = y.stride_of(q);
          h.out_row = to.out.stride_of(p);
          h.out_col = to.out.stride_of(q);
        }
      }
    }
    if (h.kind == HookKind::None) try_axpy(1);
    if (h.kind == HookKind::None) continue;

    const int span_len = static_cast<int>(h.span.size());
    // Hook must not hide a reset buried inside the covered vertices.
    bool buried_reset = false;
    for (int k = 0; k + 1 < span_len; ++k)
      if (!impl->node_resets[chain_nodes[k]].empty()) buried_reset = true;
    if (buried_reset) continue;

    const int hook_node = chain_nodes[span_len - 1];
    impl->hooks.push_back(h);
    impl->node_hook[hook_node] = static_cast<int>(impl->hooks.size()) - 1;
    impl->term_hooks[t] = TermHook{h.kind, span_len, chain_len - span_len};
  }

  // Sparse-output kernels whose final term iterates some modes densely need
  // a coordinate -> leaf lookup to place writes.
  if (spec.output_sparse) {
    const int last = N - 1;
    int sparse_on_path = 0;
    for (int v : forest.path_of_term(last))
      if (forest.nodes[v].sparse) ++sparse_on_path;
    if (sparse_on_path < static_cast<int>(csf_order.size())) {
      impl->need_leaf_lookup = true;
      const CsfTensor& csf = *inputs.sparse;
      impl->mode_key_stride.resize(csf.order());
      int64_t stride = 1;
      for (int64_t l = csf.order() - 1; l >= 0; --l) {
        impl->mode_key_stride[l] = stride;
        stride *= csf.modes[l].dim;
      }
      CooTensor coo = csf_to_coo(csf);
      for (int64_t e = 0; e < coo.nnz(); ++e) {
        int64_t key = 0;
        for (int64_t l = 0; l < csf.order(); ++l)
          key += coo.entries[e].first[l] * impl->mode_key_stride[l];
        impl->leaf_lookup.emplace(key, e);
      }
    }
  }

  ExecPlan plan;
  plan.impl = std::move(impl);
  return plan;
}

double ExecPlanImpl::read(const Access& a) const {
  switch (a.kind) {
    case OperandKind::SparseValue:
      return csf().values[pos[csf().order() - 1]];
    case OperandKind::DenseInput:
      return inputs.dense[a.slot - 1]->values[offset(a)];
    case OperandKind::Buffer:
      return buf_data[a.slot][offset(a)];
    case OperandKind::OutputDense:
      return out_dense.values[offset(a)];
    case OperandKind::OutputSparse:
      return 0.0;  // never an input
  }
  return 0.0;
}

void ExecPlanImpl::exec_leaf(int term) {
  const TermOps& to = ops[term];
  const double v = read(to.lhs) * read(to.rhs);
  stats.multiply_adds += 2;
  if (to.out.kind == OperandKind::OutputSparse) {
    if (need_leaf_lookup) {
      int64_t key = 0;
      const auto& modes = spec.sparse_input().indices;
      for (size_t l = 0; l < modes.size(); ++l) key += ival[modes[l]] * mode_key_stride[l];
      auto it = leaf_lookup.find(key);
      if (it != leaf_lookup.end()) out_sparse[it->second] += v;
      // Off-pattern coordinates only ever produce exact zeros.
    } else {
      out_sparse[pos[csf().order() - 1]] += v;
    }
    return;
  }
  double* dst = to.out.kind == OperandKind::OutputDense ? out_dense.values.data()
                                                        : buf_data[to.out.slot].data();
  dst[offset(to.out)] += v;
}

void ExecPlanImpl::exec_hook(const HookExec& h) {
  const TermOps& to = ops[h.term];
  // Span indices contribute only through the kernel strides.
  for (int id : h.span) ival[id] = 0;
  if (h.kind == HookKind::VectorAccumulate) {
    const Access& vec = h.vec_is_lhs ? to.lhs : to.rhs;
    const Access& sca = h.vec_is_lhs ? to.rhs : to.lhs;
    const double alpha = read(sca);
    const double* x = nullptr;
    switch (vec.kind) {
      case OperandKind::DenseInput: x = inputs.dense[vec.slot - 1]->values.data(); break;
      case OperandKind::Buffer: x = buf_data[vec.slot].data(); break;
      case OperandKind::OutputDense: x = out_dense.values.data(); break;
      default: break;
    }
    x += offset(vec);
    double* y = (to.out.kind == OperandKind::OutputDense ? out_dense.values.data()
                                                         : buf_data[to.out.slot].data()) +
                offset(to.out);
    scaled_vector_accumulate(h.len, alpha, x, h.vec_inc, y, h.out_inc);
    stats.multiply_adds += 2 * h.len;
    return;
  }
  const Access& xa = h.x_is_lhs ? to.lhs : to.rhs;
  const Access& ya = h.x_is_lhs ? to.rhs : to.lhs;
  auto base = [&](const Access& a) -> const double* {
    switch (a.kind) {
      case OperandKind::DenseInput: return inputs.dense[a.slot - 1]->values.data() + offset(a);
      case OperandKind::Buffer: return buf_data[a.slot].data() + offset(a);
      case OperandKind::OutputDense: return out_dense.values.data() + offset(a);
      default: return nullptr;
    }
  };
  const double* x = base(xa);
  const double* y = base(ya);
  double* out = (to.out.kind == OperandKind::OutputDense ? out_dense.values.data()
                                                         : buf_data[to.out.slot].data()) +
                offset(to.out);
  rank1_update(h.m, h.n, x, h.x_inc, y, h.y_inc, out, h.out_row, h.out_col);
  stats.multiply_adds += 2 * h.m * h.n;
}

void ExecPlanImpl::exec_node(int n) {
  const ForestNode& nd = forest.nodes[n];
  for (int b : node_resets[n]) {
    std::fill(buf_data[b].begin(), buf_data[b].end(), 0.0);
    ++stats.buffer_resets[b];
    if (opts.observer)
      opts.observer->on_producer_entry(b, buf_data[b].data(),
                                       static_cast<int64_t>(buf_data[b].size()));
  }
  if (nd.is_leaf) {
    exec_leaf(nd.term);
    return;
  }
  if (node_hook[n] >= 0) {
    exec_hook(hooks[node_hook[n]]);
    return;
  }
  if (nd.sparse) {
    const CsfTensor& t = csf();
    const int lvl = nd.csf_level;
    int64_t lo = 0, hi = static_cast<int64_t>(t.idx[0].size());
    if (lvl > 0) {
      lo = t.ptr[lvl - 1][pos[lvl - 1]];
      hi = t.ptr[lvl - 1][pos[lvl - 1] + 1];
    }
    for (int64_t p = lo; p < hi; ++p) {
      pos[lvl] = p;
      ival[nd.index] = t.idx[lvl][p];
      for (int c : nd.children) exec_node(c);
    }
    return;
  }
  const int64_t dim = spec.dim(nd.index);
  for (int64_t v = 0; v < dim; ++v) {
    ival[nd.index] = v;
    for (int c : nd.children) exec_node(c);
  }
}

void ExecPlanImpl::run() {
  stats = ExecStats{};
  stats.buffer_resets.assign(buf_data.size(), 0);
  stats.peak_buffer_bytes = total_buffer_bytes;
  ival.assign(spec.num_indices(), 0);
  pos.assign(csf().order(), 0);
  for (auto& b : buf_data) std::fill(b.begin(), b.end(), 0.0);
  if (spec.output_sparse) {
    out_sparse.assign(csf().nnz(), 0.0);
  } else {
    std::vector<Index> oidx;
    for (int id : spec.output().indices)
      oidx.push_back(Index{spec.index_names[id], spec.dim(id)});
    out_dense = DenseTensor(oidx);
  }
  for (int r : forest.roots) exec_node(r);
}

ExecResult execute(ExecPlan& plan) {
  const auto start = Clock::now();
  ExecPlanImpl& impl = *plan.impl;
  impl.run();
  ExecResult res;
  res.dense_out = std::move(impl.out_dense);
  res.sparse_out_values = std::move(impl.out_sparse);
  res.stats = impl.stats;
  res.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

ExecResult execute_unfactorized(const KernelSpec& spec, const ExecInputs& inputs) {
  validate_inputs(spec, inputs);
  const auto start = Clock::now();
  const CsfTensor& csf = *inputs.sparse;
  const int n = spec.num_inputs();
  const int d = static_cast<int>(csf.order());

  // Free dense indices in first-appearance order.
  const IndexSet modes = spec.sparse_modes();
  std::vector<int> free_ids;
  for (const auto& t : spec.tensors) {
    for (int id : t.indices)
      if (!contains(modes, id) &&
          std::find(free_ids.begin(), free_ids.end(), id) == free_ids.end())
        free_ids.push_back(id);
  }

  std::vector<Access> dacc;  // per dense input
  for (int t = 1; t < n; ++t) {
    Access a;
    a.slot = t;
    int64_t stride = 1;
    const auto& ids = spec.tensors[t].indices;
    a.addr.resize(ids.size());
    for (int k = static_cast<int>(ids.size()) - 1; k >= 0; --k) {
      a.addr[k] = {ids[k], stride};
      stride *= spec.dim(ids[k]);
    }
    dacc.push_back(a);
  }
  Access oacc;
  if (!spec.output_sparse) {
    int64_t stride = 1;
    const auto& ids = spec.output().indices;
    oacc.addr.resize(ids.size());
    for (int k = static_cast<int>(ids.size()) - 1; k >= 0; --k) {
      oacc.addr[k] = {ids[k], stride};
      stride *= spec.dim(ids[k]);
    }
  }

  ExecResult res;
  if (spec.output_sparse) {
    res.sparse_out_values.assign(csf.nnz(), 0.0);
  } else {
    std::vector<Index> oidx;
    for (int id : spec.output().indices)
      oidx.push_back(Index{spec.index_names[id], spec.dim(id)});
    res.dense_out = DenseTensor(oidx);
  }

  std::vector<int64_t> ival(spec.num_indices(), 0);
  std::vector<int64_t> pos(d, 0);
  auto off = [&](const Access& a) {
    int64_t o = 0;
    for (const auto& [id, s] : a.addr) o += ival[id] * s;
    return o;
  };

  // CSF levels outermost, free dense indices nested inside, all factors
  // multiplied in the innermost body.
  auto body = [&]() {
    double v = csf.values[pos[d - 1]];
    for (const auto& a : dacc) v *= inputs.dense[a.slot - 1]->values[off(a)];
    res.stats.multiply_adds += n;
    if (spec.output_sparse)
      res.sparse_out_values[pos[d - 1]] += v;
    else
      res.dense_out.values[off(oacc)] += v;
  };

  auto dense_loop = [&](auto&& self, size_t k) -> void {
    if (k == free_ids.size()) {
      body();
      return;
    }
    const int id = free_ids[k];
    for (int64_t v = 0; v < spec.dim(id); ++v) {
      ival[id] = v;
      self(self, k + 1);
    }
  };

  auto sparse_loop = [&](auto&& self, int lvl) -> void {
    if (lvl == d) {
      dense_loop(dense_loop, 0);
      return;
    }
    int64_t lo = 0, hi = static_cast<int64_t>(csf.idx[0].size());
    if (lvl > 0) {
      lo = csf.ptr[lvl - 1][pos[lvl - 1]];
      hi = csf.ptr[lvl - 1][pos[lvl - 1] + 1];
    }
    const int id = spec.sparse_input().indices[lvl];
    for (int64_t p = lo; p < hi; ++p) {
      pos[lvl] = p;
      ival[id] = csf.idx[lvl][p];
      self(self, lvl + 1);
    }
  };
  sparse_loop(sparse_loop, 0);

  res.stats.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return res;
}

int64_t flops_estimate(const KernelSpec& spec, const ContractionPath& path,
                       const LoopOrder& order, const CsfTensor& csf) {
  std::vector<int> csf_order = default_csf_order(spec);
  if (!order_admissible(spec, path, order, csf_order))
    throw unsupported_order_error(
        "flops_estimate: order skips CSF levels (merged-subtree iteration is unsupported)");
  FusedLoopForest forest = build_forest(spec, path, order);
  int64_t total = 0;
  for (int t = 0; t < path.num_terms(); ++t) {
    int deepest = 0;  // deepest CSF level iterated on this term's path (1-based)
    int64_t dense_prod = 1;
    for (int v : forest.path_of_term(t)) {
      const ForestNode& nd = forest.nodes[v];
      if (nd.sparse)
        deepest = std::max(deepest, nd.csf_level + 1);
      else
        dense_prod *= spec.dim(nd.index);
    }
    const int64_t sparse_trips = deepest == 0 ? 1 : nnz_at_level(csf, deepest);
    total += 2 * sparse_trips * dense_prod;
  }
  return total;
}

int64_t flops_unfactorized(const KernelSpec& spec, const CsfTensor& csf) {
  const IndexSet modes = spec.sparse_modes();
  int64_t dense_prod = 1;
  for (int id = 0; id < spec.num_indices(); ++id)
    if (!contains(modes, id)) dense_prod *= spec.dim(id);
  return spec.num_inputs() * csf.nnz() * dense_prod;
}

}  // namespace spttn
