#include "spttn/loop_nest.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace spttn {

PeelResult peel(const LoopOrder& order) {
  if (order.per_term.empty() || order.per_term[0].empty())
    throw std::invalid_argument("peel: empty loop order");
  const int head = order.per_term[0][0];
  size_t r = 1;
  while (r < order.per_term.size() && !order.per_term[r].empty() &&
         order.per_term[r][0] == head)
    ++r;
  PeelResult res;
  for (size_t i = 0; i < r; ++i) {
    std::vector<int> tail(order.per_term[i].begin() + 1, order.per_term[i].end());
    if (!tail.empty()) res.first.per_term.push_back(std::move(tail));
  }
  for (size_t i = r; i < order.per_term.size(); ++i)
    res.rest.per_term.push_back(order.per_term[i]);
  return res;
}

std::vector<int> FusedLoopForest::path_of_term(int t) const {
  int leaf = -1;
  for (int n = 0; n < static_cast<int>(nodes.size()); ++n)
    if (nodes[n].is_leaf && nodes[n].term == t) leaf = n;
  std::vector<int> path;
  for (int n = nodes[leaf].parent; n != -1; n = nodes[n].parent) path.push_back(n);
  std::reverse(path.begin(), path.end());
  return path;
}

bool FusedLoopForest::fully_fused() const {
  auto check = [&](const std::vector<int>& kids) {
    for (size_t i = 0; i + 1 < kids.size(); ++i) {
      const ForestNode& a = nodes[kids[i]];
      const ForestNode& b = nodes[kids[i + 1]];
      if (!a.is_leaf && !b.is_leaf && a.index == b.index) return false;
    }
    return true;
  };
  if (!check(roots)) return false;
  for (const auto& n : nodes)
    if (!n.is_leaf && !check(n.children)) return false;
  return true;
}

namespace {

struct BuildItem {
  int term;
  const std::vector<int>* order;
  size_t pos;  // next index position within *order

  bool exhausted() const { return pos >= order->size(); }
  int head() const { return (*order)[pos]; }
};

struct Builder {
  const KernelSpec& spec;
  const ContractionPath& path;
  FusedLoopForest& forest;
  IndexSet modes;
  int sparse_term;
  std::vector<int> csf_level_of;  // index id -> CSF level or -1

  std::vector<int> build(std::vector<BuildItem> items, int parent) {
    std::vector<int> out;
    size_t i = 0;
    while (i < items.size()) {
      if (items[i].exhausted()) {
        int id = static_cast<int>(forest.nodes.size());
        ForestNode leaf;
        leaf.is_leaf = true;
        leaf.term = items[i].term;
        leaf.term_begin = items[i].term;
        leaf.term_end = items[i].term + 1;
        leaf.parent = parent;
        forest.nodes.push_back(leaf);
        out.push_back(id);
        ++i;
        continue;
      }
      const int head = items[i].head();
      size_t j = i;
      std::vector<BuildItem> group;
      while (j < items.size() && !items[j].exhausted() && items[j].head() == head) {
        BuildItem it = items[j];
        ++it.pos;
        group.push_back(it);
        ++j;
      }
      int id = static_cast<int>(forest.nodes.size());
      ForestNode v;
      v.index = head;
      v.term_begin = items[i].term;
      v.term_end = items[j - 1].term + 1;
      v.sparse = contains(modes, head) && sparse_term >= v.term_begin && sparse_term < v.term_end;
      v.csf_level = v.sparse ? csf_level_of[head] : -1;
      v.parent = parent;
      forest.nodes.push_back(v);
      out.push_back(id);
      forest.nodes[id].children = build(std::move(group), id);
      i = j;
    }
    return out;
  }
};

}  // namespace

FusedLoopForest build_forest(const KernelSpec& spec, const ContractionPath& path,
                             const LoopOrder& order) {
  const int N = path.num_terms();
  if (static_cast<int>(order.per_term.size()) != N)
    throw std::invalid_argument("build_forest: order has wrong term count");
  for (int t = 0; t < N; ++t) {
    IndexSet seen = 0;
    for (int id : order.per_term[t]) {
      if (contains(seen, id))
        throw std::invalid_argument("build_forest: repeated index in term order");
      seen |= set_of(id);
    }
    if (seen != path.terms[t].all())
      throw std::invalid_argument("build_forest: A_i is not a permutation of term i's index union");
  }

  FusedLoopForest forest;
  std::vector<int> csf_order = default_csf_order(spec);
  std::vector<int> level_of(spec.num_indices(), -1);
  for (size_t l = 0; l < csf_order.size(); ++l) level_of[csf_order[l]] = static_cast<int>(l);

  Builder b{spec, path, forest, spec.sparse_modes(), path.sparse_term(), level_of};
  std::vector<BuildItem> items;
  for (int t = 0; t < N; ++t) items.push_back(BuildItem{t, &order.per_term[t], 0});
  forest.roots = b.build(std::move(items), -1);

  // Buffers: indices = (inds(L_x) & inds(L_y)) minus the common-ancestor
  // loop indices, kept in the producer's iteration order.
  for (int x = 0; x + 1 < N; ++x) {
    const int y = path.consumer_of(x);
    BufferInfo buf;
    buf.producer = x;
    buf.consumer = y;
    std::vector<int> px = forest.path_of_term(x);
    std::vector<int> py = forest.path_of_term(y);
    IndexSet common = 0;
    for (size_t k = 0; k < px.size() && k < py.size() && px[k] == py[k]; ++k)
      common |= set_of(forest.nodes[px[k]].index);
    IndexSet keep = (path.terms[x].all() & path.terms[y].all()) & ~common;
    for (int id : order.per_term[x])
      if (contains(keep, id)) buf.indices.push_back(id);
    forest.buffers.push_back(std::move(buf));
  }
  return forest;
}

std::vector<BufferDims> buffer_dims(const KernelSpec& spec, const FusedLoopForest& forest) {
  std::vector<BufferDims> out;
  for (const auto& b : forest.buffers) {
    BufferDims d;
    d.order = static_cast<int>(b.indices.size());
    for (int id : b.indices) d.size *= spec.dim(id);
    out.push_back(d);
  }
  return out;
}

std::vector<int> default_csf_order(const KernelSpec& spec) {
  return spec.sparse_input().indices;
}

std::vector<int> constrained_indices(const KernelSpec& /*spec*/, const ContractionPath& path,
                                     int t, const std::vector<int>& csf_order) {
  std::vector<int> out;
  if (!path.on_sparse_chain(t)) return out;
  const IndexSet inds = path.terms[t].all();
  for (int id : csf_order)
    if (contains(inds, id)) out.push_back(id);
  return out;
}

bool order_admissible(const KernelSpec& spec, const ContractionPath& path, const LoopOrder& order,
                      const std::vector<int>& csf_order) {
  const int N = path.num_terms();
  if (static_cast<int>(order.per_term.size()) != N) return false;
  for (int t = 0; t < N; ++t) {
    IndexSet seen = 0;
    for (int id : order.per_term[t]) {
      if (contains(seen, id)) return false;
      seen |= set_of(id);
    }
    if (seen != path.terms[t].all()) return false;
    std::vector<int> want = constrained_indices(spec, path, t, csf_order);
    size_t w = 0;
    for (int id : order.per_term[t])
      if (w < want.size() && id == want[w]) ++w;
    if (w != want.size()) return false;
  }
  return true;
}

std::vector<std::vector<int>> enumerate_term_orders(const KernelSpec& spec,
                                                    const ContractionPath& path, int t,
                                                    const std::vector<int>& csf_order) {
  std::vector<int> base = set_elements(path.terms[t].all());
  std::vector<int> want = constrained_indices(spec, path, t, csf_order);
  std::vector<int> pos_in_want(spec.num_indices(), -1);
  for (size_t k = 0; k < want.size(); ++k) pos_in_want[want[k]] = static_cast<int>(k);

  std::vector<std::vector<int>> out;
  std::sort(base.begin(), base.end());
  do {
    int expect = 0;
    bool ok = true;
    for (int id : base) {
      if (pos_in_want[id] < 0) continue;
      if (pos_in_want[id] != expect) {
        ok = false;
        break;
      }
      ++expect;
    }
    if (ok) out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

namespace {

std::vector<std::vector<std::vector<int>>> all_term_orders(const KernelSpec& spec,
                                                           const ContractionPath& path,
                                                           const std::vector<int>& csf_order) {
  std::vector<std::vector<std::vector<int>>> per_term;
  for (int t = 0; t < path.num_terms(); ++t)
    per_term.push_back(enumerate_term_orders(spec, path, t, csf_order));
  return per_term;
}

}  // namespace

std::vector<LoopOrder> enumerate_orders(const KernelSpec& spec, const ContractionPath& path,
                                        const std::vector<int>& csf_order) {
  std::vector<LoopOrder> out;
  for_each_order(spec, path, csf_order, [&](const LoopOrder& o) { out.push_back(o); });
  return out;
}

int64_t count_orders(const KernelSpec& spec, const ContractionPath& path,
                     const std::vector<int>& csf_order, int64_t cap) {
  auto per_term = all_term_orders(spec, path, csf_order);
  int64_t total = 1;
  for (const auto& choices : per_term) {
    total *= static_cast<int64_t>(choices.size());
    if (total > cap) return cap + 1;
  }
  return total;
}

void for_each_order(const KernelSpec& spec, const ContractionPath& path,
                    const std::vector<int>& csf_order,
                    const std::function<void(const LoopOrder&)>& fn) {
  auto per_term = all_term_orders(spec, path, csf_order);
  const int N = path.num_terms();
  LoopOrder cur;
  cur.per_term.resize(N);
  std::vector<size_t> pick(N, 0);
  while (true) {
    for (int t = 0; t < N; ++t) cur.per_term[t] = per_term[t][pick[t]];
    fn(cur);
    int t = N - 1;
    while (t >= 0) {
      if (++pick[t] < per_term[t].size()) break;
      pick[t] = 0;
      --t;
    }
    if (t < 0) break;
  }
}

std::string tensor_handle_name(const KernelSpec& spec, const ContractionPath& path, int handle) {
  const int n = spec.num_inputs();
  if (handle < n) return spec.tensors[handle].name;
  if (handle == n + path.num_terms() - 1) return spec.output().name;
  static const char* names[] = {"X", "Y", "Z"};
  const int k = handle - n;
  if (k < 3) return names[k];
  return "X" + std::to_string(k + 1);
}

namespace {

struct Renderer {
  const KernelSpec& spec;
  const ContractionPath& path;
  const FusedLoopForest& forest;
  std::ostringstream os;

  Renderer(const KernelSpec& s, const ContractionPath& p, const FusedLoopForest& f)
      : spec(s), path(p), forest(f) {}

  std::string upper(const std::string& s) const {
    std::string u = s;
    for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
  }

  std::string csf_var(int level) const {
    // T_csf, T_i, T_ij, ... ; the deepest level binds the scalar value.
    const auto& sp = spec.sparse_input();
    if (level < 0) return sp.name + "_csf";
    std::string v = sp.name + "_";
    std::vector<int> order = default_csf_order(spec);
    for (int l = 0; l <= level; ++l) v += spec.index_names[order[l]];
    return v;
  }

  std::string value_var() const {
    const auto& sp = spec.sparse_input();
    std::string v = sp.name;
    for (auto& c : v) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    v += "_";
    for (int id : default_csf_order(spec)) v += spec.index_names[id];
    return v;
  }

  std::string operand(int handle) const {
    const int n = spec.num_inputs();
    if (handle == 0) return value_var();
    std::string name = tensor_handle_name(spec, path, handle);
    std::vector<int> inds;
    if (handle < n) {
      inds = spec.tensors[handle].indices;
    } else if (handle == n + path.num_terms() - 1) {
      inds = spec.output().indices;
    } else {
      inds = forest.buffers[handle - n].indices;
    }
    if (inds.empty()) return name;
    std::string out = name + "[";
    for (size_t k = 0; k < inds.size(); ++k) {
      if (k) out += ",";
      out += spec.index_names[inds[k]];
    }
    return out + "]";
  }

  void emit_leaf(int term, int depth) {
    const auto& tm = path.terms[term];
    os << std::string(2 * depth, ' ') << operand(tm.out_id) << " += " << operand(tm.lhs_id)
       << " * " << operand(tm.rhs_id) << "\n";
  }

  void emit_resets(int node, int depth) {
    // A buffer is reset on entry of the producing subtree once the consumer
    // is no longer inside it.
    const ForestNode& nd = forest.nodes[node];
    for (size_t b = 0; b < forest.buffers.size(); ++b) {
      const auto& buf = forest.buffers[b];
      const bool inside = buf.producer >= nd.term_begin && buf.producer < nd.term_end;
      const bool consumer_out = buf.consumer < nd.term_begin || buf.consumer >= nd.term_end;
      if (!inside || !consumer_out) continue;
      bool parent_covers_consumer = true;
      if (nd.parent != -1) {
        const ForestNode& p = forest.nodes[nd.parent];
        parent_covers_consumer = buf.consumer >= p.term_begin && buf.consumer < p.term_end;
      }
      if (parent_covers_consumer)
        os << std::string(2 * depth, ' ')
           << tensor_handle_name(spec, path, spec.num_inputs() + static_cast<int>(b)) << " = 0\n";
    }
  }

  void emit_node(int node, int depth) {
    const ForestNode& nd = forest.nodes[node];
    emit_resets(node, depth);
    if (nd.is_leaf) {
      emit_leaf(nd.term, depth);
      return;
    }
    const std::string ind(2 * depth, ' ');
    const std::string iname = spec.index_names[nd.index];
    if (nd.sparse) {
      const int d = static_cast<int>(default_csf_order(spec).size());
      const std::string var = nd.csf_level == d - 1 ? value_var() : csf_var(nd.csf_level);
      os << ind << "for (" << iname << "," << var << ") in " << csf_var(nd.csf_level - 1)
         << ":\n";
    } else {
      os << ind << "for " << iname << " in range(" << upper(iname) << "):\n";
    }
    for (int c : nd.children) emit_node(c, depth + 1);
  }

  std::string render() {
    const auto& sp = spec.sparse_input();
    os << sp.name << "_csf = CSF(" << sp.name << "[";
    std::vector<int> order = default_csf_order(spec);
    for (size_t l = 0; l < order.size(); ++l) {
      if (l) os << ",";
      os << spec.index_names[order[l]];
    }
    os << "])\n";
    for (int r : forest.roots) emit_node(r, 0);
    return os.str();
  }
};

}  // namespace

std::string render_loop_nest(const KernelSpec& spec, const ContractionPath& path,
                             const FusedLoopForest& forest) {
  Renderer r{spec, path, forest};
  return r.render();
}

}  // namespace spttn
