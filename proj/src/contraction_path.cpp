#include "spttn/contraction_path.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace spttn {

int ContractionPath::consumer_of(int t) const {
  const int out_id = terms[t].out_id;
  for (int u = t + 1; u < num_terms(); ++u)
    if (terms[u].lhs_id == out_id || terms[u].rhs_id == out_id) return u;
  return -1;
}

int ContractionPath::sparse_term() const {
  for (int t = 0; t < num_terms(); ++t)
    if (terms[t].lhs_id == 0 || terms[t].rhs_id == 0) return t;
  return -1;
}

bool ContractionPath::on_sparse_chain(int t) const {
  int cur = sparse_term();
  while (cur != -1) {
    if (cur == t) return true;
    cur = consumer_of(cur);
  }
  return false;
}

std::string ContractionPath::describe(const KernelSpec& spec) const {
  const int n = spec.num_inputs();
  std::vector<std::string> label(n + num_terms());
  for (int t = 0; t < n; ++t) label[t] = spec.tensors[t].name;
  for (int t = 0; t < num_terms(); ++t)
    label[n + t] = "(" + label[terms[t].lhs_id] + "*" + label[terms[t].rhs_id] + ")";
  return label[n + num_terms() - 1];
}

namespace {

struct Active {
  int id;
  IndexSet set;
};

void recurse(const KernelSpec& spec, IndexSet out_set, std::vector<Active>& act, int next_id,
             std::vector<ContractionTerm>& terms,
             const std::function<void(const ContractionPath&)>& emit) {
  const int m = static_cast<int>(act.size());
  if (m == 1) {
    emit(ContractionPath{terms});
    return;
  }
  const int n_inputs = spec.num_inputs();
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      ContractionTerm term;
      term.lhs_id = act[a].id;
      term.rhs_id = act[b].id;
      term.lhs = act[a].set;
      term.rhs = act[b].set;
      // Intermediates come first, then kernel order; purely cosmetic since
      // contraction is symmetric, but keeps descriptions like ((T*V)*U).
      const bool swap = (term.rhs_id >= n_inputs && term.lhs_id < n_inputs) ||
                        ((term.rhs_id >= n_inputs) == (term.lhs_id >= n_inputs) &&
                         term.rhs_id < term.lhs_id);
      if (swap) {
        std::swap(term.lhs_id, term.rhs_id);
        std::swap(term.lhs, term.rhs);
      }
      term.out_id = next_id;
      // An index survives iff it appears in a tensor not yet consumed or in
      // the kernel output.
      IndexSet needed = out_set;
      for (int k = 0; k < m; ++k)
        if (k != a && k != b) needed |= act[k].set;
      term.out = (term.lhs | term.rhs) & needed;

      std::vector<Active> next;
      next.reserve(m - 1);
      for (int k = 0; k < m; ++k)
        if (k != a && k != b) next.push_back(act[k]);
      next.push_back(Active{next_id, term.out});

      terms.push_back(term);
      recurse(spec, out_set, next, next_id + 1, terms, emit);
      terms.pop_back();
    }
  }
}

}  // namespace

void for_each_path(const KernelSpec& spec,
                   const std::function<void(const ContractionPath&)>& fn) {
  const int n = spec.num_inputs();
  if (n < 2) throw std::invalid_argument("enumerate_paths: need at least two input tensors");
  std::vector<Active> act;
  for (int t = 0; t < n; ++t) act.push_back(Active{t, spec.tensor_set(spec.tensors[t])});
  std::vector<ContractionTerm> terms;
  recurse(spec, spec.output_set(), act, n, terms, fn);
}

std::vector<ContractionPath> enumerate_paths(const KernelSpec& spec) {
  std::vector<ContractionPath> result;
  for_each_path(spec, [&](const ContractionPath& p) { result.push_back(p); });
  return result;
}

int max_loop_depth(const ContractionPath& path) {
  int depth = 0;
  for (const auto& t : path.terms) depth = std::max(depth, set_size(t.all()));
  return depth;
}

std::vector<ContractionPath> filter_min_depth(const std::vector<ContractionPath>& paths) {
  if (paths.empty()) throw std::invalid_argument("filter_min_depth: empty path list");
  int best = max_loop_depth(paths[0]);
  for (const auto& p : paths) best = std::min(best, max_loop_depth(p));
  std::vector<ContractionPath> keep;
  for (const auto& p : paths)
    if (max_loop_depth(p) == best) keep.push_back(p);
  return keep;
}

}  // namespace spttn
