#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "spttn/loop_nest.hpp"

using namespace spttn;
using namespace spttn::testing;

namespace {

LoopOrder make_order(const KernelSpec& spec, const std::vector<std::vector<std::string>>& names) {
  LoopOrder o;
  for (const auto& term : names) {
    std::vector<int> ids;
    for (const auto& n : term) ids.push_back(spec.index_id(n));
    o.per_term.push_back(ids);
  }
  return o;
}

std::vector<std::string> order_names(const KernelSpec& spec, const std::vector<int>& ids) {
  std::vector<std::string> out;
  for (int id : ids) out.push_back(spec.index_names[id]);
  return out;
}

int64_t factorial(int64_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

// Root-to-leaf index sequences must reproduce the input per-term orders.
void check_reconstruction(const KernelSpec& spec, const ContractionPath& path,
                          const LoopOrder& order) {
  FusedLoopForest forest = build_forest(spec, path, order);
  CHECK(forest.fully_fused());
  for (int t = 0; t < path.num_terms(); ++t) {
    std::vector<int> flat;
    for (int v : forest.path_of_term(t)) flat.push_back(forest.nodes[v].index);
    CHECK(flat == order.per_term[t]);
  }
  // Buffer indices never meet the producer/consumer common ancestors.
  for (const auto& buf : forest.buffers) {
    auto pp = forest.path_of_term(buf.producer);
    auto pc = forest.path_of_term(buf.consumer);
    IndexSet common = 0;
    for (size_t k = 0; k < pp.size() && k < pc.size() && pp[k] == pc[k]; ++k)
      common |= set_of(forest.nodes[pp[k]].index);
    for (int id : buf.indices) CHECK_FALSE(contains(common, id));
  }
}

}  // namespace

TEST_CASE("peel splits on the maximal shared head") {
  KernelSpec spec = ttmc3();
  // TTMc orders ((i,j,k,s),(i,j,s,r)) peel on i.
  LoopOrder o = make_order(spec, {{"i", "j", "k", "s"}, {"i", "j", "s", "r"}});
  PeelResult r = peel(o);
  CHECK(r.first.per_term.size() == 2);
  CHECK(order_names(spec, r.first.per_term[0]) == std::vector<std::string>{"j", "k", "s"});
  CHECK(order_names(spec, r.first.per_term[1]) == std::vector<std::string>{"j", "s", "r"});
  CHECK(r.rest.per_term.empty());
}

TEST_CASE("peel with no shared head moves one term only") {
  KernelSpec spec = parse_kernel("T[i,j]*U[k,l]->S[i,j,k,l]",
                                 {{"i", 2}, {"j", 2}, {"k", 2}, {"l", 2}});
  LoopOrder o = make_order(spec, {{"i", "j"}, {"k", "l"}});
  PeelResult r = peel(o);
  REQUIRE(r.first.per_term.size() == 1);
  CHECK(order_names(spec, r.first.per_term[0]) == std::vector<std::string>{"j"});
  REQUIRE(r.rest.per_term.size() == 1);
  CHECK(order_names(spec, r.rest.per_term[0]) == std::vector<std::string>{"k", "l"});
}

TEST_CASE("peel drops emptied singletons") {
  KernelSpec spec = parse_kernel("T[s]*U[s]->S[s]", {{"s", 3}});
  LoopOrder o = make_order(spec, {{"s"}});
  o.per_term.push_back(o.per_term[0]);  // synthetic two-term order ((s),(s))
  PeelResult r = peel(o);
  CHECK(r.first.per_term.empty());
  CHECK(r.rest.per_term.empty());

  CHECK_THROWS_AS(peel(LoopOrder{}), std::invalid_argument);
}

TEST_CASE("TTMc fused over i,j buffers X over (s)") {
  KernelSpec spec = ttmc3(6, 5, 4, 3, 32);
  ContractionPath path = find_path(spec, "((T*V)*U)");
  LoopOrder o = make_order(spec, {{"i", "j", "k", "s"}, {"i", "j", "s", "r"}});
  FusedLoopForest f = build_forest(spec, path, o);

  REQUIRE(f.roots.size() == 1);
  const ForestNode& i = f.nodes[f.roots[0]];
  CHECK(spec.index_names[i.index] == "i");
  CHECK(i.sparse);
  REQUIRE(i.children.size() == 1);
  const ForestNode& j = f.nodes[i.children[0]];
  CHECK(spec.index_names[j.index] == "j");
  CHECK(j.children.size() == 2);  // k-subtree for term 0, s-subtree for term 1

  REQUIRE(f.buffers.size() == 1);
  CHECK(order_names(spec, f.buffers[0].indices) == std::vector<std::string>{"s"});
  auto dims = buffer_dims(spec, f);
  CHECK(dims[0].order == 1);
  CHECK(dims[0].size == 32);
  check_reconstruction(spec, path, o);
}

TEST_CASE("TTMc fused over i,j,s buffers a scalar") {
  KernelSpec spec = ttmc3();
  ContractionPath path = find_path(spec, "((T*V)*U)");
  LoopOrder o = make_order(spec, {{"i", "j", "s", "k"}, {"i", "j", "s", "r"}});
  FusedLoopForest f = build_forest(spec, path, o);
  REQUIRE(f.buffers.size() == 1);
  CHECK(f.buffers[0].indices.empty());
  auto dims = buffer_dims(spec, f);
  CHECK(dims[0].order == 0);
  CHECK(dims[0].size == 1);
  check_reconstruction(spec, path, o);
}

TEST_CASE("((U*V)*T) cannot fuse and buffers an order-4 intermediate") {
  KernelSpec spec = ttmc3();
  ContractionPath path = find_path(spec, "((U*V)*T)");
  LoopOrder o = make_order(spec, {{"j", "k", "r", "s"}, {"i", "j", "k", "r", "s"}});
  FusedLoopForest f = build_forest(spec, path, o);
  CHECK(f.roots.size() == 2);  // independent trees
  REQUIRE(f.buffers.size() == 1);
  CHECK(f.buffers[0].indices.size() == 4);
  auto dims = buffer_dims(spec, f);
  CHECK(dims[0].order == 4);

  // Dense-loop flags: the U*V tree never touches the sparse tensor.
  for (int v : f.path_of_term(0)) CHECK_FALSE(f.nodes[v].sparse);
  int sparse_count = 0;
  for (int v : f.path_of_term(1))
    if (f.nodes[v].sparse) ++sparse_count;
  CHECK(sparse_count == 3);  // i, j, k
  check_reconstruction(spec, path, o);
}

TEST_CASE("order-4 TTMc end-to-end buffers are (t) and (s,t)") {
  KernelSpec spec = ttmc4();
  ContractionPath path = find_path(spec, "(((T*W)*V)*U)");
  LoopOrder o = make_order(spec, {{"i", "j", "k", "l", "t"},
                                  {"i", "j", "k", "s", "t"},
                                  {"i", "j", "r", "s", "t"}});
  FusedLoopForest f = build_forest(spec, path, o);
  REQUIRE(f.buffers.size() == 2);
  CHECK(order_names(spec, f.buffers[0].indices) == std::vector<std::string>{"t"});
  CHECK(order_names(spec, f.buffers[1].indices) == std::vector<std::string>{"s", "t"});
  check_reconstruction(spec, path, o);
}

TEST_CASE("build_forest rejects non-permutation orders") {
  KernelSpec spec = ttmc3();
  ContractionPath path = find_path(spec, "((T*V)*U)");
  CHECK_THROWS_AS(
      build_forest(spec, path, make_order(spec, {{"i", "j", "k"}, {"i", "j", "s", "r"}})),
      std::invalid_argument);
  CHECK_THROWS_AS(
      build_forest(spec, path, make_order(spec, {{"i", "j", "k", "k"}, {"i", "j", "s", "r"}})),
      std::invalid_argument);
}

TEST_CASE("enumerate_term_orders counts |I|!/k!") {
  KernelSpec spec = ttmc3();
  ContractionPath path = find_path(spec, "((T*V)*U)");
  auto csf = default_csf_order(spec);

  // Term T*V has indices {i,j,k,s} with 3 sparse: 4!/3! = 4 interleavings.
  auto t0 = enumerate_term_orders(spec, path, 0, csf);
  CHECK(t0.size() == 4);
  // Consumer term has sparse prefix {i,j}: 4!/2! = 12.
  auto t1 = enumerate_term_orders(spec, path, 1, csf);
  CHECK(t1.size() == 12);
  CHECK(count_orders(spec, path, csf, 1000) == 48);
  CHECK(enumerate_orders(spec, path, csf).size() == 48);

  // A dense-only term with 4 indices is unconstrained: 4! = 24.
  ContractionPath uv_t = find_path(spec, "((U*V)*T)");
  auto d0 = enumerate_term_orders(spec, uv_t, 0, csf);
  CHECK(d0.size() == factorial(4));  // {j,k,r,s} unconstrained
  KernelSpec small = parse_kernel("T[i]*U[p,q,r]->S[i,p,q,r]",
                                  {{"i", 2}, {"p", 2}, {"q", 2}, {"r", 2}});
  ContractionPath sp = enumerate_paths(small)[0];
  // Single term: {i,p,q,r} with one sparse index: 4!/1! = 24.
  CHECK(enumerate_term_orders(small, sp, 0, default_csf_order(small)).size() == 24);
}

TEST_CASE("enumerate_orders matches the product formula on fixtures") {
  for (const KernelSpec& spec : {mttkrp3(), ttmc3(), tttp3()}) {
    for (const auto& path : enumerate_paths(spec)) {
      auto csf = default_csf_order(spec);
      int64_t expect = 1;
      for (int t = 0; t < path.num_terms(); ++t) {
        const int total = set_size(path.terms[t].all());
        const int k = static_cast<int>(constrained_indices(spec, path, t, csf).size());
        expect *= factorial(total) / factorial(k);
      }
      CHECK(count_orders(spec, path, csf, 1'000'000) == expect);
      auto all = enumerate_orders(spec, path, csf);
      CHECK(static_cast<int64_t>(all.size()) == expect);
      for (const auto& o : all) CHECK(order_admissible(spec, path, o, csf));
    }
  }
}

TEST_CASE("every enumerated order reconstructs and stays fully fused") {
  KernelSpec spec = ttmc3();
  for (const auto& path : filter_min_depth(enumerate_paths(spec)))
    for (const auto& o : enumerate_orders(spec, path, default_csf_order(spec)))
      check_reconstruction(spec, path, o);
}

TEST_CASE("admissibility rejects broken sparse order") {
  KernelSpec spec = ttmc3();
  ContractionPath path = find_path(spec, "((T*V)*U)");
  auto csf = default_csf_order(spec);
  CHECK_FALSE(order_admissible(
      spec, path, make_order(spec, {{"i", "k", "j", "s"}, {"i", "j", "s", "r"}}), csf));
  CHECK_FALSE(order_admissible(
      spec, path, make_order(spec, {{"i", "j", "k", "s"}, {"j", "i", "s", "r"}}), csf));
  CHECK(order_admissible(
      spec, path, make_order(spec, {{"s", "i", "j", "k"}, {"i", "j", "s", "r"}}), csf));
}

TEST_CASE("explain rendering is stable and mirrors the fused nest") {
  KernelSpec spec = ttmc3(6, 5, 4, 3, 2);
  ContractionPath path = find_path(spec, "((T*V)*U)");
  LoopOrder o = make_order(spec, {{"i", "j", "s", "k"}, {"i", "j", "s", "r"}});
  FusedLoopForest f = build_forest(spec, path, o);
  const std::string expect =
      "T_csf = CSF(T[i,j,k])\n"
      "for (i,T_i) in T_csf:\n"
      "  for (j,T_ij) in T_i:\n"
      "    for s in range(S):\n"
      "      X = 0\n"
      "      for (k,t_ijk) in T_ij:\n"
      "        X += t_ijk * V[k,s]\n"
      "      for r in range(R):\n"
      "        S[i,r,s] += X * U[j,r]\n";
  CHECK(render_loop_nest(spec, path, f) == expect);
  CHECK(render_loop_nest(spec, path, f) == render_loop_nest(spec, path, f));
}
