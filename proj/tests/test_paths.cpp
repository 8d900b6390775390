#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "spttn/contraction_path.hpp"

using namespace spttn;

namespace {

// The recurrence T(n) = C(n,2) * T(n-1), T(2) = 1.
int64_t path_count(int n) {
  int64_t c = 1;
  for (int k = 3; k <= n; ++k) c *= static_cast<int64_t>(k) * (k - 1) / 2;
  return c;
}

}  // namespace

TEST_CASE("path counts follow the pair-merge recurrence") {
  CHECK(path_count(2) == 1);
  CHECK(path_count(3) == 3);
  CHECK(path_count(4) == 18);
  CHECK(path_count(5) == 180);

  KernelSpec two = parse_kernel("T[i,j]*U[j,r]->S[i,r]", {{"i", 3}, {"j", 3}, {"r", 2}});
  CHECK(enumerate_paths(two).size() == 1);
  CHECK(enumerate_paths(testing::mttkrp3()).size() == 3);
  CHECK(enumerate_paths(testing::ttmc4()).size() == 18);
  CHECK(enumerate_paths(testing::tttc4()).size() == 180);
}

TEST_CASE("paths are pairwise distinct") {
  auto paths = enumerate_paths(testing::ttmc4());
  std::set<std::vector<std::pair<int, int>>> sigs;
  for (const auto& p : paths) {
    std::vector<std::pair<int, int>> sig;
    for (const auto& t : p.terms)
      sig.push_back({std::min(t.lhs_id, t.rhs_id), std::max(t.lhs_id, t.rhs_id)});
    CHECK(sigs.insert(sig).second);
  }
}

TEST_CASE("TTMc order-3 depths match the worked example") {
  KernelSpec spec = testing::ttmc3();
  auto paths = enumerate_paths(spec);
  REQUIRE(paths.size() == 3);

  ContractionPath tv_u = testing::find_path(spec, "((T*V)*U)");
  ContractionPath uv_t = testing::find_path(spec, "((U*V)*T)");
  ContractionPath tu_v = testing::find_path(spec, "((T*U)*V)");

  CHECK(max_loop_depth(tv_u) == 4);
  CHECK(max_loop_depth(tu_v) == 4);
  CHECK(max_loop_depth(uv_t) == 5);

  // ((U*V)*T) builds an order-4 intermediate.
  CHECK(set_size(uv_t.terms[0].out) == 4);

  auto kept = filter_min_depth(paths);
  REQUIRE(kept.size() == 2);
  for (const auto& p : kept) CHECK(max_loop_depth(p) == 4);
}

TEST_CASE("MTTKRP pairwise depth") {
  KernelSpec spec = testing::mttkrp3();
  ContractionPath tc_b = testing::find_path(spec, "((T*C)*B)");
  CHECK(max_loop_depth(tc_b) == 4);
}

TEST_CASE("filter_min_depth is the identity for a single path") {
  KernelSpec two = parse_kernel("T[i,j]*U[j,r]->S[i,r]", {{"i", 3}, {"j", 3}, {"r", 2}});
  auto paths = enumerate_paths(two);
  CHECK(filter_min_depth(paths).size() == 1);
}

TEST_CASE("order-4 TTMc minimum depth is 5") {
  auto kept = filter_min_depth(enumerate_paths(testing::ttmc4()));
  for (const auto& p : kept) CHECK(max_loop_depth(p) == 5);
  CHECK(!kept.empty());
}

TEST_CASE("out indices keep exactly what later terms or the output need") {
  for (const KernelSpec& spec : {testing::mttkrp3(), testing::ttmc3(), testing::tttp3(),
                                 testing::ttmc4()}) {
    for (const auto& path : enumerate_paths(spec)) {
      const int N = path.num_terms();
      // Replay: walk the postorder and track which tensors are still alive.
      for (int t = 0; t < N; ++t) {
        IndexSet needed = spec.output_set();
        std::set<int> consumed;
        for (int u = 0; u <= t; ++u) {
          consumed.insert(path.terms[u].lhs_id);
          consumed.insert(path.terms[u].rhs_id);
        }
        for (int in = 0; in < spec.num_inputs(); ++in)
          if (!consumed.count(in)) needed |= spec.tensor_set(spec.tensors[in]);
        for (int u = 0; u < t; ++u)
          if (!consumed.count(path.terms[u].out_id)) needed |= path.terms[u].out;
        CHECK(path.terms[t].out == ((path.terms[t].lhs | path.terms[t].rhs) & needed));
        // Nothing used later is dropped.
        for (int u = t + 1; u < N; ++u) {
          if (path.terms[u].lhs_id == path.terms[t].out_id)
            CHECK(path.terms[u].lhs == path.terms[t].out);
          if (path.terms[u].rhs_id == path.terms[t].out_id)
            CHECK(path.terms[u].rhs == path.terms[t].out);
        }
      }
      // Every intermediate is produced once and consumed exactly once.
      for (int t = 0; t + 1 < N; ++t) {
        int uses = 0;
        for (int u = t + 1; u < N; ++u) {
          if (path.terms[u].lhs_id == path.terms[t].out_id) ++uses;
          if (path.terms[u].rhs_id == path.terms[t].out_id) ++uses;
        }
        CHECK(uses == 1);
        CHECK(path.consumer_of(t) > t);
      }
      CHECK(path.terms[N - 1].out == spec.output_set());
    }
  }
}

TEST_CASE("sparse chain marks the terms that see sparse data") {
  KernelSpec spec = testing::ttmc3();
  ContractionPath uv_t = testing::find_path(spec, "((U*V)*T)");
  CHECK(uv_t.sparse_term() == 1);
  CHECK_FALSE(uv_t.on_sparse_chain(0));
  CHECK(uv_t.on_sparse_chain(1));

  ContractionPath tv_u = testing::find_path(spec, "((T*V)*U)");
  CHECK(tv_u.sparse_term() == 0);
  CHECK(tv_u.on_sparse_chain(0));
  CHECK(tv_u.on_sparse_chain(1));
}

TEST_CASE("enumerate_paths rejects fewer than two inputs") {
  KernelSpec spec = parse_kernel("T[i,j]*U[j,r]->S[i,r]", {{"i", 3}, {"j", 3}, {"r", 2}});
  spec.tensors.erase(spec.tensors.begin() + 1);  // leave one input + output
  CHECK_THROWS_AS(enumerate_paths(spec), std::invalid_argument);
}
