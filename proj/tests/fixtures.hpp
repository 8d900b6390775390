#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "spttn/contraction_path.hpp"
#include "spttn/executor.hpp"
#include "spttn/kernel_spec.hpp"
#include "spttn/tensor.hpp"
#include "spttn/tns_io.hpp"

namespace spttn::testing {

inline KernelSpec mttkrp3(int64_t I = 6, int64_t J = 5, int64_t K = 4, int64_t A = 3) {
  return parse_kernel("T[i,j,k]*B[j,a]*C[k,a]->A[i,a]",
                      {{"i", I}, {"j", J}, {"k", K}, {"a", A}});
}

inline KernelSpec ttmc3(int64_t I = 6, int64_t J = 5, int64_t K = 4, int64_t R = 3,
                        int64_t S = 2) {
  return parse_kernel("T[i,j,k]*U[j,r]*V[k,s]->S[i,r,s]",
                      {{"i", I}, {"j", J}, {"k", K}, {"r", R}, {"s", S}});
}

inline KernelSpec tttp3(int64_t I = 5, int64_t J = 4, int64_t K = 4, int64_t R = 3) {
  return parse_kernel("T[i,j,k]*U[i,r]*V[j,r]*W[k,r]->S[i,j,k] @sparse_out",
                      {{"i", I}, {"j", J}, {"k", K}, {"r", R}});
}

inline KernelSpec ttmc4(int64_t N = 4, int64_t R = 2, int64_t S = 3, int64_t T = 2) {
  return parse_kernel("T[i,j,k,l]*U[j,r]*V[k,s]*W[l,t]->S[i,r,s,t]",
                      {{"i", N}, {"j", N}, {"k", N}, {"l", N}, {"r", R}, {"s", S}, {"t", T}});
}

inline KernelSpec tttc4(int64_t N = 3, int64_t R = 2) {
  return parse_kernel("T[i,j,k,l]*P[i,a]*Q[a,j,b]*R[b,k,c]*S[c,l,d]->Z[d]",
                      {{"i", N}, {"j", N}, {"k", N}, {"l", N}, {"a", R}, {"b", R}, {"c", R},
                       {"d", R}});
}

inline KernelSpec tttc6(int64_t N = 3, int64_t R = 2) {
  return parse_kernel(
      "T[i,j,k,l,m,n]*A[i,a]*B[a,j,b]*C[b,k,c]*D[c,l,d]*E[d,m,e]->Z[e,n]",
      {{"i", N}, {"j", N}, {"k", N}, {"l", N}, {"m", N}, {"n", N}, {"a", R}, {"b", R},
       {"c", R}, {"d", R}, {"e", R}});
}

/// Path whose nesting string matches, e.g. "((T*V)*U)".
inline ContractionPath find_path(const KernelSpec& spec, const std::string& describe) {
  for (const auto& p : enumerate_paths(spec))
    if (p.describe(spec) == describe) return p;
  throw std::runtime_error("no path " + describe);
}

/// The 3-entry sparse fixture {(0,0,0):1, (0,1,2):2, (1,0,0):3}.
inline CooTensor coo3(int64_t I = 2, int64_t J = 2, int64_t K = 3) {
  CooTensor coo;
  coo.indices = {{"i", I}, {"j", J}, {"k", K}};
  coo.entries = {{{0, 0, 0}, 1.0}, {{0, 1, 2}, 2.0}, {{1, 0, 0}, 3.0}};
  coo.normalize();
  return coo;
}

inline CooTensor random_coo(const KernelSpec& spec, double density, uint64_t seed) {
  std::vector<Index> modes;
  for (int id : spec.sparse_input().indices)
    modes.push_back(Index{spec.index_names[id], spec.dim(id)});
  return gen_random(modes, density, seed);
}

struct Tensors {
  CsfTensor csf;
  std::vector<DenseTensor> dense;
  ExecInputs inputs() const {
    ExecInputs in;
    in.sparse = &csf;
    for (const auto& d : dense) in.dense.push_back(&d);
    return in;
  }
};

inline Tensors make_tensors(const KernelSpec& spec, const CooTensor& coo, uint64_t seed = 7) {
  Tensors t;
  std::vector<std::string> mode_names;
  for (int id : spec.sparse_input().indices) mode_names.push_back(spec.index_names[id]);
  t.csf = build_csf(coo, mode_names);
  for (int f = 1; f < spec.num_inputs(); ++f) {
    std::vector<Index> shape;
    for (int id : spec.tensors[f].indices)
      shape.push_back(Index{spec.index_names[id], spec.dim(id)});
    t.dense.push_back(gen_dense(shape, seed ^ stable_hash(spec.tensors[f].name)));
  }
  return t;
}

}  // namespace spttn::testing
