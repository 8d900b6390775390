#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "spttn/contraction_path.hpp"
#include "spttn/cost_model.hpp"
#include "spttn/kernel_spec.hpp"
#include "spttn/loop_nest.hpp"
#include "spttn/tensor.hpp"

namespace spttn {

struct resource_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct unsupported_order_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExecStats {
  int64_t multiply_adds = 0;
  std::vector<int64_t> buffer_resets;  // per buffer, in term order
  int64_t peak_buffer_bytes = 0;
  double wall_seconds = 0.0;
};

enum class HookKind { None, VectorAccumulate, Rank1Update };
std::string hook_kind_name(HookKind k);

/// Offload assignment for one term's trailing dense loops: a micro-kernel
/// over the innermost `span` indices, any remaining leading chain indices
/// run as generated dense loops.
struct TermHook {
  HookKind kind = HookKind::None;
  int span = 0;
  int meta_loops = 0;
};

struct ExecObserver {
  virtual ~ExecObserver() = default;
  /// Fired after the reset scan on entry of the subtree producing `buffer`.
  virtual void on_producer_entry(int buffer, const double* data, int64_t size) = 0;
};

struct ExecOptions {
  int64_t buffer_limit_bytes = int64_t{1} << 30;
  ExecObserver* observer = nullptr;
};

struct ExecInputs {
  const CsfTensor* sparse = nullptr;
  std::vector<const DenseTensor*> dense;  // aligned with spec inputs 1..n-1
};

/// Executed result: dense output, or the value array aligned with the sparse
/// input's CSF leaves when the kernel is @sparse_out.
struct ExecResult {
  DenseTensor dense_out;
  std::vector<double> sparse_out_values;
  ExecStats stats;
};

class ExecPlanImpl;

/// A preprocessed fused loop nest: allocated buffers, reset lists, offload
/// hooks, operand addressing.
struct ExecPlan {
  std::shared_ptr<ExecPlanImpl> impl;

  const FusedLoopForest& forest() const;
  const std::vector<TermHook>& hooks() const;
  int64_t total_buffer_bytes() const;
};

ExecPlan prepare(const KernelSpec& spec, const ContractionPath& path, const LoopOrder& order,
                 const ExecInputs& inputs, const ExecOptions& opts = {});

ExecResult execute(ExecPlan& plan);

/// Reference oracle: one loop nest over all kernel indices multiplying every
/// factor in the innermost body.
ExecResult execute_unfactorized(const KernelSpec& spec, const ExecInputs& inputs);

/// Predicted multiply-add count from CSF level counts and dense dimensions;
/// matches execute's measured counter exactly.
int64_t flops_estimate(const KernelSpec& spec, const ContractionPath& path,
                       const LoopOrder& order, const CsfTensor& csf);

/// Same for the unfactorized oracle.
int64_t flops_unfactorized(const KernelSpec& spec, const CsfTensor& csf);

}  // namespace spttn
