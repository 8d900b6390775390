#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spttn/executor.hpp"
#include "spttn/optimizer.hpp"

namespace spttn {

/// Structured result of optimize/run/verify: stable key-value text plus a
/// JSON document (schema in docs/report_schema.md).
struct RunReport {
  std::string kernel;
  std::string cost_model;
  std::string path;                       // e.g. "((T*V)*U)"
  int max_loop_depth = 0;
  std::vector<std::string> term_orders;   // "i,j,s,k" per term
  struct BufferRow {
    std::string name;
    std::string indices;  // "s,t" or "" for a scalar
    int order = 0;
    int64_t size = 0;
    int64_t bytes = 0;
  };
  std::vector<BufferRow> buffers;
  std::vector<std::pair<std::string, std::string>> costs;  // model -> value
  std::vector<std::string> hooks;         // per term, e.g. "rank-1-update(2)+loops(1)"
  std::optional<int64_t> flops_estimate;
  std::optional<int64_t> measured_multiply_adds;
  std::optional<int64_t> buffer_bytes;
  std::optional<double> exec_seconds;
  std::optional<double> verify_delta;
  std::optional<double> verify_tolerance;
  SearchStats search_stats;

  std::string to_text() const;
  std::string to_json() const;
};

RunReport make_report(const KernelSpec& spec, const ContractionPath& path,
                      const SearchResult& result, const CostModel& model);

void attach_buffers(RunReport& rep, const KernelSpec& spec, const ContractionPath& path,
                    const FusedLoopForest& forest);
void attach_hooks(RunReport& rep, const std::vector<TermHook>& hooks);

}  // namespace spttn
