#include "spttn/report.hpp"

#include <sstream>

#include "json.hpp"
#include "spttn/loop_nest.hpp"

namespace spttn {

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "kernel: " << kernel << "\n";
  os << "cost_model: " << cost_model << "\n";
  os << "path: " << path << "\n";
  os << "max_loop_depth: " << max_loop_depth << "\n";
  for (size_t t = 0; t < term_orders.size(); ++t)
    os << "order[" << t << "]: " << term_orders[t] << "\n";
  for (const auto& b : buffers)
    os << "buffer " << b.name << ": indices=(" << b.indices << ") order=" << b.order
       << " size=" << b.size << " bytes=" << b.bytes << "\n";
  for (const auto& [m, v] : costs) os << "cost[" << m << "]: " << v << "\n";
  for (size_t t = 0; t < hooks.size(); ++t) os << "hook[" << t << "]: " << hooks[t] << "\n";
  if (flops_estimate) os << "flops_estimate: " << *flops_estimate << "\n";
  if (measured_multiply_adds) os << "multiply_adds: " << *measured_multiply_adds << "\n";
  if (buffer_bytes) os << "buffer_bytes: " << *buffer_bytes << "\n";
  if (exec_seconds) os << "exec_seconds: " << *exec_seconds << "\n";
  if (verify_delta) os << "verify_delta: " << *verify_delta << "\n";
  if (verify_tolerance) os << "verify_tolerance: " << *verify_tolerance << "\n";
  os << "search_subproblems: " << search_stats.subproblems << "\n";
  os << "search_memo_hits: " << search_stats.memo_hits << "\n";
  return os.str();
}

std::string RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["kernel"] = kernel;
  j["cost_model"] = cost_model;
  j["path"] = path;
  j["max_loop_depth"] = max_loop_depth;
  j["term_orders"] = term_orders;
  j["buffers"] = nlohmann::ordered_json::array();
  for (const auto& b : buffers) {
    nlohmann::ordered_json row;
    row["name"] = b.name;
    row["indices"] = b.indices;
    row["order"] = b.order;
    row["size"] = b.size;
    row["bytes"] = b.bytes;
    j["buffers"].push_back(row);
  }
  j["costs"] = nlohmann::ordered_json::object();
  for (const auto& [m, v] : costs) j["costs"][m] = v;
  j["hooks"] = hooks;
  if (flops_estimate) j["flops_estimate"] = *flops_estimate;
  if (measured_multiply_adds) j["multiply_adds"] = *measured_multiply_adds;
  if (buffer_bytes) j["buffer_bytes"] = *buffer_bytes;
  if (exec_seconds) j["exec_seconds"] = *exec_seconds;
  if (verify_delta) j["verify_delta"] = *verify_delta;
  if (verify_tolerance) j["verify_tolerance"] = *verify_tolerance;
  j["search"] = {{"subproblems", search_stats.subproblems},
                 {"memo_hits", search_stats.memo_hits},
                 {"wall_seconds", search_stats.wall_seconds}};
  return j.dump(2);
}

RunReport make_report(const KernelSpec& spec, const ContractionPath& path,
                      const SearchResult& result, const CostModel& model) {
  RunReport rep;
  rep.kernel = spec.to_string();
  rep.cost_model = model.name();
  rep.path = path.describe(spec);
  rep.max_loop_depth = max_loop_depth(path);
  for (const auto& o : result.best.order.per_term) {
    std::string s;
    for (size_t k = 0; k < o.size(); ++k) {
      if (k) s += ",";
      s += spec.index_names[o[k]];
    }
    rep.term_orders.push_back(s);
  }
  rep.costs.emplace_back(model.name(), result.best.cost.to_string());
  for (const auto& extra : {max_buffer_dim_model(), max_buffer_size_model()}) {
    if (extra->name() == model.name()) continue;
    rep.costs.emplace_back(extra->name(),
                           eval_cost(*extra, spec, path, result.best.order).to_string());
  }
  rep.search_stats = result.stats;
  return rep;
}

void attach_buffers(RunReport& rep, const KernelSpec& spec, const ContractionPath& path,
                    const FusedLoopForest& forest) {
  rep.buffers.clear();
  auto dims = buffer_dims(spec, forest);
  for (size_t b = 0; b < forest.buffers.size(); ++b) {
    RunReport::BufferRow row;
    row.name = tensor_handle_name(spec, path, spec.num_inputs() + static_cast<int>(b));
    std::string inds;
    for (size_t k = 0; k < forest.buffers[b].indices.size(); ++k) {
      if (k) inds += ",";
      inds += spec.index_names[forest.buffers[b].indices[k]];
    }
    row.indices = inds;
    row.order = dims[b].order;
    row.size = dims[b].size;
    row.bytes = dims[b].size * static_cast<int64_t>(sizeof(double));
    rep.buffers.push_back(row);
  }
}

void attach_hooks(RunReport& rep, const std::vector<TermHook>& hooks) {
  rep.hooks.clear();
  for (const auto& h : hooks) {
    std::string s = hook_kind_name(h.kind);
    if (h.kind != HookKind::None) s += "(" + std::to_string(h.span) + ")";
    if (h.meta_loops > 0) s += "+loops(" + std::to_string(h.meta_loops) + ")";
    rep.hooks.push_back(s);
  }
}

}  // namespace spttn
