#include "spttn/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "spttn/bench.hpp"
#include "spttn/report.hpp"
#include "spttn/tns_io.hpp"

namespace spttn {

namespace {

struct CommonArgs {
  std::string kernel;
  std::vector<std::string> dims;
  std::string tns;
  std::string cost = "dense-loops:bound=2";
  uint64_t seed = 42;
  double density = 0.0;
  bool no_depth_filter = false;
  bool prune_zeros = false;
  int64_t buffer_limit_bytes = int64_t{1} << 30;
  std::vector<std::string> dense_files;  // NAME=path
  std::string json_out;
  std::string out_file;
  std::string order;
  int top_k = 3;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_kernel = true) {
  auto* k = cmd->add_option("--kernel", a.kernel,
                            "kernel, e.g. \"T[i,j,k]*B[j,a]*C[k,a]->A[i,a]\"");
  if (needs_kernel) k->required();
  cmd->add_option("--dims", a.dims, "index sizes as k=v[,k=v...]; repeatable");
  cmd->add_option("--tns", a.tns, "sparse tensor in .tns format");
  cmd->add_option("--cost", a.cost,
                  "cost model: max-buf-dim | max-buf-size | cache:D=<d> | dense-loops:bound=<b>");
  cmd->add_option("--seed", a.seed, "seed for generated tensors");
  cmd->add_option("--density", a.density, "generate the sparse tensor with this nonzero fraction");
  cmd->add_flag("--no-depth-filter", a.no_depth_filter,
                "search all contraction paths, not just minimum-depth ones");
  cmd->add_flag("--prune-zeros", a.prune_zeros, "drop explicitly stored zeros on ingestion");
  cmd->add_option("--buffer-limit-bytes", a.buffer_limit_bytes,
                  "fail with a resource error if buffers exceed this");
  cmd->add_option("--dense", a.dense_files, "dense factor file as NAME=path; repeatable");
  cmd->add_option("--json", a.json_out, "write the machine-readable report here");
}

std::map<std::string, int64_t> parse_dims(const std::vector<std::string>& entries) {
  std::map<std::string, int64_t> dims;
  for (const auto& entry : entries) {
    std::istringstream is(entry);
    std::string item;
    while (std::getline(is, item, ',')) {
      const size_t eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("bad --dims entry '" + item + "' (expected name=size)");
      dims[item.substr(0, eq)] = std::stoll(item.substr(eq + 1));
    }
  }
  return dims;
}

// Index tokens of the first factor, needed to bind .tns dimensions before the
// kernel itself can be parsed.
std::vector<std::string> sparse_tokens(const std::string& kernel) {
  const size_t lb = kernel.find('[');
  const size_t rb = kernel.find(']');
  if (lb == std::string::npos || rb == std::string::npos || rb < lb)
    throw std::invalid_argument("kernel parse error: expected Name[i,j,...] as the first factor");
  std::vector<std::string> tokens;
  std::istringstream is(kernel.substr(lb + 1, rb - lb - 1));
  std::string tok;
  while (std::getline(is, tok, ',')) {
    std::string clean;
    for (char c : tok)
      if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
    tokens.push_back(clean);
  }
  return tokens;
}

struct LoadedProblem {
  KernelSpec spec;
  CooTensor coo;          // sparse input, bound and normalized
  CsfTensor csf;
  std::vector<DenseTensor> dense;
  ExecInputs inputs;
};

LoadedProblem load_problem(const CommonArgs& a, bool need_tensors) {
  LoadedProblem p;
  auto dims = parse_dims(a.dims);

  CooTensor file_coo;
  const bool have_file = !a.tns.empty();
  if (have_file) {
    file_coo = read_tns_file(a.tns);
    const auto tokens = sparse_tokens(a.kernel);
    if (file_coo.order() == 0 && file_coo.nnz() == 0)
      file_coo.indices.assign(tokens.size(), Index{"", 0});
    if (file_coo.order() != static_cast<int64_t>(tokens.size()))
      throw std::invalid_argument("tensor file order does not match the kernel's sparse tensor");
    for (size_t k = 0; k < tokens.size(); ++k) {
      file_coo.indices[k].name = tokens[k];
      auto it = dims.find(tokens[k]);
      if (it != dims.end()) {
        if (file_coo.indices[k].dim > it->second)
          throw std::invalid_argument("tensor file coordinate exceeds --dims for " + tokens[k]);
        file_coo.indices[k].dim = it->second;
      } else {
        if (file_coo.indices[k].dim == 0)
          throw std::invalid_argument("cannot infer dimension of " + tokens[k] +
                                      " from an empty tensor file; pass --dims");
        dims[tokens[k]] = file_coo.indices[k].dim;
      }
    }
  }

  p.spec = parse_kernel(a.kernel, dims);

  if (!need_tensors) return p;

  if (have_file) {
    p.coo = std::move(file_coo);
  } else {
    if (!(a.density > 0.0))
      throw std::invalid_argument("no --tns given: pass --density to generate the sparse tensor");
    std::vector<Index> modes;
    for (int id : p.spec.sparse_input().indices)
      modes.push_back(Index{p.spec.index_names[id], p.spec.dim(id)});
    p.coo = gen_random(modes, a.density, a.seed);
  }
  if (a.prune_zeros) {
    std::erase_if(p.coo.entries, [](const auto& e) { return e.second == 0.0; });
  }

  std::vector<std::string> mode_names;
  for (int id : p.spec.sparse_input().indices) mode_names.push_back(p.spec.index_names[id]);
  p.csf = build_csf(p.coo, mode_names);

  std::map<std::string, std::string> dense_paths;
  for (const auto& df : a.dense_files) {
    const size_t eq = df.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad --dense entry '" + df + "' (expected NAME=path)");
    dense_paths[df.substr(0, eq)] = df.substr(eq + 1);
  }
  for (int t = 1; t < p.spec.num_inputs(); ++t) {
    const auto& ref = p.spec.tensors[t];
    std::vector<Index> shape;
    for (int id : ref.indices) shape.push_back(Index{p.spec.index_names[id], p.spec.dim(id)});
    auto it = dense_paths.find(ref.name);
    if (it == dense_paths.end()) {
      p.dense.push_back(gen_dense(shape, a.seed ^ stable_hash(ref.name)));
    } else {
      CooTensor c = read_tns_file(it->second);
      if (c.order() != static_cast<int64_t>(shape.size()))
        throw std::invalid_argument("dense factor file order mismatch for " + ref.name);
      DenseTensor d(shape);
      for (const auto& e : c.entries) {
        for (size_t k = 0; k < shape.size(); ++k)
          if (e.first[k] >= shape[k].dim)
            throw std::invalid_argument("dense factor coordinate out of range for " + ref.name);
        d.at(e.first) += e.second;
      }
      p.dense.push_back(std::move(d));
    }
  }
  p.inputs.sparse = &p.csf;
  for (const auto& d : p.dense) p.inputs.dense.push_back(&d);
  return p;
}

LoopOrder parse_order_arg(const KernelSpec& spec, const std::string& text) {
  LoopOrder order;
  std::istringstream is(text);
  std::string term;
  while (std::getline(is, term, ';')) {
    std::vector<int> ids;
    std::istringstream ts(term);
    std::string tok;
    while (std::getline(ts, tok, ',')) {
      std::string clean;
      for (char c : tok)
        if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
      const int id = spec.index_id(clean);
      if (id < 0) throw std::invalid_argument("unknown index '" + clean + "' in --order");
      ids.push_back(id);
    }
    order.per_term.push_back(std::move(ids));
  }
  return order;
}

// Finds the path whose term index sets match the explicit per-term orders.
std::pair<ContractionPath, LoopOrder> resolve_order(const KernelSpec& spec,
                                                    const std::string& order_text) {
  LoopOrder order = parse_order_arg(spec, order_text);
  for (const auto& path : enumerate_paths(spec)) {
    if (path.num_terms() != static_cast<int>(order.per_term.size())) continue;
    if (order_admissible(spec, path, order, default_csf_order(spec))) return {path, order};
  }
  throw std::invalid_argument(
      "--order does not match any contraction path (check term count and index sets)");
}

void emit_report(const RunReport& rep, const std::string& json_path) {
  std::cout << rep.to_text();
  if (!json_path.empty()) {
    std::ofstream out(json_path);
    out << rep.to_json() << "\n";
  }
}

double max_abs(const ExecResult& r) {
  double m = 0.0;
  for (double v : r.dense_out.values) m = std::max(m, std::abs(v));
  for (double v : r.sparse_out_values) m = std::max(m, std::abs(v));
  return m;
}

double max_delta(const ExecResult& a, const ExecResult& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.dense_out.values.size(); ++i)
    m = std::max(m, std::abs(a.dense_out.values[i] - b.dense_out.values[i]));
  for (size_t i = 0; i < a.sparse_out_values.size(); ++i)
    m = std::max(m, std::abs(a.sparse_out_values[i] - b.sparse_out_values[i]));
  return m;
}

int cmd_optimize(const CommonArgs& a) {
  LoadedProblem p = load_problem(a, /*need_tensors=*/false);
  auto model = parse_cost_model(a.cost);
  JointOptions jo;
  jo.use_depth_filter = !a.no_depth_filter;
  auto [path, result] = joint_search(p.spec, *model, jo);
  RunReport rep = make_report(p.spec, path, result, *model);
  FusedLoopForest forest = build_forest(p.spec, path, result.best.order);
  attach_buffers(rep, p.spec, path, forest);
  if (!a.tns.empty()) {
    LoadedProblem full = load_problem(a, /*need_tensors=*/true);
    rep.flops_estimate = flops_estimate(full.spec, path, result.best.order, full.csf);
  }
  emit_report(rep, a.json_out);
  return 0;
}

int cmd_explain(const CommonArgs& a) {
  LoadedProblem p = load_problem(a, /*need_tensors=*/false);
  ContractionPath path;
  LoopOrder order;
  if (!a.order.empty()) {
    std::tie(path, order) = resolve_order(p.spec, a.order);
  } else {
    auto model = parse_cost_model(a.cost);
    JointOptions jo;
    jo.use_depth_filter = !a.no_depth_filter;
    auto [best_path, result] = joint_search(p.spec, *model, jo);
    path = best_path;
    order = result.best.order;
  }
  FusedLoopForest forest = build_forest(p.spec, path, order);
  std::cout << render_loop_nest(p.spec, path, forest);
  return 0;
}

int cmd_run(const CommonArgs& a, bool verify) {
  LoadedProblem p = load_problem(a, /*need_tensors=*/true);
  auto model = parse_cost_model(a.cost);
  JointOptions jo;
  jo.use_depth_filter = !a.no_depth_filter;
  auto [path, result] = joint_search(p.spec, *model, jo);

  ExecOptions eo;
  eo.buffer_limit_bytes = a.buffer_limit_bytes;
  ExecPlan plan = prepare(p.spec, path, result.best.order, p.inputs, eo);
  ExecResult res = execute(plan);

  RunReport rep = make_report(p.spec, path, result, *model);
  attach_buffers(rep, p.spec, path, plan.forest());
  attach_hooks(rep, plan.hooks());
  rep.flops_estimate = flops_estimate(p.spec, path, result.best.order, p.csf);
  rep.measured_multiply_adds = res.stats.multiply_adds;
  rep.buffer_bytes = plan.total_buffer_bytes();
  rep.exec_seconds = res.stats.wall_seconds;

  int rc = 0;
  if (verify) {
    ExecResult oracle = execute_unfactorized(p.spec, p.inputs);
    const double tol = 1e-10 * (1.0 + max_abs(oracle));
    const double delta = max_delta(res, oracle);
    rep.verify_delta = delta;
    rep.verify_tolerance = tol;
    if (delta > tol) rc = 2;
  }
  emit_report(rep, a.json_out);

  if (!a.out_file.empty()) {
    std::ofstream out(a.out_file);
    if (p.spec.output_sparse) {
      CooTensor pattern = csf_to_coo(p.csf);
      for (int64_t e = 0; e < pattern.nnz(); ++e)
        pattern.entries[e].second = res.sparse_out_values[e];
      write_tns(out, pattern);
    } else {
      write_tns_dense(out, res.dense_out);
    }
  }
  if (verify) std::cout << (rc == 0 ? "verify: PASS\n" : "verify: FAIL\n");
  return rc;
}

int cmd_bench(const CommonArgs& a) {
  LoadedProblem p = load_problem(a, /*need_tensors=*/true);
  auto model = parse_cost_model(a.cost);
  JointOptions jo;
  jo.use_depth_filter = !a.no_depth_filter;
  auto [path, result] = joint_search(p.spec, *model, jo);
  std::cout << "path: " << path.describe(p.spec) << "\n";
  auto rows = bench_orders(p.spec, path, *model, p.inputs, a.top_k);
  for (size_t r = 0; r < rows.size(); ++r) {
    std::string orders;
    for (size_t t = 0; t < rows[r].order.per_term.size(); ++t) {
      if (t) orders += ";";
      for (size_t k = 0; k < rows[r].order.per_term[t].size(); ++k) {
        if (k) orders += ",";
        orders += p.spec.index_names[rows[r].order.per_term[t][k]];
      }
    }
    std::cout << "rank " << r + 1 << ": cost=" << rows[r].cost.to_string()
              << " seconds=" << rows[r].seconds << " multiply_adds=" << rows[r].multiply_adds
              << " orders=" << orders << "\n";
  }
  std::cout << "ranking_inversions: " << ranking_inversions(rows) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"SpTTN kernel planner and executor"};
  app.require_subcommand(1);

  CommonArgs a;
  auto* optimize = app.add_subcommand("optimize", "plan the cost-optimal loop nest");
  add_common(optimize, a);
  auto* explain = app.add_subcommand("explain", "print the fused loop nest as pseudocode");
  add_common(explain, a);
  explain->add_option("--order", a.order, "per-term index orders, e.g. \"i,j,s,k;i,j,s,r\"");
  auto* run = app.add_subcommand("run", "execute the optimal plan");
  add_common(run, a);
  run->add_option("--out", a.out_file, "write the output tensor here (.tns)");
  auto* verify = app.add_subcommand("verify", "run and compare against the unfactorized oracle");
  add_common(verify, a);
  auto* bench = app.add_subcommand("bench", "time the top-k model-ranked loop nests");
  add_common(bench, a);
  bench->add_option("--top-k", a.top_k, "number of candidates to time");

  std::vector<const char*> argv;
  argv.push_back("spttn");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(a);
    if (explain->parsed()) return cmd_explain(a);
    if (run->parsed()) return cmd_run(a, false);
    if (verify->parsed()) return cmd_run(a, true);
    if (bench->parsed()) return cmd_bench(a);
  } catch (const resource_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace spttn
