#include "etlmsc/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "etlmsc/datagen.hpp"
#include "etlmsc/io.hpp"
#include "etlmsc/metrics.hpp"
#include "etlmsc/solver.hpp"

namespace etlmsc {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct RunManifest {
  std::vector<std::string> views;
  std::string truth;
  int clusters = 0;
  double lambda = 0;
  CLI::Option* lambda_opt = nullptr;
  std::string preset;
  double sigma_ratio = 1.0;
  std::uint64_t seed = 0;
  int restarts = 20;
  bool normalize_rows = false;
  SolverConfig solver;
  std::string out = ".";
  int threads = 0;
};

struct GenFlags {
  MultiViewSpec spec;
  std::string out = ".";
};

void add_run_flags(CLI::App* cmd, RunManifest& m) {
  cmd->add_option("--views", m.views, "View matrices: headerless CSV, one row per sample")
      ->required()
      ->expected(1, -1);
  cmd->add_option("--truth", m.truth, "Ground-truth labels, one integer per line");
  cmd->add_option("--clusters", m.clusters, "Number of clusters C")->required();
  m.lambda_opt = cmd->add_option("--lambda", m.lambda, "Sparsity weight (default 10/sqrt(n1 n2 n3))");
  cmd->add_option("--preset", m.preset, "Use a tuned lambda by dataset name, e.g. bbc-sport");
  cmd->add_option("--sigma-ratio", m.sigma_ratio, "Kernel width over mean pairwise distance")
      ->capture_default_str();
  cmd->add_option("--seed", m.seed, "Seed for k-means")->capture_default_str();
  cmd->add_option("--restarts", m.restarts, "k-means restarts")->capture_default_str();
  cmd->add_option("--normalize-rows", m.normalize_rows,
                  "Unit-normalize embedding rows before k-means")
      ->capture_default_str();
  cmd->add_option("--rotated", m.solver.rotated, "Rotate the tensor to N x M x N")
      ->capture_default_str();
  cmd->add_option("--mu0", m.solver.mu0)->capture_default_str();
  cmd->add_option("--rho", m.solver.rho)->capture_default_str();
  cmd->add_option("--mu-max", m.solver.mu_max)->capture_default_str();
  cmd->add_option("--eps", m.solver.eps)->capture_default_str();
  cmd->add_option("--max-iters", m.solver.max_iters)->capture_default_str();
  cmd->add_option("--out", m.out, "Output directory (created if missing)")->capture_default_str();
  cmd->add_option("--threads", m.threads, "Worker threads, 0 = all cores")->capture_default_str();
}

void resolve_lambda(RunManifest& m) {
  if (m.lambda_opt->count() > 0) {
    m.solver.lambda = m.lambda;
  } else if (!m.preset.empty()) {
    m.solver.lambda = lambda_preset(m.preset);
    if (!m.solver.lambda) throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + m.preset + "'");
  }
}

void apply_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::vector<Matrix> load_views(const std::vector<std::string>& paths) {
  std::vector<Matrix> views;
  for (const auto& p : paths) views.push_back(read_matrix_csv(p));
  const Index n = views.front().rows();
  for (std::size_t v = 1; v < views.size(); ++v) {
    if (views[v].rows() != n) {
      throw Error(ErrorCode::kViewSizeMismatch,
                  paths[v] + " has " + std::to_string(views[v].rows()) + " rows, " + paths[0] +
                      " has " + std::to_string(n));
    }
  }
  return views;
}

std::optional<Partition> load_truth(const std::string& path, Index n) {
  if (path.empty()) return std::nullopt;
  Partition truth = make_partition(read_labels(path));
  if (truth.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, path + " has " + std::to_string(truth.size()) +
                                                " labels, the views have " + std::to_string(n) +
                                                " samples");
  }
  return truth;
}

ordered_json metrics_json(const MetricSuite& s) {
  return ordered_json{{"nmi", s.nmi},           {"acc", s.acc},
                      {"ari", s.ari},           {"f_score", s.f_score},
                      {"precision", s.precision}, {"recall", s.recall}};
}

ordered_json config_json(const RunManifest& m, const Dims& dims, double lambda) {
  return ordered_json{
      {"views", m.views},
      {"truth", m.truth.empty() ? ordered_json(nullptr) : ordered_json(m.truth)},
      {"clusters", m.clusters},
      {"lambda", lambda},
      {"lambda_source", m.lambda_opt->count() > 0 ? "flag" : (m.preset.empty() ? "default" : "preset:" + m.preset)},
      {"sigma_ratio", m.sigma_ratio},
      {"seed", m.seed},
      {"restarts", m.restarts},
      {"normalize_rows", m.normalize_rows},
      {"rotated", m.solver.rotated},
      {"mu0", m.solver.mu0},
      {"rho", m.solver.rho},
      {"mu_max", m.solver.mu_max},
      {"eps", m.solver.eps},
      {"max_iters", m.solver.max_iters},
      {"out", m.out},
      {"threads", m.threads > 0 ? m.threads : omp_get_max_threads()},
      {"tensor_dims", {dims.n1, dims.n2, dims.n3}},
  };
}

ordered_json trace_json(const SolverTrace& trace) {
  ordered_json per = ordered_json::array();
  for (const auto& it : trace.iterations) {
    per.push_back({{"dz_inf", it.dz_inf},
                   {"de_inf", it.de_inf},
                   {"residual_inf", it.residual_inf},
                   {"error", it.error()},
                   {"mu", it.mu},
                   {"tnn", it.tnn_value},
                   {"l21", it.l21_value},
                   {"z_seconds", it.z_seconds},
                   {"seconds", it.seconds}});
  }
  return ordered_json{{"iterations", trace.size()},
                      {"final_error", trace.final_error()},
                      {"mean_z_seconds", trace.mean_z_seconds()},
                      {"per_iteration", per}};
}

ClusterOptions cluster_options(const RunManifest& m) {
  ClusterOptions o;
  o.sigma_ratio = m.sigma_ratio;
  o.spectral.kmeans.restarts = m.restarts;
  o.spectral.normalize_rows = m.normalize_rows;
  return o;
}

void check_clusters(int clusters) {
  if (clusters < 2) throw Error(ErrorCode::kInvalidArgument, "--clusters must be at least 2");
}

Dims tensor_dims(const std::vector<Matrix>& views, bool rotated) {
  const Index n = views.front().rows();
  const auto m = static_cast<Index>(views.size());
  return rotated ? Dims{n, m, n} : Dims{n, n, m};
}

int cmd_cluster(RunManifest& m, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  apply_threads(m.threads);
  check_clusters(m.clusters);
  resolve_lambda(m);
  m.solver.validate();
  const std::vector<Matrix> views = load_views(m.views);
  const auto truth = load_truth(m.truth, views.front().rows());

  const ClusterOutcome res = cluster(views, m.clusters, m.solver, m.seed, cluster_options(m));

  fs::create_directories(m.out);
  const fs::path dir(m.out);
  write_labels(dir / "labels.csv", res.partition.labels);
  write_matrix_csv(dir / "zstar.csv", res.spectral.transition);

  ordered_json doc;
  doc["command"] = "cluster";
  doc["converged"] = res.solver.converged;
  doc["samples"] = res.partition.size();
  if (truth) doc["metrics"] = metrics_json(evaluate(*truth, res.partition));
  doc["config"] = config_json(m, tensor_dims(views, m.solver.rotated), res.solver.lambda);
  doc["trace"] = trace_json(res.solver.trace);
  doc["timings"] = {
      {"build_seconds", res.build_seconds},
      {"solve_seconds", res.solve_seconds},
      {"cluster_seconds", res.cluster_seconds},
      {"total_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  write_text(dir / "result.json", doc.dump(2) + "\n");

  out << "clustered " << res.partition.size() << " samples into " << m.clusters
      << " clusters in " << res.solver.trace.size() << " ADMM iterations";
  if (truth) out << ", NMI " << doc["metrics"]["nmi"].get<double>();
  out << "\n";
  if (!res.solver.converged) {
    out << "warning: ADMM did not reach eps within " << m.solver.max_iters << " iterations\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_baselines(RunManifest& m, bool with_etlmsc, std::ostream& out) {
  apply_threads(m.threads);
  check_clusters(m.clusters);
  resolve_lambda(m);
  m.solver.validate();
  const std::vector<Matrix> views = load_views(m.views);
  const auto truth = load_truth(m.truth, views.front().rows());
  const ClusterOptions opts = cluster_options(m);

  std::map<std::string, Partition> methods =
      baselines(views, m.clusters, m.seed, opts, truth ? &*truth : nullptr);
  bool converged = true;
  if (with_etlmsc) {
    const ClusterOutcome res = cluster(views, m.clusters, m.solver, m.seed, opts);
    converged = res.solver.converged;
    methods["etlmsc"] = res.partition;
  }

  fs::create_directories(m.out);
  const fs::path dir(m.out);
  for (const auto& [name, part] : methods) write_labels(dir / ("labels_" + name + ".csv"), part.labels);
  if (truth) {
    std::ostringstream csv;
    csv << "method,nmi,acc,ari,f_score,precision,recall\n";
    for (const auto& [name, part] : methods) {
      const MetricSuite s = evaluate(*truth, part);
      csv << name << ',' << format_double(s.nmi) << ',' << format_double(s.acc) << ','
          << format_double(s.ari) << ',' << format_double(s.f_score) << ','
          << format_double(s.precision) << ',' << format_double(s.recall) << '\n';
      out << name << ": NMI " << s.nmi << ", ACC " << s.acc << "\n";
    }
    write_text(dir / "comparison.csv", csv.str());
  } else {
    for (const auto& entry : methods) out << "wrote labels_" << entry.first << ".csv\n";
  }
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_gen(GenFlags& g, std::ostream& out) {
  const MultiViewData data = gen_multiview(g.spec);
  fs::create_directories(g.out);
  const fs::path dir(g.out);
  ordered_json files = ordered_json::array();
  for (std::size_t v = 0; v < data.views.size(); ++v) {
    const fs::path p = dir / ("view_" + std::to_string(v + 1) + ".csv");
    write_matrix_csv(p, data.views[v]);
    files.push_back(p.string());
  }
  const fs::path truth = dir / "truth.csv";
  write_labels(truth, data.truth.labels);

  std::vector<Index> dims;
  std::vector<double> noise;
  for (int v = 0; v < g.spec.views; ++v) {
    dims.push_back(g.spec.dim(v));
    noise.push_back(g.spec.noise_std(v));
  }
  const ordered_json manifest = {
      {"samples", g.spec.n},   {"clusters", g.spec.clusters},
      {"num_views", g.spec.views}, {"dims", dims},
      {"separation", g.spec.separation}, {"noise", noise},
      {"complementary", g.spec.complementary}, {"seed", g.spec.seed},
      {"views", files},        {"truth", truth.string()},
  };
  out << manifest.dump(2) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& truth_path, const std::string& pred_path, std::ostream& out) {
  const Partition truth = make_partition(read_labels(truth_path));
  const Partition pred = make_partition(read_labels(pred_path));
  if (truth.size() != pred.size()) {
    throw Error(ErrorCode::kLengthMismatch, truth_path + " has " + std::to_string(truth.size()) +
                                                " labels, " + pred_path + " has " +
                                                std::to_string(pred.size()));
  }
  out << metrics_json(evaluate(truth, pred)).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Essential tensor learning for multi-view spectral clustering"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "TOML/INI file with option values; keys go under a [cluster], [baselines], "
                 "[gen] or [eval] section. Command-line flags override it.");

  RunManifest cluster_m;
  auto* cluster_cmd = app.add_subcommand("cluster", "Run the ETLMSC pipeline on a set of views");
  add_run_flags(cluster_cmd, cluster_m);

  RunManifest base_m;
  bool with_etlmsc = true;
  auto* base_cmd = app.add_subcommand("baselines", "Per-view and averaged spectral clustering");
  add_run_flags(base_cmd, base_m);
  base_cmd->add_option("--etlmsc", with_etlmsc, "Also run ETLMSC for the comparison table")
      ->capture_default_str();

  GenFlags gen;
  gen.spec.dims = {3};
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic multi-view corpus");
  gen_cmd->add_option("--samples,-n", gen.spec.n)->capture_default_str();
  gen_cmd->add_option("--clusters", gen.spec.clusters)->capture_default_str();
  gen_cmd->add_option("--num-views", gen.spec.views)->capture_default_str();
  gen_cmd->add_option("--dims", gen.spec.dims, "Features per view (one value or one per view)")
      ->capture_default_str();
  gen_cmd->add_option("--separation", gen.spec.separation)->capture_default_str();
  gen_cmd->add_option("--noise", gen.spec.noise, "Noise std (one value or one per view)");
  gen_cmd->add_flag("--complementary", gen.spec.complementary,
                    "View v merges cluster (v+1) mod C into cluster v mod C");
  gen_cmd->add_option("--seed", gen.spec.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out)->capture_default_str();

  std::string truth_path, pred_path;
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted labels against ground truth");
  eval_cmd->add_option("--truth", truth_path)->required();
  eval_cmd->add_option("--pred", pred_path)->required();

  // --config belongs to the top-level app; accept it anywhere on the line.
  std::vector<std::string> ordered;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      ordered.push_back(args[i]);
      ordered.push_back(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      ordered.push_back(args[i]);
    } else {
      rest.push_back(args[i]);
    }
  }
  ordered.insert(ordered.end(), rest.begin(), rest.end());

  try {
    std::vector<std::string> reversed(ordered.rbegin(), ordered.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*cluster_cmd) return cmd_cluster(cluster_m, out);
    if (*base_cmd) return cmd_baselines(base_m, with_etlmsc, out);
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*eval_cmd) return cmd_eval(truth_path, pred_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace etlmsc
