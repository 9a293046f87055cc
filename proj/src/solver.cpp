#include "etlmsc/solver.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>

#include "etlmsc/metrics.hpp"
#include "etlmsc/tsvd.hpp"

namespace etlmsc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double max_abs_diff(const Tensor3& a, const Tensor3& b) {
  return (a.flat() - b.flat()).cwiseAbs().maxCoeff();
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (lambda && !(*lambda > 0 && std::isfinite(*lambda))) fail("lambda must be positive");
  if (!(mu0 > 0)) fail("mu0 must be positive");
  if (!(rho > 1)) fail("rho must exceed 1");
  if (!(mu_max > mu0) || !std::isfinite(mu_max)) fail("mu_max must be finite and exceed mu0");
  if (!(eps > 0)) fail("eps must be positive");
  if (max_iters < 1) fail("max_iters must be at least 1");
}

double SolverConfig::lambda_for(const Dims& dims) const {
  return lambda ? *lambda : default_lambda(dims);
}

double default_lambda(const Dims& dims) {
  return 10.0 / std::sqrt(static_cast<double>(dims.n1) * static_cast<double>(dims.n2) *
                          static_cast<double>(dims.n3));
}

double trpca_lambda(const Dims& dims) {
  return 1.0 / std::sqrt(static_cast<double>(dims.n3) *
                         static_cast<double>(std::max(dims.n1, dims.n2)));
}

const std::map<std::string, double, std::less<>>& lambda_presets() {
  static const std::map<std::string, double, std::less<>> presets = {
      {"bbc-sport", 0.03},    {"uci-digits", 0.007},   {"coil-20", 0.003},
      {"scene-15", 0.003},    {"mitindoor-67", 0.003}, {"caltech-101", 0.003},
      {"notting-hill", 0.0008},
  };
  return presets;
}

std::optional<double> lambda_preset(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const auto& presets = lambda_presets();
  if (auto it = presets.find(key); it != presets.end()) return it->second;
  return std::nullopt;
}

double SolverTrace::final_error() const {
  return iterations.empty() ? 0.0 : iterations.back().error();
}

double SolverTrace::mean_z_seconds() const {
  if (iterations.empty()) return 0.0;
  double total = 0;
  for (const auto& it : iterations) total += it.z_seconds;
  return total / static_cast<double>(iterations.size());
}

NotConvergedError::NotConvergedError(EtlmscResult result)
    : Error(ErrorCode::kNotConverged,
            [&] {
              std::ostringstream msg;
              msg << "ADMM stopped after " << result.trace.size()
                  << " iterations with error " << result.trace.final_error();
              return msg.str();
            }()),
      result_(std::move(result)) {}

std::vector<Matrix> view_transitions(const std::vector<Matrix>& views, double sigma_ratio) {
  if (views.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one view is required");
  const Index n = views.front().rows();
  for (std::size_t v = 1; v < views.size(); ++v) {
    if (views[v].rows() != n) {
      std::ostringstream msg;
      msg << "view " << v + 1 << " has " << views[v].rows() << " samples, view 1 has " << n;
      throw Error(ErrorCode::kViewSizeMismatch, msg.str());
    }
  }
  std::vector<Matrix> out(views.size());
  for (std::size_t v = 0; v < views.size(); ++v) {
    out[v] = transition_matrix(gaussian_similarity(views[v], sigma_ratio)).values;
  }
  return out;
}

Tensor3 build_probability_tensor(const std::vector<Matrix>& views, double sigma_ratio,
                                 bool rotated) {
  const std::vector<Matrix> ps = view_transitions(views, sigma_ratio);
  const Index n = ps.front().rows();
  Tensor3 stack(n, n, static_cast<Index>(ps.size()));
  for (std::size_t v = 0; v < ps.size(); ++v) stack.frontal_slice(static_cast<Index>(v)) = ps[v];
  return rotated ? rotate(stack) : stack;
}

Tensor3 solve_e_subproblem(const Tensor3& d, double threshold) {
  if (!(threshold >= 0)) throw Error(ErrorCode::kInvalidArgument, "threshold must be >= 0");
  const Index fibers = d.n1() * d.n2();
  Tensor3 out(d.dims());
  // Fibers are the rows of this n1 n2 x n3 view of the layout.
  Eigen::Map<const Matrix> in(d.data().data(), fibers, d.n3());
  Eigen::Map<Matrix> res(out.data().data(), fibers, d.n3());
  for (Index f = 0; f < fibers; ++f) {
    const double norm = in.row(f).norm();
    if (norm > threshold) res.row(f) = ((norm - threshold) / norm) * in.row(f);
  }
  return out;
}

Matrix aggregate_zstar(const Tensor3& z, bool rotated) {
  const Tensor3 stack = rotated ? unrotate(z) : z;
  Matrix sum = Matrix::Zero(stack.n1(), stack.n2());
  for (Index k = 0; k < stack.n3(); ++k) sum += stack.frontal_slice(k);
  return sum;
}

EtlmscResult admm_solve(const Tensor3& p, const SolverConfig& cfg,
                        const IterationCallback& callback) {
  cfg.validate();
  const Dims dims = p.dims();
  const double n3 = static_cast<double>(dims.n3);
  const double lambda = cfg.lambda_for(dims);

  EtlmscResult r;
  r.lambda = lambda;
  r.Z = Tensor3(dims);
  r.E = Tensor3(dims);
  r.Y = Tensor3(dims);
  double mu = cfg.mu0;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const auto start = Clock::now();
    SolverIteration rec;
    rec.mu = mu;

    // Z-step: proximal map of tnn / n3 with weight 1 / mu, i.e. Fourier
    // threshold n3 / mu.
    Tensor3 target = p - r.E;
    target.flat() += r.Y.flat() / mu;
    ShrinkResult shrink = tubal_shrink(target, n3 / mu);
    rec.z_seconds = seconds_since(start);

    // E-step: lambda ||E||_{2,1} in the same units, threshold n3 lambda / mu.
    target = p - shrink.value;
    target.flat() += r.Y.flat() / mu;
    Tensor3 e = solve_e_subproblem(target, n3 * lambda / mu);

    Tensor3 residual = p - shrink.value;
    residual -= e;
    r.Y.flat() += mu * residual.flat();

    rec.dz_inf = max_abs_diff(shrink.value, r.Z);
    rec.de_inf = max_abs_diff(e, r.E);
    rec.residual_inf = linf_norm(residual);
    rec.tnn_value = shrink.tnn;
    rec.l21_value = l21_norm(e);
    r.Z = std::move(shrink.value);
    r.E = std::move(e);
    rec.seconds = seconds_since(start);
    r.trace.iterations.push_back(rec);

    if (callback) callback(iter, r.Z, r.E, r.Y, mu);
    if (!std::isfinite(rec.error())) {
      throw Error(ErrorCode::kInvalidArgument, "ADMM produced a non-finite iterate");
    }
    if (rec.error() <= cfg.eps) {
      r.converged = true;
      break;
    }
    mu = std::min(cfg.rho * mu, cfg.mu_max);
  }

  r.Zstar = aggregate_zstar(r.Z, cfg.rotated);
  if (!r.converged) throw NotConvergedError(std::move(r));
  return r;
}

ClusterOutcome cluster(const std::vector<Matrix>& views, int num_clusters,
                       const SolverConfig& cfg, std::uint64_t seed,
                       const ClusterOptions& options) {
  ClusterOutcome out;
  auto start = Clock::now();
  const Tensor3 p = build_probability_tensor(views, options.sigma_ratio, cfg.rotated);
  out.build_seconds = seconds_since(start);

  start = Clock::now();
  try {
    out.solver = admm_solve(p, cfg);
  } catch (NotConvergedError& e) {
    out.solver = std::move(e.result());
  }
  out.solve_seconds = seconds_since(start);

  start = Clock::now();
  out.spectral = markov_spectral_cluster_detailed(out.solver.Zstar, num_clusters, seed,
                                                  options.spectral);
  out.partition = out.spectral.partition;
  out.cluster_seconds = seconds_since(start);
  return out;
}

Matrix mean_transition(const std::vector<Matrix>& ps) {
  if (ps.empty()) throw Error(ErrorCode::kInvalidArgument, "no matrices to average");
  // Running mean, so identical inputs average to themselves bit for bit.
  Matrix mean = ps.front();
  for (std::size_t v = 1; v < ps.size(); ++v) {
    mean += (ps[v] - mean) / static_cast<double>(v + 1);
  }
  return mean;
}

std::map<std::string, Partition> baselines(const std::vector<Matrix>& views, int num_clusters,
                                           std::uint64_t seed, const ClusterOptions& options,
                                           const Partition* truth) {
  const std::vector<Matrix> ps = view_transitions(views, options.sigma_ratio);
  std::map<std::string, Partition> out;
  std::string best_name;
  double best_nmi = -1;
  for (std::size_t v = 0; v < ps.size(); ++v) {
    const std::string name = "spc_view_" + std::to_string(v + 1);
    out[name] = markov_spectral_cluster(ps[v], num_clusters, seed, options.spectral);
    if (truth) {
      const double score = nmi(*truth, out[name]);
      if (score > best_nmi) {
        best_nmi = score;
        best_name = name;
      }
    }
  }
  out["mean_p"] = markov_spectral_cluster(mean_transition(ps), num_clusters, seed, options.spectral);
  if (truth) out["spc_best"] = out[best_name];
  return out;
}

}  // namespace etlmsc
