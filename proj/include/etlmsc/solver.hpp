#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etlmsc/graph.hpp"
#include "etlmsc/tensor.hpp"

namespace etlmsc {

/// ADMM settings for the essential-tensor model
///
///   min_{Z,E}  tnn(Z) / n3 + lambda * ||E||_{2,1}   s.t.  P = Z + E.
///
/// tnn is measured per Fourier slice average (tnn / n3), which is the scale
/// the usual 1 / sqrt(n3 * max(n1, n2)) style of lambda refers to. With the
/// raw slice sum, any lambda below sqrt(n3 / (n1 n2)) makes Z = 0 optimal.
struct SolverConfig {
  std::optional<double> lambda;  ///< unset: default_lambda(dims)
  double mu0 = 1e-3;
  double rho = 2.0;
  double mu_max = 1e8;
  double eps = 1e-6;
  int max_iters = 200;
  bool rotated = true;

  void validate() const;
  double lambda_for(const Dims& dims) const;
};

/// 10 / sqrt(n1 n2 n3). Z = 0 is a global minimizer for every input once
/// lambda < 1 / sqrt(n1 n2 n3), so the default sits a decade above that.
double default_lambda(const Dims& dims);

/// 1 / sqrt(n3 * max(n1, n2)), the classical tensor RPCA weight.
double trpca_lambda(const Dims& dims);

/// Tuned lambda values reported for the benchmark datasets. Lookup ignores case;
/// keys are ("bbc-sport", "uci-digits", "coil-20", "scene-15", "mitindoor-67",
/// "caltech-101", "notting-hill").
const std::map<std::string, double, std::less<>>& lambda_presets();
std::optional<double> lambda_preset(std::string_view name);

struct SolverIteration {
  double dz_inf = 0;        ///< ||Z_k - Z_{k-1}||_inf
  double de_inf = 0;        ///< ||E_k - E_{k-1}||_inf
  double residual_inf = 0;  ///< ||P - Z_k - E_k||_inf
  double mu = 0;            ///< penalty used by this iteration
  double tnn_value = 0;     ///< tnn(Z_k)
  double l21_value = 0;     ///< ||E_k||_{2,1}
  double z_seconds = 0;     ///< wall time of the Z update
  double seconds = 0;       ///< wall time of the whole iteration

  double error() const { return std::max({dz_inf, de_inf, residual_inf}); }
};

struct SolverTrace {
  std::vector<SolverIteration> iterations;

  int size() const { return static_cast<int>(iterations.size()); }
  double final_error() const;
  double mean_z_seconds() const;
};

struct EtlmscResult {
  Tensor3 Z;
  Tensor3 E;
  Tensor3 Y;
  Matrix Zstar;  ///< N x N aggregate of Z, oriented like the input P matrices
  SolverTrace trace;
  bool converged = false;
  double lambda = 0;  ///< the value actually used
};

/// Raised when admm_solve hits max_iters; the partial result travels with it.
class NotConvergedError : public Error {
 public:
  explicit NotConvergedError(EtlmscResult result);
  const EtlmscResult& result() const noexcept { return result_; }
  EtlmscResult& result() noexcept { return result_; }

 private:
  EtlmscResult result_;
};

/// Per-view Gaussian kernel -> transition matrix, stacked as frontal slices
/// (N x N x M). With rotated set the stack is cyclically shifted to N x M x N.
/// Views hold one sample per row.
Tensor3 build_probability_tensor(const std::vector<Matrix>& views, double sigma_ratio,
                                 bool rotated);

/// Per-view transition matrices of the above, unstacked.
std::vector<Matrix> view_transitions(const std::vector<Matrix>& views, double sigma_ratio);

/// Block soft-thresholding of every mode-3 fiber: f -> max(1 - t / ||f||, 0) f.
Tensor3 solve_e_subproblem(const Tensor3& d, double threshold);

/// Observer called after every iteration with (iteration, Z, E, Y, mu used).
using IterationCallback =
    std::function<void(int, const Tensor3&, const Tensor3&, const Tensor3&, double)>;

/// Two-block ADMM. Throws NotConvergedError after cfg.max_iters iterations.
EtlmscResult admm_solve(const Tensor3& p, const SolverConfig& cfg,
                        const IterationCallback& callback = {});

/// Sum over views of Z, read back in the orientation of the input transition
/// matrices: Z*(i, j) = sum_v Z(j, v, i) when rotated, sum_v Z(i, j, v) otherwise.
Matrix aggregate_zstar(const Tensor3& z, bool rotated);

struct ClusterOptions {
  double sigma_ratio = 1.0;
  SpectralOptions spectral;
};

struct ClusterOutcome {
  Partition partition;
  EtlmscResult solver;  ///< solver.converged is false if the cap was hit
  SpectralClustering spectral;
  double build_seconds = 0;
  double solve_seconds = 0;
  double cluster_seconds = 0;
};

/// Full pipeline: probability tensor -> ADMM -> Markov spectral clustering of
/// Z*. Hitting max_iters does not throw here; the outcome reports it.
ClusterOutcome cluster(const std::vector<Matrix>& views, int num_clusters,
                       const SolverConfig& cfg, std::uint64_t seed,
                       const ClusterOptions& options = {});

/// Elementwise mean of the per-view transition matrices.
Matrix mean_transition(const std::vector<Matrix>& ps);

/// Single-view and averaged-P spectral clustering baselines. Keys are
/// "spc_view_<v>" (1-based), "mean_p", and "spc_best" when truth is given.
std::map<std::string, Partition> baselines(const std::vector<Matrix>& views, int num_clusters,
                                           std::uint64_t seed, const ClusterOptions& options = {},
                                           const Partition* truth = nullptr);

}  // namespace etlmsc
