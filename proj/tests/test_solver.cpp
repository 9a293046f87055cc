#include <doctest.h>

#include "etlmsc/datagen.hpp"
#include "etlmsc/metrics.hpp"
#include "etlmsc/solver.hpp"
#include "etlmsc/tsvd.hpp"
#include "oracles.hpp"

using namespace etlmsc;

namespace {

double e_objective(const Tensor3& e, const Tensor3& d, double t) {
  return t * l21_norm(e) + 0.5 * oracle::fro2(e - d);
}

Tensor3 small_probability_tensor(std::uint64_t seed, bool rotated) {
  MultiViewSpec spec = complementary_corpus(seed);
  spec.n = 30;
  return build_probability_tensor(gen_multiview(spec).views, 1.0, rotated);
}

}  // namespace

TEST_CASE("probability tensor") {
  Rng rng(61);
  SUBCASE("single view, rotated: fiber (j, 0, :) is column j of P") {
    const std::vector<Matrix> views{oracle::random_matrix(6, 3, rng)};
    const Tensor3 t = build_probability_tensor(views, 1.0, true);
    const Matrix p = view_transitions(views, 1.0).front();
    CHECK(t.dims() == Dims{6, 1, 6});
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 6; ++j) CHECK(t(j, 0, i) == p(i, j));
  }
  SUBCASE("identical views give identical slices") {
    const Matrix x = oracle::random_matrix(7, 2, rng);
    const Tensor3 t = build_probability_tensor({x, x}, 1.0, false);
    CHECK(Matrix(t.frontal_slice(0)) == Matrix(t.frontal_slice(1)));
  }
  SUBCASE("row sums survive the rotation") {
    const std::vector<Matrix> views{oracle::random_matrix(10, 2, rng), oracle::random_matrix(10, 4, rng),
                                    oracle::random_matrix(10, 3, rng)};
    const Tensor3 t = build_probability_tensor(views, 1.0, true);
    CHECK(t.dims() == Dims{10, 3, 10});
    for (Index v = 0; v < 3; ++v)
      for (Index i = 0; i < 10; ++i) {
        double row = 0;
        for (Index j = 0; j < 10; ++j) row += t(j, v, i);
        CHECK(std::abs(row - 1.0) <= 1e-12);
      }
  }
  SUBCASE("views must share the sample count") {
    try {
      (void)build_probability_tensor({oracle::random_matrix(5, 2, rng), oracle::random_matrix(6, 2, rng)},
                                     1.0, true);
      FAIL("expected ViewSizeMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kViewSizeMismatch);
    }
  }
}

TEST_CASE("E subproblem") {
  SUBCASE("everything below the threshold vanishes") {
    Tensor3 d(2, 2, 3);
    d(0, 0, 0) = 0.3;
    d(1, 1, 2) = -0.4;
    CHECK(fro_norm(solve_e_subproblem(d, 0.5)) == 0);
  }
  SUBCASE("fiber (3, 4) with threshold 1") {
    Tensor3 d(1, 1, 2);
    d(0, 0, 0) = 3;
    d(0, 0, 1) = 4;
    const Tensor3 e = solve_e_subproblem(d, 1.0);
    CHECK(e(0, 0, 0) == doctest::Approx(2.4).epsilon(1e-15));
    CHECK(e(0, 0, 1) == doctest::Approx(3.2).epsilon(1e-15));
  }
  SUBCASE("optimality") {
    Rng rng(62);
    const Tensor3 d = oracle::random_tensor({3, 2, 4}, rng);
    const Tensor3 e = solve_e_subproblem(d, 0.3);
    CHECK((e.flat() - oracle::fiber_shrink(d, 0.3).flat()).cwiseAbs().maxCoeff() <= 1e-15);
    const double best = e_objective(e, d, 0.3);
    for (int p = 0; p < 1000; ++p) {
      Tensor3 delta = oracle::random_tensor(d.dims(), rng);
      delta *= 0.1 * rng.uniform() / fro_norm(delta);
      CHECK(best <= e_objective(e + delta, d, 0.3) + 1e-8);
    }
  }
}

TEST_CASE("solver configuration") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.mu0 == 1e-3);
  CHECK(cfg.rho == 2.0);
  CHECK(cfg.mu_max == 1e8);
  CHECK(cfg.eps == 1e-6);
  CHECK(cfg.max_iters == 200);
  CHECK(cfg.rotated);
  CHECK(cfg.lambda_for({300, 3, 300}) == doctest::Approx(10.0 / std::sqrt(270000.0)));
  CHECK(trpca_lambda({60, 3, 60}) == doctest::Approx(1.0 / 60.0));
  CHECK(lambda_preset("BBC-Sport") == 0.03);
  CHECK(lambda_preset("uci-digits") == 0.007);
  CHECK(lambda_preset("caltech-101") == 0.003);
  CHECK(lambda_preset("notting-hill") == 0.0008);
  CHECK_FALSE(lambda_preset("unknown").has_value());
  cfg.rho = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolverConfig{};
  cfg.lambda = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("ADMM") {
  SUBCASE("zero input is a fixed point") {
    const EtlmscResult r = admm_solve(Tensor3(4, 2, 4), SolverConfig{});
    CHECK(r.converged);
    CHECK(r.trace.size() == 1);
    CHECK(fro_norm(r.Z) == 0);
    CHECK(fro_norm(r.E) == 0);
  }
  SUBCASE("huge lambda suppresses E") {
    SolverConfig cfg;
    cfg.lambda = 1e6;
    const Tensor3 p = small_probability_tensor(1, true);
    const EtlmscResult r = admm_solve(p, cfg);
    CHECK(r.converged);
    CHECK(fro_norm(r.E) == 0);
    CHECK(linf_norm(p - r.Z) <= cfg.eps);
  }
  SUBCASE("trace, residual, objective and multiplier replay") {
    const Tensor3 p = small_probability_tensor(2, true);
    SolverConfig cfg;
    Tensor3 replay(p.dims());
    const EtlmscResult r = admm_solve(p, cfg, [&](int, const Tensor3& z, const Tensor3& e, const Tensor3&, double mu) {
      Tensor3 res = p - z;
      res -= e;
      replay.flat() += mu * res.flat();
    });
    REQUIRE(r.converged);
    CHECK((replay.flat() - r.Y.flat()).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(linf_norm(p - r.Z - r.E) <= cfg.eps);
    double prev_mu = 0;
    for (const auto& it : r.trace.iterations) {
      CHECK(std::isfinite(it.error()));
      CHECK(it.mu >= prev_mu);
      CHECK(it.mu <= cfg.mu_max);
      prev_mu = it.mu;
    }
    CHECK(r.trace.iterations.front().mu == cfg.mu0);
    CHECK(r.trace.iterations.back().tnn_value == doctest::Approx(tnn(r.Z)).epsilon(1e-9));
    CHECK(r.trace.iterations.back().l21_value == doctest::Approx(l21_norm(r.E)).epsilon(1e-12));
    // The solver weighs tnn / n3 against lambda, so its objective is bounded by
    // the trivial split Z = P, E = 0; the raw-tnn form follows since n3 >= 1.
    const double n3 = static_cast<double>(p.n3());
    CHECK(tnn(r.Z) / n3 + r.lambda * l21_norm(r.E) <= tnn(p) / n3 + 1e-9);
    CHECK(tnn(r.Z) + r.lambda * l21_norm(r.E) <= tnn(p) + 1e-9);
  }
  SUBCASE("mu is capped") {
    SolverConfig cfg;
    cfg.mu0 = 1.0;
    cfg.mu_max = 4.0;
    cfg.max_iters = 6;
    cfg.eps = 1e-300;
    try {
      (void)admm_solve(small_probability_tensor(3, true), cfg);
      FAIL("expected NotConverged");
    } catch (const NotConvergedError& e) {
      CHECK(e.code() == ErrorCode::kNotConverged);
      const auto& it = e.result().trace.iterations;
      REQUIRE(it.size() == 6);
      CHECK(it[0].mu == 1.0);
      CHECK(it[1].mu == 2.0);
      CHECK(it[2].mu == 4.0);
      CHECK(it[5].mu == 4.0);
      CHECK_FALSE(e.result().converged);
      CHECK(e.result().Zstar.rows() == 30);
    }
  }
  SUBCASE("low-rank recovery on the unrotated 60x60x3 layout") {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      LowRankSparseSpec spec{60, 60, 3, 2, 0.05};
      spec.seed = seed;
      const LowRankSparse g = gen_lowrank_sparse(spec);
      SolverConfig cfg;
      cfg.lambda = trpca_lambda(g.observed.dims());
      const EtlmscResult r = admm_solve(g.observed, cfg);
      CHECK(fro_norm(r.Z - g.low_rank) / fro_norm(g.low_rank) <= 1e-3);
    }
  }
}

TEST_CASE("Z* aggregation") {
  Rng rng(63);
  const Tensor3 stack = oracle::random_tensor({5, 5, 3}, rng);
  const Matrix expect = stack.frontal_slice(0) + stack.frontal_slice(1) + stack.frontal_slice(2);
  CHECK((aggregate_zstar(stack, false) - expect).cwiseAbs().maxCoeff() == 0);
  CHECK((aggregate_zstar(rotate(stack), true) - expect).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("clustering pipeline") {
  SUBCASE("identical noiseless views, 20 seeds") {
    MultiViewSpec spec;
    spec.n = 150;
    spec.views = 1;
    spec.dims = {3};
    spec.separation = 4.0;
    spec.noise = {0.0};
    const MultiViewData data = gen_multiview(spec);
    const std::vector<Matrix> views(3, data.views.front());
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const ClusterOutcome out = cluster(views, 3, SolverConfig{}, seed);
      CHECK(out.solver.converged);
      CHECK(pair_metrics(data.truth, out.partition).ari == 1.0);
    }
  }
  SUBCASE("a vanishing lambda destroys the result") {
    const MultiViewData data = gen_multiview(standard_corpus(0));
    SolverConfig tiny;
    tiny.lambda = 1e-7;
    const double bad = nmi(data.truth, cluster(data.views, 3, tiny, 0).partition);
    const double good = nmi(data.truth, cluster(data.views, 3, SolverConfig{}, 0).partition);
    CHECK(bad < good);
  }
  SUBCASE("complementary views beat every single view") {
    const MultiViewData data = gen_multiview(complementary_corpus(0));
    const auto base = baselines(data.views, 3, 0, {}, &data.truth);
    const ClusterOutcome out = cluster(data.views, 3, SolverConfig{}, 0);
    CHECK(nmi(data.truth, out.partition) > nmi(data.truth, base.at("spc_best")));
  }
}

TEST_CASE("baselines") {
  Rng rng(64);
  SUBCASE("single view") {
    MultiViewSpec spec;
    spec.n = 30;
    spec.views = 1;
    const MultiViewData data = gen_multiview(spec);
    const auto without = baselines(data.views, 3, 0);
    CHECK(without.size() == 2);
    CHECK(without.count("spc_view_1") == 1);
    CHECK(without.count("mean_p") == 1);
    const auto with = baselines(data.views, 3, 0, {}, &data.truth);
    CHECK(with.at("spc_best") == with.at("spc_view_1"));
  }
  SUBCASE("identical views average to the view itself") {
    const Matrix x = oracle::random_matrix(12, 3, rng);
    const std::vector<Matrix> ps = view_transitions({x, x, x}, 1.0);
    CHECK(mean_transition(ps) == ps.front());
    const auto b = baselines({x, x, x}, 2, 4);
    CHECK(b.at("mean_p") == b.at("spc_view_1"));
  }
}
