#include <doctest.h>

#include "etlmsc/metrics.hpp"
#include "oracles.hpp"

using namespace etlmsc;

namespace {

Partition part(std::vector<int> labels) { return make_partition(std::move(labels)); }

Partition relabel(const Partition& p, const std::vector<int>& perm) {
  Partition out = p;
  for (int& l : out.labels) l = perm[static_cast<std::size_t>(l)];
  out.num_clusters = static_cast<int>(perm.size());
  return out;
}

}  // namespace

TEST_CASE("NMI") {
  CHECK(nmi(part({0, 0, 1, 1, 2}), part({0, 0, 1, 1, 2})) == doctest::Approx(1.0));
  CHECK(nmi(part({0, 0, 1, 1, 2}), part({2, 2, 0, 0, 1})) == doctest::Approx(1.0));
  CHECK(nmi(part({0, 0, 1, 1}), part({0, 1, 0, 1})) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(nmi(part({0, 0, 0}), part({1, 1, 1})) == 1.0);
  CHECK(nmi(part({0, 0, 0}), part({0, 1, 1})) == 0.0);
  CHECK_THROWS_AS(nmi(part({0, 1}), part({0, 1, 1})), Error);
}

TEST_CASE("accuracy") {
  CHECK(accuracy(part({0, 1, 2, 2}), part({0, 1, 2, 2})) == 1.0);
  CHECK(accuracy(part({0, 0, 1, 1}), part({1, 1, 0, 0})) == 1.0);
  CHECK(accuracy(part({0, 0, 1, 1, 2, 2}), part({0, 1, 1, 2, 2, 0})) == doctest::Approx(0.5));
  // Unequal cluster counts are padded.
  CHECK(accuracy(part({0, 0, 1, 1}), part({0, 1, 2, 3})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(accuracy(part({0}), part({0, 1})), Error);
}

TEST_CASE("Hungarian assignment") {
  SUBCASE("identity-favouring cost") {
    Matrix c = Matrix::Ones(4, 4);
    c.diagonal().setZero();
    CHECK(hungarian(c) == std::vector<int>{0, 1, 2, 3});
  }
  SUBCASE("2x2 swap") {
    Matrix c(2, 2);
    c << 2, 1, 1, 2;
    CHECK(hungarian(c) == std::vector<int>{1, 0});
  }
  SUBCASE("ties resolve to the lexicographically smallest optimum") {
    CHECK(hungarian(Matrix::Zero(4, 4)) == std::vector<int>{0, 1, 2, 3});
    Matrix c(3, 3);
    c << 1, 1, 0,
         1, 0, 1,
         0, 1, 1;
    CHECK(hungarian(c) == std::vector<int>{2, 1, 0});
  }
  SUBCASE("random integer costs match exhaustive search") {
    Rng rng(51);
    for (int trial = 0; trial < 100; ++trial) {
      const Index n = 1 + static_cast<Index>(rng.below(6));
      Matrix c(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) c(i, j) = static_cast<double>(rng.below(4));
      CHECK(hungarian(c) == oracle::brute_assignment(c));
    }
  }
  SUBCASE("empty and non-square") {
    CHECK(hungarian(Matrix(0, 0)).empty());
    CHECK_THROWS_AS(hungarian(Matrix::Zero(2, 3)), Error);
  }
}

TEST_CASE("pair metrics") {
  SUBCASE("identical") {
    const PairMetrics m = pair_metrics(part({0, 0, 1, 2, 2}), part({0, 0, 1, 2, 2}));
    CHECK(m.ari == 1.0);
    CHECK(m.f_score == 1.0);
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
  }
  SUBCASE("everything merged") {
    const PairMetrics m = pair_metrics(part({0, 0, 1, 1}), part({0, 0, 0, 0}));
    CHECK(m.recall == 1.0);
    CHECK(m.precision == doctest::Approx(2.0 / 6.0));
    CHECK(m.f_score == doctest::Approx(0.5));
  }
  SUBCASE("nothing predicted together") {
    const PairMetrics m = pair_metrics(part({0, 0, 1, 1}), part({0, 1, 2, 3}));
    CHECK(m.precision == 0.0);
    CHECK(m.recall == 0.0);
    CHECK(m.f_score == 0.0);
    CHECK(m.ari == doctest::Approx(0.0));
  }
  SUBCASE("random partitions match the pair loop") {
    Rng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
      const Partition t = oracle::random_partition(30, 1 + static_cast<int>(rng.below(5)), rng);
      const Partition p = oracle::random_partition(30, 1 + static_cast<int>(rng.below(5)), rng);
      const oracle::Pairs ref = oracle::pair_loop(t, p);
      const PairCounts c = pair_counts(t, p);
      CHECK(c.tp == ref.tp);
      CHECK(c.fp == ref.fp);
      CHECK(c.fn == ref.fn);
      CHECK(c.tn == ref.tn);
      const PairMetrics m = pair_metrics(t, p);
      CHECK(m.ari == doctest::Approx(oracle::ari_from_pairs(ref)).epsilon(1e-12));
    }
  }
  SUBCASE("too few samples") { CHECK_THROWS_AS(pair_metrics(part({0}), part({0})), Error); }
}

TEST_CASE("metric invariants") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const int ct = 1 + static_cast<int>(rng.below(6));
    const int cp = 1 + static_cast<int>(rng.below(6));
    const Index n = 2 + static_cast<Index>(rng.below(29));
    const Partition t = oracle::random_partition(n, ct, rng);
    const Partition p = oracle::random_partition(n, cp, rng);
    const MetricSuite s = evaluate(t, p);

    std::vector<int> perm(static_cast<std::size_t>(cp));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    const MetricSuite r = evaluate(t, relabel(p, perm));
    CHECK(r.nmi == doctest::Approx(s.nmi).epsilon(1e-12));
    CHECK(r.acc == s.acc);
    CHECK(r.ari == s.ari);
    CHECK(r.f_score == s.f_score);

    CHECK(s.acc >= 1.0 / std::max(oracle::span(t), oracle::span(p)) - 1e-15);
    CHECK(s.acc == doctest::Approx(oracle::brute_accuracy(t, p)).epsilon(1e-15));
    CHECK(s.nmi == doctest::Approx(oracle::nmi(t, p)).epsilon(1e-12));
    for (double v : {s.nmi, s.precision, s.recall, s.f_score}) CHECK((v >= 0 && v <= 1));
    CHECK(s.ari <= 1.0);
  }
}
