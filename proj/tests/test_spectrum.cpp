#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tsl/spectrum.hpp"

using namespace tsl;

namespace {

constexpr double kPi = std::numbers::pi;

std::string golden() { return std::string(TSL_TEST_DATA_DIR) + "/p2_eigenvalues.csv"; }

ProblemSpec with_case(CaseTag tag) {
  ProblemSpec p = oracle::p2();
  p.b = 3.0;
  p.alpha10 = 1.0;
  p.alpha11 = (tag == CaseTag::I || tag == CaseTag::III) ? 1.0 : 0.0;
  if (tag == CaseTag::I || tag == CaseTag::II) {
    p.alpha21p = 1.0;
    p.alpha20 = -1.0;
    p.alpha21 = 0.3;
    p.alpha20p = 0.0;
  }
  return p;
}

}  // namespace

TEST_CASE("classical eigenvalues") {
  SpectrumOptions opts;
  const auto eigs = eigenvalues(oracle::classical(), 10, opts);
  REQUIRE(eigs.size() == 10);
  for (int n = 1; n <= 10; ++n) {
    const double exact = std::pow(n * kPi / 2.0, 2);
    CHECK(std::abs(eigs[n - 1].lambda - exact) < 1e-10 * exact);
    CHECK(eigs[n - 1].eigenfunction.has_value());
  }
}

TEST_CASE("P2 eigenvalues against the golden file") {
  const auto ref = oracle::golden_eigenvalues(golden());
  REQUIRE(ref.size() == 10);
  const SpectrumResult r = compute_spectrum(oracle::p2(), 10);
  CHECK(r.complete);
  REQUIRE(r.zero_count.has_value());
  CHECK(r.zero_count->count == 10);
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(std::abs(r.eigenpairs[i].lambda - ref[i]) < 1e-8 * std::max(1.0, std::abs(ref[i])));
}

TEST_CASE("results do not depend on the thread count") {
  SpectrumOptions one, four;
  four.threads = 4;
  one.with_eigenfunctions = four.with_eigenfunctions = false;
  const auto a = compute_spectrum(oracle::p2(), 12, one);
  const auto b = compute_spectrum(oracle::p2(), 12, four);
  for (std::size_t i = 0; i < a.eigenpairs.size(); ++i) CHECK(a.eigenpairs[i].lambda == b.eigenpairs[i].lambda);
}

TEST_CASE("close root pairs are resolved without the completeness check") {
  // Equal piece lengths put both branches on the same seeds, so pairs of
  // roots approach each other like 1/s.
  SpectrumOptions fast;
  fast.check_completeness = false;
  fast.with_eigenfunctions = false;
  SpectrumOptions checked = fast;
  checked.check_completeness = true;
  const auto a = compute_spectrum(oracle::p2(), 30, fast);
  const auto b = compute_spectrum(oracle::p2(), 30, checked);
  CHECK(b.complete);
  for (std::size_t i = 0; i < 30; ++i)
    CHECK(a.eigenpairs[i].lambda == doctest::Approx(b.eigenpairs[i].lambda).epsilon(1e-12));
  for (std::size_t i = 0; i + 1 < 30; i += 2)
    CHECK(a.eigenpairs[i + 1].lambda - a.eigenpairs[i].lambda > 0.0);
}

TEST_CASE("refinement of a single bracket") {
  const auto ref = oracle::golden_eigenvalues(golden());
  const ProblemSpec p = oracle::p2();
  const double lo = ref[0] - 0.3, hi = ref[0] + 0.3;
  const Eigenpair e = refine(p, {lo, hi, charfun<double>(p, lo), charfun<double>(p, hi)}, 1e-14);
  CHECK(std::abs(e.lambda - ref[0]) < 1e-10);
  CHECK(e.residual < 1e-12);
  CHECK_THROWS_AS(refine(p, {3.0, 4.0, 1.0, 1.0}, 1e-14), Error);
}

TEST_CASE("a bracket ending on a root") {
  const ProblemSpec p = oracle::classical();
  const double root = std::pow(8.0 * kPi / 2.0, 2);
  for (double lo : {root - 7.0, root - 0.5}) {
    const Eigenpair e = refine(p, {lo, root, 1.0, 1.0}, 1e-14);
    CHECK(std::abs(e.lambda - root) < 1e-10 * root);
  }
  for (double hi : {root + 7.0, root + 0.5}) {
    const Eigenpair e = refine(p, {root, hi, 1.0, 1.0}, 1e-14);
    CHECK(std::abs(e.lambda - root) < 1e-10 * root);
  }
}

TEST_CASE("brackets from samples") {
  const std::vector<double> ls{0, 1, 2, 3, 4};
  const std::vector<double> ws{1, -1, 0, 2, -3};
  const auto b = brackets_from_samples(ls, ws);
  REQUIRE(b.size() == 3);
  CHECK(b[0].lo == 0);
  CHECK(b[1].lo == 2);
  CHECK(b[1].hi == 2);
  CHECK(b[2].lo == 3);
}

TEST_CASE("asymptotic seeds per case") {
  const double L1 = 2.0, L2 = 1.0;  // b - c, c - a
  struct Row {
    CaseTag tag;
    double o1, o2;
  };
  for (const Row& r : {Row{CaseTag::I, -2.0, 0.0}, Row{CaseTag::II, -1.0, 0.5},
                       Row{CaseTag::III, 0.5, -1.0}, Row{CaseTag::IV, -0.5, 0.5}}) {
    const ProblemSpec p = with_case(r.tag);
    REQUIRE(classify_case(p) == r.tag);
    const auto seeds = asymptotic_seeds(p, 5, 6);
    REQUIRE(seeds.size() == 4);
    for (const AsymptoticSeed& s : seeds) {
      const double expected = s.branch == 1 ? (s.n + r.o1) * kPi / L1 : (s.n + r.o2) * kPi / L2;
      CHECK(s.s_pred == doctest::Approx(expected));
      CHECK(s.tag == r.tag);
    }
    for (std::size_t i = 0; i + 1 < seeds.size(); ++i) CHECK(seeds[i].s_pred <= seeds[i + 1].s_pred);
  }
}

TEST_CASE("seeds need a nonzero leading coefficient") {
  ProblemSpec p = oracle::p2();
  p.beta = {{{1.0, 0.0, -1.0, 0.0}, {0.0, 1.0, 0.0, -1.0}}};
  CHECK(leading_coefficient_vanishes(p));
  try {
    asymptotic_seeds(p, 1, 3);
    FAIL("expected DegenerateLeadingCoefficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateLeadingCoefficient);
  }
}

TEST_CASE("branch labelling") {
  std::vector<AsymptoticSeed> seeds{{1.0, 1, 1}, {2.0, 1, 2}, {3.0, 1, 3}, {2.1, 2, 1}, {4.1, 2, 2}};
  std::vector<Eigenpair> eigs(5);
  const double s[] = {1.05, 1.98, 2.2, 3.01, 4.0};
  for (int i = 0; i < 5; ++i) {
    eigs[i].s = s[i];
    eigs[i].lambda = s[i] * s[i];
  }
  label_branches(eigs, seeds);
  CHECK(*eigs[0].branch == 1);
  CHECK(*eigs[1].branch == 1);
  CHECK(*eigs[1].n_index == 2);
  CHECK(*eigs[2].branch == 2);
  CHECK(*eigs[2].n_index == 1);
  CHECK(*eigs[3].n_index == 3);
  CHECK(*eigs[4].branch == 2);
  Eigenpair negative;
  negative.lambda = -4.0;
  negative.s = 2.0;
  negative.s_imaginary = true;
  std::vector<Eigenpair> neg{negative};
  label_branches(neg, seeds);
  CHECK_FALSE(neg[0].branch.has_value());
}

TEST_CASE("eigenfunctions") {
  const auto ref = oracle::golden_eigenvalues(golden());
  const ProblemSpec p = oracle::p2();
  const auto y = eigenfunction(p, ref[0], polish_defaults());
  const auto b = y.at_b();
  CHECK(std::abs(b.yp - ref[0] * b.y) < 1e-8);
  CHECK(std::abs(y.at_a().y) < 1e-12);
  CHECK(y.max_norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(eigenfunction(p, 0.5 * (ref[1] + ref[2])), Error);

  const auto c = eigenfunction(oracle::classical(), std::pow(kPi / 2.0, 2), polish_defaults());
  for (double x : {0.3, 0.9, 1.4, 2.0}) {
    const Side side = x < 1.0 ? Side::Left : Side::Right;
    CHECK(c.at(x, side).y == doctest::Approx(std::sin(kPi * x / 2.0)).epsilon(1e-8));
  }
}

TEST_CASE("spectrum arguments") {
  CHECK_THROWS_AS(compute_spectrum(oracle::p2(), 0), Error);
  CHECK_THROWS_AS(asymptotic_seeds(oracle::p2(), 4, 2), Error);
}
