#include <cmath>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tsl/solutions.hpp"

using namespace tsl;

namespace {

IntegratorOptions tight() {
  IntegratorOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-15;
  return o;
}

std::vector<double> midpoints(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / n);
  return xs;
}

}  // namespace

TEST_CASE("transmission maps against a direct solve") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ProblemSpec p = oracle::random_instance(rng);
    const StateVector<double> minus{u(rng), u(rng)};
    const StateVector<double> plus = transmission_forward(p.beta, minus);
    const oracle::State ref = oracle::jump_forward(p.beta, {minus.y, minus.yp});
    CHECK(plus.y == doctest::Approx(ref.y.real()).epsilon(1e-12));
    CHECK(plus.yp == doctest::Approx(ref.yp.real()).epsilon(1e-12));
    const auto tau = transmission_residual(p.beta, minus, plus);
    CHECK(std::abs(tau[0]) < 1e-12);
    CHECK(std::abs(tau[1]) < 1e-12);
    const StateVector<double> back = transmission_backward(p.beta, plus);
    CHECK(std::abs(back.y - minus.y) < 1e-12);
    CHECK(std::abs(back.yp - minus.yp) < 1e-12);

    const DeterminantSet x = compute_determinants(p, Orientation::SidesExchanged);
    const StateVector<double> closed = transmission_forward_closed_form(x, minus);
    CHECK(closed.y == doctest::Approx(plus.y).epsilon(1e-10));
    CHECK(closed.yp == doctest::Approx(plus.yp).epsilon(1e-10));
    const StateVector<double> closed_back = transmission_backward_closed_form(x, plus);
    CHECK(closed_back.y == doctest::Approx(minus.y).epsilon(1e-10));
  }
}

TEST_CASE("singular transmission blocks") {
  TransmissionMatrix beta{{{1.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 2.0, 0.0}}};
  try {
    transmission_forward<double>(beta, {1.0, 0.0});
    FAIL("expected SingularPlusBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularPlusBlock);
  }
  beta = {{{1.0, 0.0, 1.0, 0.0}, {2.0, 0.0, 0.0, 1.0}}};
  try {
    transmission_backward<double>(beta, {1.0, 0.0});
    FAIL("expected SingularMinusBlock");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMinusBlock);
  }
}

TEST_CASE("phi and psi match closed forms for q = 0") {
  const ProblemSpec p = oracle::p2();
  for (double lambda : {-4.2, 0.5, 7.3, 150.0}) {
    const auto f = phi(p, lambda, tight());
    const auto g = psi(p, lambda, tight());
    for (double x : {0.0, 0.4, 1.0}) {
      const auto rf = oracle::phi(p, lambda, x, true);
      const auto rg = oracle::psi(p, lambda, x, true);
      CHECK(std::abs(f.at(x, Side::Left).y - rf.y.real()) < 1e-9 * std::max(1.0, std::abs(rf.y)));
      CHECK(std::abs(g.at(x, Side::Left).yp - rg.yp.real()) < 1e-9 * std::max(1.0, std::abs(rg.yp)));
    }
    for (double x : {1.0, 1.6, 2.0}) {
      const auto rf = oracle::phi(p, lambda, x, false);
      const auto rg = oracle::psi(p, lambda, x, false);
      CHECK(std::abs(f.at(x, Side::Right).yp - rf.yp.real()) < 1e-9 * std::max(1.0, std::abs(rf.yp)));
      CHECK(std::abs(g.at(x, Side::Right).y - rg.y.real()) < 1e-9 * std::max(1.0, std::abs(rg.y)));
    }
  }
}

TEST_CASE("one-sided states at c obey the transmission conditions") {
  std::mt19937_64 rng(4);
  const ProblemSpec p = oracle::random_instance(rng);
  const auto f = phi(p, 12.5);
  const auto g = psi(p, 12.5);
  for (const auto* s : {&f, &g}) {
    const auto tau = transmission_residual(p.beta, s->c_minus(), s->c_plus());
    CHECK(std::abs(tau[0]) < 1e-12 * s->max_norm());
    CHECK(std::abs(tau[1]) < 1e-12 * s->max_norm());
  }
  CHECK(tau1(p, f.at_a()) == doctest::Approx(0.0));
  CHECK(std::abs(tau2(p, 12.5, g.at_b())) < 1e-12);
  CHECK_THROWS_AS(f.at(p.c), Error);
}

TEST_CASE("conjugate symmetry in lambda") {
  std::mt19937_64 rng(9);
  const ProblemSpec p = oracle::random_instance(rng);
  const Complex lambda{9.0, 2.5};
  const auto u = phi(p, lambda, tight());
  const auto v = phi(p, std::conj(lambda), tight());
  CHECK(std::abs(u.at_b().y - std::conj(v.at_b().y)) < 1e-10 * std::abs(u.at_b().y));
  const auto w = psi(p, lambda, tight());
  const auto z = psi(p, std::conj(lambda), tight());
  CHECK(std::abs(w.at_a().yp - std::conj(z.at_a().yp)) < 1e-10 * std::abs(w.at_a().yp));
}

TEST_CASE("real lambda agrees between the real and complex paths") {
  std::mt19937_64 rng(10);
  const ProblemSpec p = oracle::random_instance(rng);
  const auto r = phi(p, 6.0, tight());
  const auto c = phi(p, Complex{6.0, 0.0}, tight());
  CHECK(std::abs(r.at_b().y - c.at_b().y) < 1e-10 * std::max(1.0, std::abs(r.at_b().y)));
}

TEST_CASE("Picard series agrees with shooting") {
  ProblemSpec p = oracle::p2();
  SUBCASE("q = 0") {}
  SUBCASE("polynomial q") {
    p.q.left = {0.3, 0.1};
    p.q.right = {0.5, 0.25};
  }
  for (double lambda : {-50.0, -10.0, 1.0, 10.0, 50.0}) {
    const auto series = picard_phi2(p, lambda, PicardOptions{}, tight());
    const auto shot = phi(p, lambda, tight());
    CHECK(std::abs(series.iterate.back().y - shot.at_b().y) < 1e-6);
    CHECK(series.increments.size() == 25);
  }
}

TEST_CASE("Picard increments for q = 0 respect the factorial bound") {
  const ProblemSpec p = oracle::p2();
  for (double lambda : {-50.0, -1.0, 3.0, 50.0}) {
    const auto series = picard_phi2(p, lambda);
    double ymax = 0.0;
    for (const auto& s : series.iterate.states) ymax = std::max(ymax, std::abs(s.y));
    for (std::size_t n = 1; n <= series.increments.size(); ++n) {
      const auto& inc = series.increments[n - 1];
      for (std::size_t i = 0; i < inc.size(); ++i) {
        const double x = series.iterate.xs[i + 1];
        const double bound =
            picard_truncation_bound(series.y0_max, 0.0, std::abs(lambda), x, p.c, static_cast<int>(n));
        CHECK(inc[i] <= bound * (1.0 + 1e-9) + 1e-14 * ymax);
      }
    }
  }
}

TEST_CASE("Picard truncation bound") {
  CHECK(picard_truncation_bound(2.0, 1.0, 3.0, 1.5, 1.0, 1) == doctest::Approx(2.0 * 4.0 * 0.25 / 2.0));
  CHECK(picard_truncation_bound(1.0, 0.0, 2.0, 2.0, 1.0, 3) == doctest::Approx(8.0 / 720.0));
  CHECK(std::isfinite(picard_truncation_bound(1.0, 1.0, 1e3, 10.0, 0.0, 200)));
  CHECK_THROWS_AS(picard_truncation_bound(1.0, 1.0, 1.0, 1.0, 0.0, 0), Error);
}

TEST_CASE("variation-of-parameters identities") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    const ProblemSpec p = oracle::random_instance(rng);
    const auto left = midpoints(p.a, p.c, 20), right = midpoints(p.c, p.b, 20);
    for (double lambda : {1.0, 10.0, 100.0}) {
      const auto f = phi(p, lambda, tight());
      const auto g = psi(p, lambda, tight());
      for (int k = 0; k < 2; ++k) {
        CHECK(integral_residual(p, f, IdentityPiece::Phi1, k, left) < 1e-6);
        CHECK(integral_residual(p, f, IdentityPiece::Phi2, k, right) < 1e-6);
        CHECK(integral_residual(p, g, IdentityPiece::Psi1, k, left) < 1e-6);
        CHECK(integral_residual(p, g, IdentityPiece::Psi2, k, right) < 1e-6);
      }
    }
  }
}

TEST_CASE("identities are sensitive to a wrong solution") {
  std::mt19937_64 rng(32);
  const ProblemSpec p = oracle::random_instance(rng);
  auto f = phi(p, 10.0, tight());
  for (auto& s : f.right.states) s.y *= 1.01;
  CHECK(integral_residual(p, f, IdentityPiece::Phi2, 0, midpoints(p.c, p.b, 20)) > 1e-4);
}

TEST_CASE("principal square root") {
  CHECK(principal_sqrt(Complex{4.0, 0.0}) == Complex{2.0, 0.0});
  const Complex r = principal_sqrt(Complex{-4.0, 0.0});
  CHECK(r.real() == doctest::Approx(0.0));
  CHECK(r.imag() == doctest::Approx(2.0));
}
