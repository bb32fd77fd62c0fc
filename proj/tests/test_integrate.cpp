#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tsl/integrate.hpp"

using namespace tsl;

namespace {

Potential zero_q() { return Potential{{0.0}, {0.0}}; }

}  // namespace

TEST_CASE("free equation matches the closed form") {
  const Potential q = zero_q();
  for (double lambda : {-25.0, -1.0, 0.0, 2.0, 40.0, 400.0}) {
    const Trace<double> t = integrate_ivp<double>(q, 1.0, lambda, 0.0, 1.0, {0.3, -1.2}, {});
    const oracle::State ref = oracle::propagate({0.3, -1.2}, lambda, 1.0);
    const double scale = std::max(1.0, std::abs(ref.y));
    CHECK(std::abs(t.back().y - ref.y.real()) < 1e-9 * scale);
    CHECK(std::abs(t.back().yp - ref.yp.real()) < 1e-9 * std::max(1.0, std::abs(ref.yp)));
  }
}

TEST_CASE("backward integration on the right piece") {
  const Potential q = zero_q();
  const double lambda = 17.0;
  const Trace<double> t = integrate_ivp<double>(q, 1.0, lambda, 2.0, 1.0, {1.0, 0.5}, {});
  CHECK_FALSE(t.increasing());
  const oracle::State ref = oracle::propagate({1.0, 0.5}, lambda, -1.0);
  CHECK(t.back().y == doctest::Approx(ref.y.real()).epsilon(1e-9));
  CHECK(t.back().yp == doctest::Approx(ref.yp.real()).epsilon(1e-9));
}

TEST_CASE("complex spectral parameter") {
  const Potential q = zero_q();
  const Complex lambda{12.0, -3.5};
  const Trace<Complex> t = integrate_ivp<Complex>(q, 1.0, lambda, 0.0, 1.0, {1.0, 0.0}, {});
  const oracle::State ref = oracle::propagate({1.0, 0.0}, lambda, 1.0);
  CHECK(std::abs(t.back().y - ref.y) < 1e-9 * std::abs(ref.y));
  CHECK(std::abs(t.back().yp - ref.yp) < 1e-9 * std::abs(ref.yp));
}

TEST_CASE("dense output and interpolation") {
  const Potential q = zero_q();
  IntegratorOptions opts;
  opts.dense_output_points = {0.125, 0.5, 0.875};
  const double lambda = 30.0;
  const Trace<double> t = integrate_ivp<double>(q, 1.0, lambda, 0.0, 1.0, {0.0, 1.0}, opts);
  for (double x : opts.dense_output_points)
    CHECK(std::find(t.xs.begin(), t.xs.end(), x) != t.xs.end());
  for (double x : {0.1, 0.33, 0.71, 0.99}) {
    const oracle::State ref = oracle::propagate({0.0, 1.0}, lambda, x);
    CHECK(std::abs(t.at(x).y - ref.y.real()) < 1e-7);
  }
  CHECK_THROWS_AS(t.at(1.5), Error);
}

TEST_CASE("piecewise polynomial potential against a fine reference") {
  Potential q{{1.0, -2.0, 0.5}, {0.0}};
  IntegratorOptions coarse, fine;
  fine.rel_tol = 1e-13;
  fine.abs_tol = 1e-15;
  const auto a = integrate_ivp<double>(q, 1.0, 5.0, 0.0, 1.0, {1.0, 0.0}, coarse);
  const auto b = integrate_ivp<double>(q, 1.0, 5.0, 0.0, 1.0, {1.0, 0.0}, fine);
  CHECK(a.back().y == doctest::Approx(b.back().y).epsilon(1e-9));
}

TEST_CASE("integrator errors") {
  const Potential q = zero_q();
  SUBCASE("interval straddles c") {
    CHECK_THROWS_AS(integrate_ivp<double>(q, 1.0, 1.0, 0.0, 2.0, {1.0, 0.0}, {}), Error);
  }
  SUBCASE("step limit") {
    IntegratorOptions opts;
    opts.max_steps = 3;
    try {
      integrate_ivp<double>(q, 1.0, 1e6, 0.0, 1.0, {1.0, 0.0}, opts);
      FAIL("expected StepLimitExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StepLimitExceeded);
    }
  }
  SUBCASE("bad tolerances") {
    IntegratorOptions opts;
    opts.rel_tol = -1.0;
    CHECK_THROWS_AS(check_options(opts), Error);
  }
}
