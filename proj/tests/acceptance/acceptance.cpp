// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tsl/asymptotics.hpp"
#include "tsl/charfun.hpp"
#include "tsl/solutions.hpp"
#include "tsl/spectrum.hpp"

using namespace tsl;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IntegratorOptions tight() { return polish_defaults(); }

ProblemSpec load(const char* name) { return load_problem(std::string(TSL_PROBLEMS_DIR) + "/" + name); }

Outcome classical_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto eigs = eigenvalues(oracle::classical(), 10);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double exact = std::pow(n * kPi / 2.0, 2);
    worst = std::max(worst, std::abs(eigs[n - 1].lambda - exact) / exact);
  }
  return {worst < 1e-8 && elapsed < 5.0, fmt("max rel err %.2e (limit 1e-8), %.2f s (limit 5 s)", worst, elapsed)};
}

Outcome transmission() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double tau_worst = 0.0, trip_worst = 0.0;
  int made = 0;
  while (made < 100) {
    TransmissionMatrix beta;
    for (auto& row : beta)
      for (auto& v : row) v = u(rng);
    const double dm = beta[0][0] * beta[1][1] - beta[0][1] * beta[1][0];
    const double dp = beta[0][2] * beta[1][3] - beta[0][3] * beta[1][2];
    if (std::abs(dm) < 0.1 || std::abs(dp) < 0.1) continue;
    ++made;
    const StateVector<double> minus{u(rng), u(rng)};
    const auto plus = transmission_forward(beta, minus);
    const auto tau = transmission_residual(beta, minus, plus);
    tau_worst = std::max({tau_worst, std::abs(tau[0]), std::abs(tau[1])});
    const auto back = transmission_backward(beta, plus);
    trip_worst = std::max({trip_worst, std::abs(back.y - minus.y), std::abs(back.yp - minus.yp)});
  }
  return {tau_worst < 1e-12 && trip_worst < 1e-12,
          fmt("100 matrices: max tau residual %.2e, max round-trip error %.2e (limit 1e-12)", tau_worst, trip_worst)};
}

Outcome wronskian() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lam(-20.0, 200.0);
  double spread = 0.0, prop = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const ProblemSpec p = oracle::random_instance(rng);
    const DeterminantSet d = compute_determinants(p, Orientation::SidesExchanged);
    for (int k = 0; k < 10; ++k) {
      const double l = lam(rng);
      const auto f = phi(p, l, tight()), g = psi(p, l, tight());
      double w1 = 0.0, w2 = 0.0;
      for (Side side : {Side::Left, Side::Right}) {
        const double lo = side == Side::Left ? p.a : p.c, hi = side == Side::Left ? p.c : p.b;
        std::vector<double> ws;
        for (int i = 0; i <= 6; ++i) ws.push_back(wronskian(f, g, lo + (hi - lo) * (i + 0.5) / 7.0, side));
        double mn = ws[0], mx = ws[0], scale = 0.0;
        for (double w : ws) {
          mn = std::min(mn, w);
          mx = std::max(mx, w);
          scale = std::max(scale, std::abs(w));
        }
        spread = std::max(spread, (mx - mn) / scale);
        (side == Side::Left ? w1 : w2) = ws[3];
      }
      prop = std::max(prop, std::abs(d.d34 * w1 - d.d12 * w2) / std::abs(d.d34 * w1));
    }
  }
  return {spread < 1e-8 && prop < 1e-8,
          fmt("20 instances x 10 lambda: x-spread %.2e, proportionality %.2e (limit 1e-8)", spread, prop)};
}

Outcome picard() {
  ProblemSpec p = oracle::p2();
  double agree = 0.0, stated = 0.0, induction = 0.0;
  int violations = 0;
  std::string where;
  for (int variant = 0; variant < 2; ++variant) {
    if (variant == 1) {
      p.q.left = {0.3, 0.1};
      p.q.right = {0.5, 0.25};
    }
    const double q1 = sup_abs_q(p, Side::Right);
    for (double l : {-50.0, -30.0, -10.0, -1.0, 1.0, 10.0, 30.0, 50.0}) {
      const auto series = picard_phi2(p, l, PicardOptions{}, tight());
      const auto shot = phi(p, l, tight());
      agree = std::max(agree, std::abs(series.iterate.back().y - shot.at_b().y));
      double ymax = 0.0;
      for (const auto& s : series.iterate.states) ymax = std::max(ymax, std::abs(s.y));
      const double floor = 1e-14 * ymax;
      for (std::size_t n = 1; n <= series.increments.size(); ++n) {
        const auto& inc = series.increments[n - 1];
        for (std::size_t i = 0; i < inc.size(); ++i) {
          const double x = series.iterate.xs[i + 1];
          const double b = picard_truncation_bound(series.y0_max, q1, std::abs(l), x, p.c, static_cast<int>(n));
          const double ratio = inc[i] / (b * (1.0 + 1e-9) + floor);
          if (ratio > 1.0) {
            if (violations++ == 0) where = fmt("first at q%s, lambda=%g, n=%zu", variant ? "=poly" : "=0", l, n);
          }
          stated = std::max(stated, ratio);
          const double rig = series.y0_max * std::exp(n * std::log(q1 + std::abs(l)) + 2.0 * n * std::log(x - p.c) -
                                                      std::lgamma(2.0 * n + 1.0));
          induction = std::max(induction, inc[i] / (rig * (1.0 + 1e-9) + floor));
        }
      }
    }
  }
  const bool ok = agree < 1e-6 && violations == 0;
  return {ok, fmt("max |picard - shooting| %.2e (limit 1e-6); stated bound: max increment/bound %.3g, %d violations%s%s; "
                  "Y (q1+|lambda|)^n form: max ratio %.3g",
                  agree, stated, violations, violations ? ", " : "", where.c_str(), induction)};
}

Outcome integral_residuals() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const ProblemSpec p = oracle::random_instance(rng);
    std::vector<double> left, right;
    for (int i = 0; i < 20; ++i) {
      left.push_back(p.a + (p.c - p.a) * (i + 0.5) / 20);
      right.push_back(p.c + (p.b - p.c) * (i + 0.5) / 20);
    }
    for (double l : {1.0, 10.0, 100.0}) {
      const auto f = phi(p, l, tight()), g = psi(p, l, tight());
      for (int k = 0; k < 2; ++k)
        worst = std::max({worst, integral_residual(p, f, IdentityPiece::Phi1, k, left),
                          integral_residual(p, f, IdentityPiece::Phi2, k, right),
                          integral_residual(p, g, IdentityPiece::Psi1, k, left),
                          integral_residual(p, g, IdentityPiece::Psi2, k, right)});
    }
  }
  return {worst < 1e-6, fmt("10 instances, lambda in {1,10,100}, k=0,1: max residual %.2e (limit 1e-6)", worst)};
}

Outcome remainder_ladders() {
  ProblemSpec base = load("coupled_potential.json");
  std::vector<double> s_values;
  for (double s : {10.0, 20.0, 40.0, 80.0}) s_values.push_back(s + kPi / 7);
  int ladders = 0, failed = 0;
  double worst = 0.0;
  std::string worst_at;
  double omega_worst = 0.0;
  for (int combo = 0; combo < 4; ++combo) {
    ProblemSpec p = base;
    if (combo & 1) {
      p.alpha11 = 0.0;
      p.alpha10 = 1.2;
    }
    if (combo & 2) {
      p.alpha21p = 0.0;
      p.alpha20p = 1.1;
      p.alpha21 = 0.9;
      p.alpha20 = 0.4;
    }
    auto account = [&](const std::vector<LadderRow>& rows, const std::string& what) {
      std::vector<double> r;
      for (const LadderRow& row : rows) r.push_back(row.ratio);
      const BoundednessCheck c = bounded_by_median(r);
      ++ladders;
      if (!c.ok) ++failed;
      const double q = c.median > 0.0 ? c.max / c.median : INFINITY;
      if (q > worst) {
        worst = q;
        worst_at = fmt("combo %d %s", combo, what.c_str());
        for (double v : r) worst_at += fmt(" %.3g", v);
      }
    };
    for (SolutionKind kind : {SolutionKind::Phi, SolutionKind::Psi})
      for (Side side : {Side::Left, Side::Right}) {
        const double lo = side == Side::Left ? p.a : p.c, hi = side == Side::Left ? p.c : p.b;
        std::vector<double> xs;
        for (int i = 1; i <= 5; ++i) xs.push_back(lo + (hi - lo) * i / 6.0);
        for (int k = 0; k < 2; ++k)
          account(remainder_ladder(p, kind, side, k, s_values, xs, tight()),
                  fmt("%s %s k=%d", kind == SolutionKind::Phi ? "phi" : "psi",
                      side == Side::Left ? "left" : "right", k));
      }
    std::vector<double> r;
    for (const LadderRow& row : charfun_remainder_ladder(p, s_values, tight())) r.push_back(row.ratio);
    const BoundednessCheck c = bounded_by_median(r);
    omega_worst = std::max(omega_worst, c.median > 0.0 ? c.max / c.median : INFINITY);
  }
  return {failed == 0, fmt("%d ladders over 4 case combinations: %d unbounded, worst max/median %.2f (limit 2) at %s; omega ladder "
                           "(not gated) worst max/median %.2f",
                           ladders, failed, worst, worst_at.c_str(), omega_worst)};
}

Outcome eigenvalue_decay() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"case_i.json", "case_ii.json", "case_iii.json", "case_iv.json"}) {
    const ProblemSpec p = load(name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = decay_report(p, 10, 30);
    const double elapsed = seconds_since(t0);
    const DecayCheck c = check_decay(rows, 10, 30);
    const bool full = c.branch1.samples == 21 && c.branch2.samples == 21;
    ok = ok && c.ok() && full && elapsed < 60.0;
    detail += fmt("%s%s: %.2f/%.2f, %.1f s", detail.empty() ? "" : "; ", to_string(classify_case(p)).data(),
                  c.branch1.max / c.branch1.median, c.branch2.max / c.branch2.median, elapsed);
    if (!full) detail += fmt(" (%zu+%zu rows)", c.branch1.samples, c.branch2.samples);
  }
  return {ok, "max/median per branch (limit 2): " + detail};
}

struct Instance {
  const char* name;
  bool permissive;
};

const Instance kCountInstances[] = {{"p2.json", false},
                                    {"identity_transmission.json", false},
                                    {"classical_dirichlet.json", true},
                                    {"case_i.json", false},
                                    {"coupled_potential.json", false}};

std::vector<SpectrumResult> g_spectra;

Outcome reality() {
  bool ok = true;
  int with = 0, without = 0;
  std::string detail;
  for (const Instance& inst : kCountInstances) {
    const ProblemSpec p = load(inst.name);
    require_valid(p, !inst.permissive);
    (leading_coefficient_vanishes(p) ? without : with)++;
    g_spectra.push_back(compute_spectrum(p, 15));
    const SpectrumResult& r = g_spectra.back();
    const bool good = r.complete && r.zero_count && r.zero_count->count == r.roots_in_range && r.zero_count->error < 0.25;
    ok = ok && good;
    detail += fmt("%s%d/%d err %.1e", detail.empty() ? "" : "; ", r.zero_count ? r.zero_count->count : -1,
                  r.roots_in_range, r.zero_count ? r.zero_count->error : NAN);
  }
  ok = ok && with > 0 && without > 0;
  return {ok, fmt("count/roots on 5 instances (%d with Delta24 != 0, %d with Delta24 = 0): ", with, without) + detail};
}

Outcome certificates() {
  double res = 0.0, defect = 0.0, top = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < g_spectra.size(); ++i) {
    const ProblemSpec p = load(kCountInstances[i].name);
    for (const Eigenpair& e : g_spectra[i].eigenpairs) {
      const auto& y = *e.eigenfunction;
      const auto tau = transmission_residual(p.beta, y.c_minus(), y.c_plus());
      const double r = std::max({std::abs(tau1(p, y.at_a())), std::abs(tau2(p, e.lambda, y.at_b())), std::abs(tau[0]),
                                 std::abs(tau[1])});
      res = std::max(res, r / y.max_norm());
      defect = std::max(defect, proportionality_defect(p, e.lambda, tight()));
      top = std::max(top, e.lambda);
      ++pairs;
    }
  }
  return {pairs > 0 && res < 1e-8 && defect < 1e-6,
          fmt("%d eigenpairs (lambda up to %.1f): max boundary/transmission residual %.2e (limit 1e-8), "
              "max Wronskian defect %.2e (limit 1e-6)",
              pairs, top, res, defect)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {"classical reduction", classical_reduction},
      {"transmission maps", transmission},
      {"Wronskian invariance and proportionality", wronskian},
      {"Picard series against shooting", picard},
      {"integral-equation residuals", integral_residuals},
      {"solution remainder ladders", remainder_ladders},
      {"eigenvalue decay n|s_n - s_pred|", eigenvalue_decay},
      {"argument-principle count", reality},
      {"eigenpair certificates", certificates},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failures;
    std::printf("criterion %zu %s: %s -- %s\n", i + 1, o.ok ? "PASS" : "FAIL", criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
