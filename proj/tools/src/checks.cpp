#include "tsl_cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tsl/charfun.hpp"
#include "tsl/parallel.hpp"
#include "tsl/solutions.hpp"

namespace tsl::cli {

namespace {

std::vector<double> interior_points(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * (i + 0.5) / n);
  return xs;
}

CheckResult finish(std::string name, double worst, double limit, const std::string& where) {
  CheckResult r;
  r.name = std::move(name);
  r.value = worst;
  r.limit = limit;
  r.ok = std::isfinite(worst) && worst < limit;
  r.detail = where;
  return r;
}

std::string at_lambda(double lambda) {
  std::ostringstream s;
  s << "worst at lambda=" << lambda;
  return s.str();
}

}  // namespace

CheckResult check_wronskian_constancy(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                      const CheckOptions& opts) {
  std::vector<double> worst(lambdas.size(), 0.0);
  parallel_for(lambdas.size(), opts.threads, [&](std::size_t i) {
    const auto f = phi(spec, lambdas[i], opts.integrator);
    const auto g = psi(spec, lambdas[i], opts.integrator);
    for (Side side : {Side::Left, Side::Right}) {
      const auto xs = side == Side::Left ? interior_points(spec.a, spec.c, 5)
                                         : interior_points(spec.c, spec.b, 5);
      std::vector<double> ws;
      for (double x : xs) ws.push_back(wronskian(f, g, x, side));
      const auto [lo, hi] = std::minmax_element(ws.begin(), ws.end());
      double scale = 0.0;
      for (double w : ws) scale = std::max(scale, std::abs(w));
      if (scale > 0.0) worst[i] = std::max(worst[i], (*hi - *lo) / scale);
    }
  });
  const auto it = std::max_element(worst.begin(), worst.end());
  return finish("wronskian-constancy", *it, 1e-8, at_lambda(lambdas[it - worst.begin()]));
}

CheckResult check_proportionality(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                  const CheckOptions& opts) {
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  std::vector<double> worst(lambdas.size(), 0.0);
  parallel_for(lambdas.size(), opts.threads, [&](std::size_t i) {
    const auto f = phi(spec, lambdas[i], opts.integrator);
    const auto g = psi(spec, lambdas[i], opts.integrator);
    const double w1 = wronskian(f, g, 0.5 * (spec.a + spec.c), Side::Left);
    const double w2 = wronskian(f, g, 0.5 * (spec.c + spec.b), Side::Right);
    const double lhs = d.d34 * w1, rhs = d.d12 * w2;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    worst[i] = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
  });
  const auto it = std::max_element(worst.begin(), worst.end());
  return finish("proportionality", *it, 1e-8, at_lambda(lambdas[it - worst.begin()]));
}

CheckResult check_integral_residuals(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                     const CheckOptions& opts) {
  const auto left = interior_points(spec.a, spec.c, 20);
  const auto right = interior_points(spec.c, spec.b, 20);
  std::vector<double> worst(lambdas.size(), 0.0);
  parallel_for(lambdas.size(), opts.threads, [&](std::size_t i) {
    const auto f = phi(spec, lambdas[i], opts.reference);
    const auto g = psi(spec, lambdas[i], opts.reference);
    for (int k = 0; k < 2; ++k) {
      worst[i] = std::max({worst[i], integral_residual(spec, f, IdentityPiece::Phi1, k, left),
                           integral_residual(spec, f, IdentityPiece::Phi2, k, right),
                           integral_residual(spec, g, IdentityPiece::Psi1, k, left),
                           integral_residual(spec, g, IdentityPiece::Psi2, k, right)});
    }
  });
  const auto it = std::max_element(worst.begin(), worst.end());
  return finish("integral-residuals", *it, 1e-6, at_lambda(lambdas[it - worst.begin()]));
}

CheckResult check_picard(const ProblemSpec& spec, const std::vector<double>& lambdas, double tol,
                         const CheckOptions& opts) {
  std::vector<double> worst(lambdas.size(), 0.0);
  parallel_for(lambdas.size(), opts.threads, [&](std::size_t i) {
    const auto shot = phi(spec, lambdas[i], opts.reference);
    const auto series = picard_phi2(spec, lambdas[i], PicardOptions{}, opts.reference);
    const double y = shot.at_b().y;
    worst[i] = std::abs(series.iterate.back().y - y) / std::max(1.0, std::abs(y));
  });
  const auto it = std::max_element(worst.begin(), worst.end());
  return finish("picard-agreement", *it, tol, at_lambda(lambdas[it - worst.begin()]));
}

CheckResult check_round_trip(const ProblemSpec& spec, int samples) {
  std::mt19937_64 rng(20240531);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const StateVector<double> minus{u(rng), u(rng)};
    const auto plus = transmission_forward(spec.beta, minus);
    const auto back = transmission_backward(spec.beta, plus);
    const auto tau = transmission_residual(spec.beta, minus, plus);
    const double scale = std::max({1.0, std::abs(plus.y), std::abs(plus.yp)});
    worst = std::max({worst, std::abs(tau[0]) / scale, std::abs(tau[1]) / scale,
                      std::abs(back.y - minus.y), std::abs(back.yp - minus.yp)});
  }
  return finish("transmission-round-trip", worst, 1e-12, "");
}

double boundary_residual(const ProblemSpec& spec, const PiecewiseSolution<double>& eig) {
  const auto tau = transmission_residual(spec.beta, eig.c_minus(), eig.c_plus());
  const double r = std::max({std::abs(tau1(spec, eig.at_a())),
                             std::abs(tau2(spec, eig.lambda, eig.at_b())), std::abs(tau[0]),
                             std::abs(tau[1])});
  return r / eig.max_norm();
}

CheckResult check_eigenpairs(const ProblemSpec& spec, const std::vector<Eigenpair>& eigs,
                             double tol, double defect_tol, const CheckOptions& opts) {
  if (eigs.empty()) return finish("eigenpair-certificates", NAN, tol, "no eigenpairs");
  std::vector<double> res(eigs.size(), 0.0), defect(eigs.size(), 0.0);
  parallel_for(eigs.size(), opts.threads, [&](std::size_t i) {
    const auto eig = eigs[i].eigenfunction ? *eigs[i].eigenfunction
                                           : eigenfunction(spec, eigs[i].lambda, opts.reference);
    res[i] = boundary_residual(spec, eig);
    defect[i] = proportionality_defect(spec, eigs[i].lambda, opts.reference);
  });
  const auto ir = std::max_element(res.begin(), res.end());
  const auto id = std::max_element(defect.begin(), defect.end());
  CheckResult r = finish("eigenpair-certificates", *ir, tol, at_lambda(eigs[ir - res.begin()].lambda));
  std::ostringstream s;
  s << r.detail << "; max Wronskian defect " << *id << " (limit " << defect_tol << ")";
  r.detail = s.str();
  r.ok = r.ok && *id < defect_tol;
  return r;
}

}  // namespace tsl::cli
