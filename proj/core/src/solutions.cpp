#include "tsl/solutions.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "tsl/quadrature.hpp"

namespace tsl {

namespace {

double block_scale(const TransmissionMatrix& beta, int col) {
  return std::max({std::abs(beta[0][col]), std::abs(beta[1][col]), std::abs(beta[0][col + 1]),
                   std::abs(beta[1][col + 1])});
}

// Solves B u = -C v where B holds columns (col, col+1) of beta and C the
// other block.
template <ScalarType T>
StateVector<T> solve_block(const TransmissionMatrix& beta, int col, const StateVector<T>& v,
                           ErrorCode singular) {
  const int other = col == 0 ? 2 : 0;
  const double b11 = beta[0][col], b12 = beta[0][col + 1];
  const double b21 = beta[1][col], b22 = beta[1][col + 1];
  const double det = b11 * b22 - b12 * b21;
  const double scale = block_scale(beta, col);
  if (!(std::abs(det) > 1e-14 * scale * scale)) {
    throw Error(singular, col == 2 ? "c+ column block of the transmission matrix is singular"
                                   : "c- column block of the transmission matrix is singular");
  }
  const T r1 = -(beta[0][other] * v.y + beta[0][other + 1] * v.yp);
  const T r2 = -(beta[1][other] * v.y + beta[1][other + 1] * v.yp);
  return {(b22 * r1 - b12 * r2) / det, (b11 * r2 - b21 * r1) / det};
}

template <ScalarType T>
double abs_max(const StateVector<T>& s) {
  return std::max(std::abs(s.y), std::abs(s.yp));
}

}  // namespace

Complex principal_sqrt(Complex lambda) {
  Complex s = std::sqrt(lambda);
  if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0)) s = -s;
  return s;
}

template <ScalarType T>
StateVector<T> PiecewiseSolution<T>::at(double x, Side side) const {
  if (side == Side::Auto) {
    if (x == c)
      throw Error(ErrorCode::AtTransmissionPointWithoutSide, "solution is two-valued at c");
    side = x < c ? Side::Left : Side::Right;
  }
  if (side == Side::Left) {
    if (x < a || x > c) throw Error(ErrorCode::PieceMismatch, "x outside [a, c]");
    return x == c ? c_minus() : left.at(x);
  }
  if (x < c || x > b) throw Error(ErrorCode::PieceMismatch, "x outside [c, b]");
  return x == c ? c_plus() : right.at(x);
}

template <ScalarType T>
double PiecewiseSolution<T>::max_norm() const {
  double m = 0.0;
  for (const auto& s : left.states) m = std::max(m, std::abs(s.y));
  for (const auto& s : right.states) m = std::max(m, std::abs(s.y));
  return m;
}

template <ScalarType T>
std::array<T, 2> transmission_residual(const TransmissionMatrix& beta, const StateVector<T>& minus,
                                       const StateVector<T>& plus) {
  std::array<T, 2> r{};
  for (int i = 0; i < 2; ++i) {
    r[i] = beta[i][0] * minus.y + beta[i][1] * minus.yp + beta[i][2] * plus.y +
           beta[i][3] * plus.yp;
  }
  return r;
}

template <ScalarType T>
StateVector<T> transmission_forward_closed_form(const DeterminantSet& d,
                                                const StateVector<T>& minus) {
  return {(d.d23 * minus.y + d.d24 * minus.yp) / d.d12,
          -(d.d13 * minus.y + d.d14 * minus.yp) / d.d12};
}

template <ScalarType T>
StateVector<T> transmission_backward_closed_form(const DeterminantSet& d,
                                                 const StateVector<T>& plus) {
  return {-(d.d14 * plus.y + d.d24 * plus.yp) / d.d34,
          (d.d13 * plus.y + d.d23 * plus.yp) / d.d34};
}

template <ScalarType T>
StateVector<T> transmission_forward(const TransmissionMatrix& beta, const StateVector<T>& minus) {
  const StateVector<T> plus = solve_block(beta, 2, minus, ErrorCode::SingularPlusBlock);
#ifndef NDEBUG
  ProblemSpec probe;
  probe.beta = beta;
  const StateVector<T> alt = transmission_forward_closed_form(
      compute_determinants(probe, Orientation::SidesExchanged), minus);
  assert(std::abs(alt.y - plus.y) + std::abs(alt.yp - plus.yp) <=
         1e-9 * (abs_max(plus) + abs_max(minus)) + 1e-300);
#endif
  return plus;
}

template <ScalarType T>
StateVector<T> transmission_backward(const TransmissionMatrix& beta, const StateVector<T>& plus) {
  const StateVector<T> minus = solve_block(beta, 0, plus, ErrorCode::SingularMinusBlock);
#ifndef NDEBUG
  ProblemSpec probe;
  probe.beta = beta;
  const StateVector<T> alt = transmission_backward_closed_form(
      compute_determinants(probe, Orientation::SidesExchanged), plus);
  assert(std::abs(alt.y - minus.y) + std::abs(alt.yp - minus.yp) <=
         1e-9 * (abs_max(plus) + abs_max(minus)) + 1e-300);
#endif
  return minus;
}

template <ScalarType T>
T tau1(const ProblemSpec& spec, const StateVector<T>& s) {
  return spec.alpha10 * s.y + spec.alpha11 * s.yp;
}

template <ScalarType T>
T tau2(const ProblemSpec& spec, T lambda, const StateVector<T>& s) {
  return spec.alpha20 * s.y - spec.alpha21 * s.yp +
         lambda * (spec.alpha20p * s.y - spec.alpha21p * s.yp);
}

template <ScalarType T>
PiecewiseSolution<T> phi(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts) {
  PiecewiseSolution<T> sol;
  sol.lambda = lambda;
  sol.kind = SolutionKind::Phi;
  sol.a = spec.a;
  sol.c = spec.c;
  sol.b = spec.b;
  const StateVector<T> start{T(spec.alpha11), T(-spec.alpha10)};
  sol.left = integrate_ivp<T>(spec.q, spec.c, lambda, spec.a, spec.c, start, opts);
  const StateVector<T> plus = transmission_forward(spec.beta, sol.left.back());
  sol.right = integrate_ivp<T>(spec.q, spec.c, lambda, spec.c, spec.b, plus, opts);
  return sol;
}

template <ScalarType T>
PiecewiseSolution<T> psi(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts) {
  PiecewiseSolution<T> sol;
  sol.lambda = lambda;
  sol.kind = SolutionKind::Psi;
  sol.a = spec.a;
  sol.c = spec.c;
  sol.b = spec.b;
  const StateVector<T> start{spec.alpha21 + lambda * spec.alpha21p,
                             spec.alpha20 + lambda * spec.alpha20p};
  sol.right = integrate_ivp<T>(spec.q, spec.c, lambda, spec.b, spec.c, start, opts);
  const StateVector<T> minus = transmission_backward(spec.beta, sol.right.back());
  sol.left = integrate_ivp<T>(spec.q, spec.c, lambda, spec.c, spec.a, minus, opts);
  return sol;
}

namespace {

// One Picard sweep on a fixed grid. Returns y_n and y_n' at the nodes and at b.
template <ScalarType T>
struct PicardRun {
  std::vector<T> y, yp;  // nodes
  T y_b{}, yp_b{};
  std::vector<std::vector<double>> increments;  // per k: nodes then b
  double y0_max = 0.0;
};

template <ScalarType T>
PicardRun<T> picard_sweep(const ProblemSpec& spec, T lambda, T y0c, T slope, int n_terms,
                          int panels, const GaussRule& rule, const std::vector<double>& smat) {
  const int m = static_cast<int>(rule.nodes.size());
  const double h = (spec.b - spec.c) / panels;
  const std::size_t count = static_cast<std::size_t>(panels) * m;
  std::vector<double> xs(count), kernel(count);
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < m; ++i) {
      const double x = spec.c + h * (p + 0.5 * (rule.nodes[i] + 1.0));
      xs[p * m + i] = x;
      kernel[p * m + i] = spec.q.eval_right(x);
    }
  }

  // Running integral of g over (c, x] at every node plus the total.
  auto running = [&](const std::vector<T>& g, std::vector<T>& out) -> T {
    out.assign(count, T{});
    T offset{};
    for (int p = 0; p < panels; ++p) {
      const T* gp = g.data() + static_cast<std::size_t>(p) * m;
      for (int i = 0; i < m; ++i) {
        T acc{};
        for (int j = 0; j < m; ++j) acc += smat[i * m + j] * gp[j];
        out[p * m + i] = offset + 0.5 * h * acc;
      }
      T total{};
      for (int j = 0; j < m; ++j) total += rule.weights[j] * gp[j];
      offset += 0.5 * h * total;
    }
    return offset;
  };

  PicardRun<T> run;
  std::vector<T> y0(count);
  for (std::size_t i = 0; i < count; ++i) y0[i] = y0c + slope * (xs[i] - spec.c);
  const T y0_b = y0c + slope * (spec.b - spec.c);
  run.y0_max = std::max(std::abs(y0c), std::abs(y0_b));

  // Propagate the increments d_n = y_n - y_{n-1} directly,
  //   d_0 = y_0,  d_n(x) = int_c^x (x - z) (q(z) - lambda) d_{n-1}(z) dz,
  // so that tiny increments are not lost to cancellation.
  std::vector<T> y = y0, d = y0, g(count), first, second;
  T y_b = y0_b;
  run.yp.assign(count, slope);
  run.yp_b = slope;
  for (int n = 1; n <= n_terms; ++n) {
    for (std::size_t i = 0; i < count; ++i) g[i] = (kernel[i] - lambda) * d[i];
    const T first_b = running(g, first);
    const T second_b = running(first, second);
    std::vector<double> inc(count + 1);
    for (std::size_t i = 0; i < count; ++i) {
      y[i] += second[i];
      run.yp[i] += first[i];
      inc[i] = std::abs(second[i]);
    }
    y_b += second_b;
    run.yp_b += first_b;
    inc[count] = std::abs(second_b);
    run.increments.push_back(std::move(inc));
    d = second;
  }
  run.y = std::move(y);
  run.y_b = y_b;
  return run;
}

}  // namespace

template <ScalarType T>
PicardSeries<T> picard_phi2(const ProblemSpec& spec, T lambda, const StateVector<T>& phi1_at_c,
                            const PicardOptions& opts) {
  if (opts.n_terms < 1) throw Error(ErrorCode::InvalidArgument, "n_terms must be >= 1");
  if (opts.panels < 1 || opts.nodes_per_panel < 2)
    throw Error(ErrorCode::InvalidArgument, "Picard grid needs >= 1 panel and >= 2 nodes");

  // Initial data written through the determinant form of the jump map:
  //   y0(x) = [(d23 + c d13) phi + (d24 + c d14) phi' - (d13 phi + d14 phi') x] / d12
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  if (d.d12 == 0.0) throw Error(ErrorCode::SingularPlusBlock, "c+ column block is singular");
  const T f = phi1_at_c.y, fp = phi1_at_c.yp;
  const double c = spec.c;
  const T constant = ((d.d23 + c * d.d13) * f + (d.d24 + c * d.d14) * fp) / d.d12;
  const T slope = -(d.d13 * f + d.d14 * fp) / d.d12;
  const T y0c = constant + slope * c;

  const GaussRule rule = gauss_legendre(opts.nodes_per_panel);
  const std::vector<double> smat = running_integral_matrix(rule);
  PicardRun<T> run = picard_sweep(spec, lambda, y0c, slope, opts.n_terms, opts.panels, rule, smat);

  if (opts.refinement_check) {
    const PicardRun<T> fine =
        picard_sweep(spec, lambda, y0c, slope, opts.n_terms, 2 * opts.panels, rule, smat);
    const double scale = std::max({1.0, std::abs(run.y_b), std::abs(run.yp_b) * (spec.b - spec.c)});
    const double diff =
        std::max(std::abs(fine.y_b - run.y_b), std::abs(fine.yp_b - run.yp_b) * (spec.b - spec.c));
    if (diff > opts.refinement_tol * scale) {
      std::ostringstream msg;
      msg << "doubling the Picard grid moved y(b) by " << diff << " (scale " << scale << ")";
      throw Error(ErrorCode::QuadratureUnderResolved, msg.str());
    }
  }

  PicardSeries<T> out;
  out.y0_max = run.y0_max;
  out.y0_at_c = y0c;
  out.y0_slope = slope;
  out.increments = std::move(run.increments);

  const int m = opts.nodes_per_panel;
  const double h = (spec.b - spec.c) / opts.panels;
  auto push = [&](double x, T y, T yp) {
    out.iterate.xs.push_back(x);
    out.iterate.states.push_back({y, yp});
    out.iterate.slopes.push_back({yp, (spec.q.eval_right(x) - lambda) * y});
  };
  push(spec.c, y0c, slope);
  for (int p = 0; p < opts.panels; ++p)
    for (int i = 0; i < m; ++i)
      push(spec.c + h * (p + 0.5 * (rule.nodes[i] + 1.0)), run.y[p * m + i], run.yp[p * m + i]);
  push(spec.b, run.y_b, run.yp_b);
  return out;
}

template <ScalarType T>
PicardSeries<T> picard_phi2(const ProblemSpec& spec, T lambda, const PicardOptions& opts,
                            const IntegratorOptions& integ) {
  const StateVector<T> start{T(spec.alpha11), T(-spec.alpha10)};
  const Trace<T> left = integrate_ivp<T>(spec.q, spec.c, lambda, spec.a, spec.c, start, integ);
  return picard_phi2(spec, lambda, left.back(), opts);
}

double picard_truncation_bound(double y_max, double q1, double lambda_abs, double x, double c,
                               int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const double dx = std::abs(x - c);
  if (y_max == 0.0 || dx == 0.0) return 0.0;
  const double log_power = n * std::log(lambda_abs);
  const double log_growth =
      q1 <= 0.0 ? log_power
                : std::max(log_power, std::log(q1)) +
                      std::log1p(std::exp(-std::abs(log_power - std::log(q1))));
  const double log_bound =
      std::log(y_max) + log_growth + 2.0 * n * std::log(dx) - std::lgamma(2.0 * n + 1.0);
  return std::exp(log_bound);
}

namespace {

// d^k/dx^k cos(s (x - x0)) and sin(s (x - x0)).
Complex dcos(Complex s, double u, int k) {
  return k == 0 ? std::cos(s * u) : -s * std::sin(s * u);
}
Complex dsin(Complex s, double u, int k) {
  return k == 0 ? std::sin(s * u) : s * std::cos(s * u);
}

// int_from^to d^k/dx^k sin s(x - z) q(z) y(z) dz along the trace.
template <ScalarType T>
Complex kernel_integral(const PiecewiseSolution<T>& sol, const std::vector<double>& coeffs,
                        Side side, Complex s, double x, double from, double to, int k,
                        const GaussRule& rule) {
  if (from == to) return {};
  const double len = to - from;
  const int panels =
      std::max(4, static_cast<int>(std::ceil(std::abs(len) * (std::abs(s) + 1.0) * 0.5)));
  const double h = len / panels;
  Complex acc{};
  for (int p = 0; p < panels; ++p) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = from + h * (p + 0.5 * (rule.nodes[i] + 1.0));
      const Complex yz = Complex(sol.at(z, side).y);
      const Complex kern = k == 0 ? std::sin(s * (x - z)) : s * std::cos(s * (x - z));
      acc += rule.weights[i] * kern * Potential::horner(coeffs, z) * yz;
    }
  }
  return 0.5 * h * acc;
}

}  // namespace

template <ScalarType T>
double integral_residual(const ProblemSpec& spec, const PiecewiseSolution<T>& sol,
                         IdentityPiece which, int k, const std::vector<double>& sample_xs) {
  if (k != 0 && k != 1) throw Error(ErrorCode::InvalidArgument, "k must be 0 or 1");
  const bool phi_kind = which == IdentityPiece::Phi1 || which == IdentityPiece::Phi2;
  if (phi_kind != (sol.kind == SolutionKind::Phi))
    throw Error(ErrorCode::InvalidArgument, "identity does not match the solution kind");
  const Complex lambda = Complex(sol.lambda);
  const Complex s = principal_sqrt(lambda);
  if (s == Complex{}) throw Error(ErrorCode::InvalidArgument, "identities need lambda != 0");

  const bool left = which == IdentityPiece::Phi1 || which == IdentityPiece::Psi1;
  const Side side = left ? Side::Left : Side::Right;
  const std::vector<double>& coeffs = left ? spec.q.left : spec.q.right;
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  const GaussRule rule = gauss_legendre(16);

  // Base point, initial data there, and the integration orientation.
  double x0 = 0.0;
  Complex y_base{}, yp_base{};
  switch (which) {
    case IdentityPiece::Phi1:
      x0 = spec.a;
      y_base = spec.alpha11;
      yp_base = -spec.alpha10;
      break;
    case IdentityPiece::Phi2: {
      x0 = spec.c;
      const Complex f = Complex(sol.c_minus().y), fp = Complex(sol.c_minus().yp);
      y_base = (d.d23 * f + d.d24 * fp) / d.d12;
      yp_base = -(d.d13 * f + d.d14 * fp) / d.d12;
      break;
    }
    case IdentityPiece::Psi1: {
      x0 = spec.c;
      const Complex g = Complex(sol.c_plus().y), gp = Complex(sol.c_plus().yp);
      y_base = -(d.d14 * g + d.d24 * gp) / d.d34;
      yp_base = (d.d13 * g + d.d23 * gp) / d.d34;
      break;
    }
    case IdentityPiece::Psi2:
      x0 = spec.b;
      y_base = spec.alpha21 + lambda * spec.alpha21p;
      yp_base = spec.alpha20 + lambda * spec.alpha20p;
      break;
  }

  double worst = 0.0;
  for (double x : sample_xs) {
    const StateVector<T> st = sol.at(x, side);
    const Complex lhs = Complex(k == 0 ? st.y : st.yp);
    const double u = x - x0;
    Complex rhs = y_base * dcos(s, u, k) + yp_base * dsin(s, u, k) / s;
    // Oriented integral from x0 to x covers both forward and backward pieces.
    rhs += kernel_integral(sol, coeffs, side, s, x, x0, x, k, rule) / s;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

#define TSL_INSTANTIATE(T)                                                                       \
  template struct PiecewiseSolution<T>;                                                          \
  template std::array<T, 2> transmission_residual(const TransmissionMatrix&,                     \
                                                  const StateVector<T>&, const StateVector<T>&); \
  template StateVector<T> transmission_forward(const TransmissionMatrix&, const StateVector<T>&); \
  template StateVector<T> transmission_backward(const TransmissionMatrix&,                       \
                                                const StateVector<T>&);                          \
  template StateVector<T> transmission_forward_closed_form(const DeterminantSet&,                \
                                                           const StateVector<T>&);               \
  template StateVector<T> transmission_backward_closed_form(const DeterminantSet&,               \
                                                            const StateVector<T>&);              \
  template T tau1(const ProblemSpec&, const StateVector<T>&);                                    \
  template T tau2(const ProblemSpec&, T, const StateVector<T>&);                                 \
  template PiecewiseSolution<T> phi(const ProblemSpec&, T, const IntegratorOptions&);            \
  template PiecewiseSolution<T> psi(const ProblemSpec&, T, const IntegratorOptions&);            \
  template PicardSeries<T> picard_phi2(const ProblemSpec&, T, const StateVector<T>&,             \
                                       const PicardOptions&);                                    \
  template PicardSeries<T> picard_phi2(const ProblemSpec&, T, const PicardOptions&,              \
                                       const IntegratorOptions&);                                \
  template double integral_residual(const ProblemSpec&, const PiecewiseSolution<T>&,            \
                                    IdentityPiece, int, const std::vector<double>&);

TSL_INSTANTIATE(double)
TSL_INSTANTIATE(Complex)

#undef TSL_INSTANTIATE

}  // namespace tsl
