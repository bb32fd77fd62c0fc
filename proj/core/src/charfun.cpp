#include "tsl/charfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tsl/parallel.hpp"

namespace tsl {

template <ScalarType T>
T wronskian(const PiecewiseSolution<T>& sol_a, const PiecewiseSolution<T>& sol_b, double x,
            Side side) {
  if (sol_a.lambda != sol_b.lambda)
    throw Error(ErrorCode::PieceMismatch, "Wronskian of solutions with different lambda");
  if (side == Side::Auto) throw Error(ErrorCode::PieceMismatch, "Wronskian needs an explicit side");
  const StateVector<T> u = sol_a.at(x, side);
  const StateVector<T> v = sol_b.at(x, side);
  return u.y * v.yp - u.yp * v.y;
}

template <ScalarType T>
CharSample<T> charfun_sample(const ProblemSpec& spec, T lambda, CharPath path,
                             const IntegratorOptions& opts) {
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  CharSample<T> out{lambda, T{}, path};
  switch (path) {
    case CharPath::ViaPsiAtA: {
      const PiecewiseSolution<T> p = psi(spec, lambda, opts);
      const StateVector<T>& ya = p.at_a();
      out.w = d.d34 * (spec.alpha11 * ya.yp + spec.alpha10 * ya.y);
      break;
    }
    case CharPath::ViaPhiAtB: {
      const PiecewiseSolution<T> f = phi(spec, lambda, opts);
      const StateVector<T>& yb = f.at_b();
      const T psi_b = spec.alpha21 + lambda * spec.alpha21p;
      const T psi_b_prime = spec.alpha20 + lambda * spec.alpha20p;
      out.w = d.d12 * (yb.y * psi_b_prime - yb.yp * psi_b);
      break;
    }
    case CharPath::ViaWronskianMidpoint: {
      IntegratorOptions mid = opts;
      const double xm = 0.5 * (spec.a + spec.c);
      mid.dense_output_points.push_back(xm);
      const PiecewiseSolution<T> f = phi(spec, lambda, mid);
      const PiecewiseSolution<T> p = psi(spec, lambda, mid);
      out.w = d.d34 * wronskian(f, p, xm, Side::Left);
      break;
    }
  }
  return out;
}

template <ScalarType T>
T charfun(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts) {
  return charfun_sample(spec, lambda, CharPath::ViaPsiAtA, opts).w;
}

template <ScalarType T>
T charfun_via_boundary(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts) {
  return charfun_sample(spec, lambda, CharPath::ViaPhiAtB, opts).w;
}

template <ScalarType T>
T charfun_checked(const ProblemSpec& spec, T lambda, double rel_tol,
                  const IntegratorOptions& opts) {
  const T w_a = charfun_sample(spec, lambda, CharPath::ViaPsiAtA, opts).w;
  const T w_b = charfun_sample(spec, lambda, CharPath::ViaPhiAtB, opts).w;
  const T w_m = charfun_sample(spec, lambda, CharPath::ViaWronskianMidpoint, opts).w;
  const double scale = std::max({std::abs(w_a), std::abs(w_b), std::abs(w_m)});
  const double spread =
      std::max({std::abs(w_a - w_b), std::abs(w_a - w_m), std::abs(w_b - w_m)});
  if (spread > rel_tol * scale) {
    std::ostringstream msg;
    msg << "characteristic function paths disagree at lambda=" << lambda << ": spread " << spread
        << " vs scale " << scale;
    throw Error(ErrorCode::ConsistencyFailure, msg.str());
  }
  return w_a;
}

CharGrid charfun_grid(const ProblemSpec& spec, double lambda_min, double lambda_max, double step,
                      const IntegratorOptions& opts, unsigned threads) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
  if (!(lambda_max >= lambda_min))
    throw Error(ErrorCode::InvalidArgument, "lambda_max must be >= lambda_min");
  const auto n = static_cast<std::size_t>(std::floor((lambda_max - lambda_min) / step + 1e-9)) + 1;
  CharGrid grid;
  grid.lambdas.resize(n);
  grid.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) grid.lambdas[i] = lambda_min + static_cast<double>(i) * step;
  parallel_for(n, threads, [&](std::size_t i) {
    grid.values[i] = charfun<double>(spec, grid.lambdas[i], opts);
  });
  return grid;
}

namespace {

struct ContourPoint {
  Complex lambda;
  Complex weight;  // trapezoid weight times d lambda direction
  bool even;       // also used by the half-resolution rule
};

// Trapezoid nodes on the four edges, counter-clockwise from re_lo - ih.
std::vector<ContourPoint> contour_nodes(double re_lo, double re_hi, double h, int n_points) {
  const Complex corners[4] = {{re_lo, -h}, {re_hi, -h}, {re_hi, h}, {re_lo, h}};
  const double perimeter = 2.0 * (re_hi - re_lo) + 4.0 * h;
  std::vector<ContourPoint> nodes;
  for (int e = 0; e < 4; ++e) {
    const Complex p0 = corners[e], p1 = corners[(e + 1) % 4];
    const double len = std::abs(p1 - p0);
    // Even number of intervals so every other node forms the coarse rule.
    int m = static_cast<int>(std::ceil(n_points * len / perimeter));
    m = std::max(4, m + (m % 2));
    const Complex dz = (p1 - p0) / static_cast<double>(m);
    for (int j = 0; j < m; ++j) {
      // Node j carries the trapezoid weight of interval endpoints; corners
      // (j == 0) collect half from this edge and half from the previous.
      const Complex z = p0 + static_cast<double>(j) * dz;
      nodes.push_back({z, j == 0 ? 0.5 * dz : dz, j % 2 == 0});
    }
    // Add the trailing half weight of the end corner to the next edge's first node.
    nodes.push_back({p1, 0.5 * dz, true});
  }
  return nodes;
}

struct ContourEval {
  std::vector<Complex> w, dw;
};

ContourEval evaluate_contour(const ProblemSpec& spec, const std::vector<ContourPoint>& nodes,
                             const ContourOptions& opts) {
  ContourEval ev;
  ev.w.resize(nodes.size());
  ev.dw.resize(nodes.size());
  parallel_for(nodes.size(), opts.threads, [&](std::size_t i) {
    const Complex z = nodes[i].lambda;
    const double step = std::max(1e-6, 1e-8 * std::abs(z));
    ev.w[i] = charfun<Complex>(spec, z, opts.integrator);
    const Complex up = charfun<Complex>(spec, z + step, opts.integrator);
    const Complex dn = charfun<Complex>(spec, z - step, opts.integrator);
    ev.dw[i] = (up - dn) / (2.0 * step);
  });
  return ev;
}

// Returns the fine and coarse contour integrals of omega'/omega / (2 pi i).
std::pair<Complex, Complex> winding_integrals(const std::vector<ContourPoint>& nodes,
                                              const ContourEval& ev) {
  Complex fine{}, coarse{};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Complex ratio = ev.dw[i] / ev.w[i];
    fine += nodes[i].weight * ratio;
  }
  // Coarse rule: even nodes with doubled weight (corner halves double too).
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!nodes[k].even) continue;
    coarse += 2.0 * nodes[k].weight * (ev.dw[k] / ev.w[k]);
  }
  const Complex two_pi_i(0.0, 2.0 * std::numbers::pi);
  return {fine / two_pi_i, coarse / two_pi_i};
}

// A sample far below both neighbours marks a zero sitting on the contour.
bool contour_has_zero(const ContourEval& ev) {
  const std::size_t n = ev.w.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex& w = ev.w[i];
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag()) || !std::isfinite(std::abs(ev.dw[i])))
      return true;
    if (std::abs(w) == 0.0) return true;
    const double nb = std::min(std::abs(ev.w[(i + n - 1) % n]), std::abs(ev.w[(i + 1) % n]));
    if (std::abs(w) < 1e-10 * nb) return true;
  }
  return false;
}

}  // namespace

ZeroCount count_zeros(const ProblemSpec& spec, double re_lo, double re_hi, double im_half_width,
                      const ContourOptions& opts) {
  if (!(re_hi > re_lo) || !(im_half_width > 0.0))
    throw Error(ErrorCode::InvalidArgument, "contour rectangle must have positive extent");
  if (opts.n_points < 8) throw Error(ErrorCode::InvalidArgument, "need at least 8 contour points");

  double lo = re_lo, hi = re_hi, h = im_half_width;
  int n = opts.n_points;
  bool perturbed = false;
  for (int pass = 0;; ++pass) {
    const std::vector<ContourPoint> nodes = contour_nodes(lo, hi, h, n);
    const ContourEval ev = evaluate_contour(spec, nodes, opts);
    if (contour_has_zero(ev)) {
      if (perturbed) throw Error(ErrorCode::ZeroOnContour, "omega vanishes on the contour");
      perturbed = true;
      const double shift = 1e-3 * (hi - lo);
      lo -= shift;
      hi += shift;
      h *= 1.01;
      --pass;
      continue;
    }
    const auto [fine, coarse] = winding_integrals(nodes, ev);
    ZeroCount out;
    out.winding = fine.real();
    out.count = static_cast<int>(std::lround(fine.real()));
    out.error = std::max({std::abs(fine - coarse), std::abs(fine.real() - out.count),
                          std::abs(fine.imag())});
    out.points = static_cast<int>(nodes.size());
    out.re_lo = lo;
    out.re_hi = hi;
    out.im_half_width = h;
    if (out.error < 0.25) return out;
    if (pass >= opts.max_refinements) {
      std::ostringstream msg;
      msg << "winding estimate " << fine << " with error " << out.error << " after " << pass
          << " refinement(s) on [" << lo << ", " << hi << "] x [-" << h << ", " << h << "]";
      throw Error(ErrorCode::QuadratureInconclusive, msg.str());
    }
    n *= 2;
  }
}

ZeroCount count_zeros_partitioned(const ProblemSpec& spec, const std::vector<double>& breaks,
                                  double im_half_width, const ContourOptions& opts) {
  if (breaks.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two breakpoints");
  ZeroCount total;
  total.re_lo = breaks.front();
  total.re_hi = breaks.back();
  total.im_half_width = im_half_width;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double width = breaks[i + 1] - breaks[i];
    // Start at about two nodes per min(half-width, half-width of the
    // interval) along the perimeter; the error estimate drives refinement.
    const double spacing = std::min(im_half_width, 0.5 * width) / 2.0;
    ContourOptions local = opts;
    local.n_points = std::max(
        32, static_cast<int>(std::ceil((2.0 * width + 4.0 * im_half_width) / spacing)));
    local.max_refinements = std::max(opts.max_refinements, 2);
    const ZeroCount part = count_zeros(spec, breaks[i], breaks[i + 1], im_half_width, local);
    total.count += part.count;
    total.winding += part.winding;
    total.error = std::max(total.error, part.error);
    total.points += part.points;
  }
  return total;
}

template double wronskian(const PiecewiseSolution<double>&, const PiecewiseSolution<double>&,
                          double, Side);
template Complex wronskian(const PiecewiseSolution<Complex>&, const PiecewiseSolution<Complex>&,
                           double, Side);
template double charfun(const ProblemSpec&, double, const IntegratorOptions&);
template Complex charfun(const ProblemSpec&, Complex, const IntegratorOptions&);
template double charfun_via_boundary(const ProblemSpec&, double, const IntegratorOptions&);
template Complex charfun_via_boundary(const ProblemSpec&, Complex, const IntegratorOptions&);
template CharSample<double> charfun_sample(const ProblemSpec&, double, CharPath,
                                           const IntegratorOptions&);
template CharSample<Complex> charfun_sample(const ProblemSpec&, Complex, CharPath,
                                            const IntegratorOptions&);
template double charfun_checked(const ProblemSpec&, double, double, const IntegratorOptions&);
template Complex charfun_checked(const ProblemSpec&, Complex, double, const IntegratorOptions&);

}  // namespace tsl
