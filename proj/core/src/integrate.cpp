#include "tsl/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsl {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b_hat for the embedded fourth-order solution.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

template <ScalarType T>
struct Rhs {
  const std::vector<double>& coeffs;
  T lambda;

  StateVector<T> operator()(double x, const StateVector<T>& s) const {
    return {s.yp, (Potential::horner(coeffs, x) - lambda) * s.y};
  }
};

template <ScalarType T>
StateVector<T> axpy(const StateVector<T>& y, double h,
                    std::initializer_list<std::pair<double, const StateVector<T>*>> terms) {
  StateVector<T> out = y;
  for (const auto& [w, k] : terms) {
    out.y += (h * w) * k->y;
    out.yp += (h * w) * k->yp;
  }
  return out;
}

template <ScalarType T>
bool finite(const StateVector<T>& s) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(s.y) && std::isfinite(s.yp);
  } else {
    return std::isfinite(s.y.real()) && std::isfinite(s.y.imag()) && std::isfinite(s.yp.real()) &&
           std::isfinite(s.yp.imag());
  }
}

template <ScalarType T>
T hermite(double t, double h, T p0, T p1, T m0, T m1) {
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * p0 + (h10 * h) * m0 + h01 * p1 + (h11 * h) * m1;
}

}  // namespace

void check_options(const IntegratorOptions& opts) {
  if (!(opts.rel_tol > 0.0 && opts.rel_tol < 1.0) || !(opts.abs_tol > 0.0 && opts.abs_tol < 1.0))
    throw Error(ErrorCode::InvalidArgument, "integrator tolerances must lie in (0, 1)");
  if (opts.max_steps < 1) throw Error(ErrorCode::InvalidArgument, "max_steps must be >= 1");
  if (opts.max_step < 0.0) throw Error(ErrorCode::InvalidArgument, "max_step must be >= 0");
}

template <ScalarType T>
StateVector<T> Trace<T>::at(double x) const {
  if (xs.size() < 2) throw Error(ErrorCode::InvalidArgument, "trace holds fewer than two samples");
  if (x < lo() || x > hi()) {
    std::ostringstream msg;
    msg << "x=" << x << " outside trace [" << lo() << ", " << hi() << "]";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  // Index i with x between xs[i] and xs[i+1].
  std::size_t i;
  if (increasing()) {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    i = it == xs.end() ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
  } else {
    auto it = std::upper_bound(xs.begin(), xs.end(), x, std::greater<double>());
    i = it == xs.end() ? xs.size() - 2 : static_cast<std::size_t>(it - xs.begin()) - 1;
  }
  i = std::min(i, xs.size() - 2);
  if (x == xs[i]) return states[i];
  if (x == xs[i + 1]) return states[i + 1];
  const double h = xs[i + 1] - xs[i];
  const double t = (x - xs[i]) / h;
  return {hermite<T>(t, h, states[i].y, states[i + 1].y, slopes[i].y, slopes[i + 1].y),
          hermite<T>(t, h, states[i].yp, states[i + 1].yp, slopes[i].yp, slopes[i + 1].yp)};
}

template <ScalarType T>
Trace<T> integrate_ivp(const Potential& q, double c, T lambda, double x0, double x1,
                       StateVector<T> y0, const IntegratorOptions& opts) {
  check_options(opts);
  if (!(x0 != x1) || !std::isfinite(x0) || !std::isfinite(x1))
    throw Error(ErrorCode::InvalidArgument, "integration interval must have positive length");
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);
  if (lo < c && hi > c) {
    std::ostringstream msg;
    msg << "[" << lo << ", " << hi << "] straddles the transmission point c=" << c;
    throw Error(ErrorCode::StraddlesTransmissionPoint, msg.str());
  }
  if (!finite(y0)) throw Error(ErrorCode::NonFiniteState, "initial state is not finite");

  const std::vector<double>& coeffs = hi <= c ? q.left : q.right;
  const Rhs<T> f{coeffs, lambda};
  const double dir = x1 > x0 ? 1.0 : -1.0;
  const double length = hi - lo;

  // Forced landing points, ordered along the direction of integration.
  std::vector<double> stops;
  for (double p : opts.dense_output_points)
    if (p > lo && p < hi) stops.push_back(p);
  std::sort(stops.begin(), stops.end());
  if (dir < 0) std::reverse(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());
  stops.push_back(x1);
  std::size_t next_stop = 0;

  Trace<T> trace;
  double x = x0;
  StateVector<T> y = y0;
  StateVector<T> k1 = f(x, y);
  trace.xs.push_back(x);
  trace.states.push_back(y);
  trace.slopes.push_back(k1);

  // Initial step from the local oscillation/growth scale |q - lambda|^(1/2).
  const double rate = std::sqrt(std::abs(Potential::horner(coeffs, x0) - lambda) + 1.0);
  double h = std::min(length, 0.05 / rate);
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

  constexpr double kSafety = 0.9, kMinFactor = 0.2, kMaxFactor = 5.0;
  std::size_t steps = 0;
  while (next_stop < stops.size()) {
    if (++steps > opts.max_steps) {
      std::ostringstream msg;
      msg << "exceeded " << opts.max_steps << " steps at x=" << x;
      throw Error(ErrorCode::StepLimitExceeded, msg.str());
    }
    const double target = stops[next_stop];
    const double remaining = std::abs(target - x);
    bool lands = false;
    double hs = h;
    if (hs >= remaining * (1.0 - 1e-12)) {
      hs = remaining;
      lands = true;
    }
    const double sh = dir * hs;

    const StateVector<T> k2 = f(x + c2 * sh, axpy(y, sh, {{a21, &k1}}));
    const StateVector<T> k3 = f(x + c3 * sh, axpy(y, sh, {{a31, &k1}, {a32, &k2}}));
    const StateVector<T> k4 = f(x + c4 * sh, axpy(y, sh, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const StateVector<T> k5 =
        f(x + c5 * sh, axpy(y, sh, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const StateVector<T> k6 =
        f(x + sh, axpy(y, sh, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const StateVector<T> y_new =
        axpy(y, sh, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const double x_new = lands ? target : x + sh;
    const StateVector<T> k7 = f(x_new, y_new);

    const StateVector<T> err =
        axpy(StateVector<T>{}, sh,
             {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
    auto ratio = [&](T e, T a, T b) {
      const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(a), std::abs(b));
      return std::abs(e) / scale;
    };
    const double err_norm = std::max(ratio(err.y, y.y, y_new.y), ratio(err.yp, y.yp, y_new.yp));
    if (!std::isfinite(err_norm)) {
      if (!finite(y_new)) throw Error(ErrorCode::NonFiniteState, "solution overflowed");
    }

    if (err_norm <= 1.0) {
      x = x_new;
      y = y_new;
      k1 = k7;
      trace.xs.push_back(x);
      trace.states.push_back(y);
      trace.slopes.push_back(k1);
      if (lands) ++next_stop;
      const double factor =
          err_norm == 0.0 ? kMaxFactor
                          : std::clamp(kSafety * std::pow(err_norm, -0.2), kMinFactor, kMaxFactor);
      // A landing step may be artificially short; do not let it shrink h.
      h = lands ? std::max(h, hs * factor) : hs * factor;
    } else {
      h = hs * std::max(kMinFactor, kSafety * std::pow(err_norm, -0.2));
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    if (h < 1e-14 * std::max(1.0, std::abs(x)))
      throw Error(ErrorCode::StepLimitExceeded, "step size underflow");
  }
  return trace;
}

template struct Trace<double>;
template struct Trace<Complex>;
template Trace<double> integrate_ivp(const Potential&, double, double, double, double,
                                     StateVector<double>, const IntegratorOptions&);
template Trace<Complex> integrate_ivp(const Potential&, double, Complex, double, double,
                                      StateVector<Complex>, const IntegratorOptions&);

}  // namespace tsl
