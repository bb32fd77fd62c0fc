#pragma once

#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "tsl/model.hpp"

namespace tsl {

template <class T>
concept ScalarType = std::is_same_v<T, double> || std::is_same_v<T, Complex>;

template <ScalarType T>
struct StateVector {
  T y{};
  T yp{};
};

// Samples of one solution on a single piece. xs is strictly monotone in
// the direction of integration; slopes[i] = d/dx states[i].
template <ScalarType T>
struct Trace {
  std::vector<double> xs;
  std::vector<StateVector<T>> states;
  std::vector<StateVector<T>> slopes;

  std::size_t size() const { return xs.size(); }
  bool increasing() const { return xs.back() > xs.front(); }
  double lo() const { return increasing() ? xs.front() : xs.back(); }
  double hi() const { return increasing() ? xs.back() : xs.front(); }
  const StateVector<T>& front() const { return states.front(); }
  const StateVector<T>& back() const { return states.back(); }

  // Cubic Hermite interpolation between accepted steps. Throws
  // InvalidArgument outside [lo(), hi()].
  StateVector<T> at(double x) const;
};

struct IntegratorOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  std::size_t max_steps = 500000;
  // Abscissae the integrator must land on exactly; points outside the
  // integration interval are ignored.
  std::vector<double> dense_output_points;
  // Upper bound on the step length; 0 leaves it unbounded.
  double max_step = 0.0;
};

void check_options(const IntegratorOptions& opts);

// Integrates -y'' + q y = lambda y from x0 to x1 (either direction) with the
// Dormand-Prince 5(4) pair. [min(x0,x1), max(x0,x1)] must lie in one piece
// of q; an endpoint equal to c selects the one-sided limit of that piece.
template <ScalarType T>
Trace<T> integrate_ivp(const Potential& q, double c, T lambda, double x0, double x1,
                       StateVector<T> y0, const IntegratorOptions& opts);

extern template struct Trace<double>;
extern template struct Trace<Complex>;
extern template Trace<double> integrate_ivp(const Potential&, double, double, double, double,
                                            StateVector<double>, const IntegratorOptions&);
extern template Trace<Complex> integrate_ivp(const Potential&, double, Complex, double, double,
                                             StateVector<Complex>, const IntegratorOptions&);

}  // namespace tsl
