#pragma once

#include <array>
#include <vector>

#include "tsl/integrate.hpp"
#include "tsl/model.hpp"

namespace tsl {

enum class SolutionKind { Phi, Psi };

// A solution on [a, c) U (c, b], stored as one trace per piece. phi is
// integrated outward from a (left trace increasing, right trace
// increasing); psi is integrated inward from b (both traces decreasing).
// The one-sided states at c are the trace endpoints, never extrapolated.
template <ScalarType T>
struct PiecewiseSolution {
  Trace<T> left;
  Trace<T> right;
  T lambda{};
  SolutionKind kind = SolutionKind::Phi;
  double a = 0.0;
  double c = 0.0;
  double b = 0.0;

  const StateVector<T>& c_minus() const {
    return kind == SolutionKind::Phi ? left.back() : left.front();
  }
  const StateVector<T>& c_plus() const {
    return kind == SolutionKind::Phi ? right.front() : right.back();
  }
  const StateVector<T>& at_a() const {
    return kind == SolutionKind::Phi ? left.front() : left.back();
  }
  const StateVector<T>& at_b() const {
    return kind == SolutionKind::Phi ? right.back() : right.front();
  }

  // Side::Auto is rejected at x == c.
  StateVector<T> at(double x, Side side = Side::Auto) const;

  // max |y| over the trace samples of both pieces.
  double max_norm() const;
};

// Residuals (tau3, tau4) of the transmission conditions for the given
// one-sided states.
template <ScalarType T>
std::array<T, 2> transmission_residual(const TransmissionMatrix& beta,
                                       const StateVector<T>& minus,
                                       const StateVector<T>& plus);

// (y(c+), y'(c+)) from (y(c-), y'(c-)) by solving the 2x2 system of the
// transmission conditions. Throws SingularPlusBlock when the c+ column
// block is singular. Debug builds cross-check transmission_forward_closed_form.
template <ScalarType T>
StateVector<T> transmission_forward(const TransmissionMatrix& beta, const StateVector<T>& minus);

// Inverse direction; throws SingularMinusBlock.
template <ScalarType T>
StateVector<T> transmission_backward(const TransmissionMatrix& beta, const StateVector<T>& plus);

// Determinant forms of the same maps. `exchanged` must come from
// compute_determinants(spec, Orientation::SidesExchanged):
//   forward:  y+ = (d23 y + d24 y')/d12,   y+' = -(d13 y + d14 y')/d12
//   backward: y- = -(d14 y + d24 y')/d34,  y-' =  (d13 y + d23 y')/d34
template <ScalarType T>
StateVector<T> transmission_forward_closed_form(const DeterminantSet& exchanged,
                                                const StateVector<T>& minus);
template <ScalarType T>
StateVector<T> transmission_backward_closed_form(const DeterminantSet& exchanged,
                                                 const StateVector<T>& plus);

// tau1(y) at a, tau2(y) at b for a state and spectral parameter.
template <ScalarType T>
T tau1(const ProblemSpec& spec, const StateVector<T>& at_a);
template <ScalarType T>
T tau2(const ProblemSpec& spec, T lambda, const StateVector<T>& at_b);

// phi: y(a) = alpha11, y'(a) = -alpha10, continued through c by the jump map.
template <ScalarType T>
PiecewiseSolution<T> phi(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts = {});

// psi: y(b) = alpha21 + lambda alpha21p, y'(b) = alpha20 + lambda alpha20p,
// continued backwards through c.
template <ScalarType T>
PiecewiseSolution<T> psi(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts = {});

struct PicardOptions {
  int n_terms = 25;
  int panels = 20;
  int nodes_per_panel = 8;
  // Repeat on a doubled panel count and require agreement at x = b.
  bool refinement_check = true;
  double refinement_tol = 1e-9;
};

// Successive approximations for phi on (c, b]:
//   y_0(x) = y(c+) + y'(c+) (x - c)
//   y_n(x) = y_0(x) + int_c^x (x - z) (q(z) - lambda) y_{n-1}(z) dz
// with y(c+), y'(c+) from the determinant form of the jump map applied to
// phi1(c). Integrals use composite Gauss-Legendre on a fixed grid.
template <ScalarType T>
struct PicardSeries {
  Trace<T> iterate;                              // y_n, y_n' at c, the nodes, and b
  std::vector<std::vector<double>> increments;   // |y_k - y_{k-1}| per node, k = 1..n
  double y0_max = 0.0;                           // max |y_0| over [c, b]
  T y0_at_c{};
  T y0_slope{};
};

template <ScalarType T>
PicardSeries<T> picard_phi2(const ProblemSpec& spec, T lambda, const StateVector<T>& phi1_at_c,
                            const PicardOptions& opts = {});

// Convenience overload: phi1(c) by shooting.
template <ScalarType T>
PicardSeries<T> picard_phi2(const ProblemSpec& spec, T lambda, const PicardOptions& opts = {},
                            const IntegratorOptions& integ = {});

// Y (q1 + |lambda|^n) (x - c)^(2n) / (2n)!, evaluated in log space.
double picard_truncation_bound(double y_max, double q1, double lambda_abs, double x, double c,
                               int n);

enum class IdentityPiece { Phi1, Phi2, Psi1, Psi2 };

// max over sample_xs of |LHS - RHS| for the variation-of-parameters
// identity of the chosen piece, differentiated k times (k = 0, 1):
//
//   phi1(x) = alpha11 cos s(x-a) - alpha10 sin s(x-a)/s
//             + (1/s) int_a^x sin s(x-z) q(z) phi1(z) dz
//   phi2(x) = y(c+) cos s(x-c) + y'(c+) sin s(x-c)/s
//             + (1/s) int_c^x sin s(x-z) q(z) phi2(z) dz
//   psi1(x) = y(c-) cos s(x-c) + y'(c-) sin s(x-c)/s
//             - (1/s) int_x^c sin s(x-z) q(z) psi1(z) dz
//   psi2(x) = psi2(b) cos s(x-b) + psi2'(b) sin s(x-b)/s
//             - (1/s) int_x^b sin s(x-z) q(z) psi2(z) dz
//
// where the one-sided values at c are written through the determinant
// form of the jump maps, and lambda = s^2 with the principal root.
// Integrals are computed by Gauss-Legendre quadrature over the
// interpolated trace.
template <ScalarType T>
double integral_residual(const ProblemSpec& spec, const PiecewiseSolution<T>& sol,
                         IdentityPiece which, int k, const std::vector<double>& sample_xs);

// Principal square root with Re s >= 0 and Im s >= 0 on the cut.
Complex principal_sqrt(Complex lambda);

}  // namespace tsl
