#pragma once

#include <vector>

#include "tsl/integrate.hpp"
#include "tsl/model.hpp"
#include "tsl/solutions.hpp"

namespace tsl {

// The characteristic function is
//
//     omega(lambda) = d34 W[phi1, psi1] = d12 W[phi2, psi2]
//
// with the determinants in the SidesExchanged orientation (so d34 is the
// determinant of the stored c- block and d12 that of the c+ block). Its
// zeros are the eigenvalues. Three evaluation paths are available and
// must agree; the production path is ViaPsiAtA.
enum class CharPath {
  ViaPhiAtB,             // d12 [phi2(b) psi2'(b) - phi2'(b) psi2(b)], needs phi only
  ViaPsiAtA,             // d34 [alpha11 psi1'(a) + alpha10 psi1(a)], needs psi only
  ViaWronskianMidpoint,  // d34 W[phi1, psi1] at (a + c)/2 from both traces
};

template <ScalarType T>
struct CharSample {
  T lambda{};
  T w{};
  CharPath path = CharPath::ViaPsiAtA;
};

// y_a y_b' - y_a' y_b at x on the given piece (interpolated).
template <ScalarType T>
T wronskian(const PiecewiseSolution<T>& sol_a, const PiecewiseSolution<T>& sol_b, double x,
            Side side);

template <ScalarType T>
T charfun(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts = {});

// Path ViaPhiAtB.
template <ScalarType T>
T charfun_via_boundary(const ProblemSpec& spec, T lambda, const IntegratorOptions& opts = {});

template <ScalarType T>
CharSample<T> charfun_sample(const ProblemSpec& spec, T lambda, CharPath path,
                             const IntegratorOptions& opts = {});

// Evaluates all three paths and throws ConsistencyFailure when any pair
// differs by more than rel_tol relative to the largest magnitude.
template <ScalarType T>
T charfun_checked(const ProblemSpec& spec, T lambda, double rel_tol,
                  const IntegratorOptions& opts = {});

// omega on lambda_min + i*step, i = 0..floor((lambda_max - lambda_min)/step).
struct CharGrid {
  std::vector<double> lambdas;
  std::vector<double> values;
};

CharGrid charfun_grid(const ProblemSpec& spec, double lambda_min, double lambda_max, double step,
                      const IntegratorOptions& opts = {}, unsigned threads = 1);

struct ContourOptions {
  int n_points = 256;       // total points on the rectangle for the first pass
  int max_refinements = 1;  // doublings allowed after the first pass
  IntegratorOptions integrator{};
  unsigned threads = 1;
};

struct ZeroCount {
  int count = 0;
  double winding = 0.0;  // real part of the raw contour integral
  double error = 0.0;    // max(|I_N - I_N/2|, |I_N - round(I_N)|, |Im I_N|)
  int points = 0;
  double re_lo = 0.0, re_hi = 0.0, im_half_width = 0.0;  // rectangle actually used
};

// Winding number of omega around [re_lo, re_hi] x [-h, h] by the
// trapezoid rule applied to omega'/omega on each edge, with omega' from
// central differences. Throws ZeroOnContour if omega vanishes on the
// contour after one perturbation of the rectangle, QuadratureInconclusive
// if the error estimate stays >= 0.25.
ZeroCount count_zeros(const ProblemSpec& spec, double re_lo, double re_hi, double im_half_width,
                      const ContourOptions& opts = {});

// Sum of count_zeros over consecutive rectangles [breaks[i], breaks[i+1]]
// with point counts sized to each rectangle.
ZeroCount count_zeros_partitioned(const ProblemSpec& spec, const std::vector<double>& breaks,
                                  double im_half_width, const ContourOptions& opts = {});

}  // namespace tsl
