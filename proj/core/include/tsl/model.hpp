#pragma once

// Problem description for the Sturm-Liouville equation
//
//     -y'' + q(x) y = lambda y   on [a, c) U (c, b]
//
// with boundary conditions
//
//     tau1(y) = alpha10 y(a) + alpha11 y'(a) = 0
//     tau2(y) = alpha20 y(b) - alpha21 y'(b)
//               + lambda (alpha20p y(b) - alpha21p y'(b)) = 0
//
// and two transmission conditions at the interior point c,
//
//     tau_{2+i}(y) = beta(i,0) y(c-) + beta(i,1) y'(c-)
//                  + beta(i,2) y(c+) + beta(i,3) y'(c+) = 0,   i = 1, 2.

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "tsl/error.hpp"

namespace tsl {

using Complex = std::complex<double>;

enum class Side { Left, Right, Auto };

// Piecewise polynomial potential, constant term first on each side.
struct Potential {
  std::vector<double> left;
  std::vector<double> right;

  static double horner(const std::vector<double>& coeffs, double x);
  double eval_left(double x) const { return horner(left, x); }
  double eval_right(double x) const { return horner(right, x); }
  bool is_zero() const;
};

// Rows are the two transmission conditions; columns multiply
// (y(c-), y'(c-), y(c+), y'(c+)).
using TransmissionMatrix = std::array<std::array<double, 4>, 2>;

struct ProblemSpec {
  double a = 0.0;
  double c = 1.0;
  double b = 2.0;
  double alpha10 = 0.0;
  double alpha11 = 0.0;
  double alpha20 = 0.0;
  double alpha21 = 0.0;
  double alpha20p = 0.0;
  double alpha21p = 0.0;
  TransmissionMatrix beta{};
  Potential q;
};

// d0 is det [[alpha21, alpha20], [alpha21p, alpha20p]]; dkj is the
// determinant of columns k and j of the transmission matrix.
struct DeterminantSet {
  double d0 = 0.0;
  double d12 = 0.0;
  double d13 = 0.0;
  double d14 = 0.0;
  double d23 = 0.0;
  double d24 = 0.0;
  double d34 = 0.0;

  // d12 d34 - d13 d24 + d14 d23, zero for every 2x4 matrix.
  double plucker() const { return d12 * d34 - d13 * d24 + d14 * d23; }
  double plucker_scale() const;
};

// Which column block of the transmission matrix is read as the c- block.
//
// AsStored is the literal reading of the conditions above. SidesExchanged
// swaps the (c-) and (c+) column pairs. The closed-form jump formulas
//
//     y(c+)  =  (d23 y(c-) + d24 y'(c-)) / d12
//     y'(c+) = -(d13 y(c-) + d14 y'(c-)) / d12
//
// and every leading-term asymptotic expression in this library are exact
// for the literal transmission conditions when the determinants are taken
// in the SidesExchanged orientation. In that orientation the
// characteristic function reads omega = d34 W[phi1, psi1] = d12 W[phi2, psi2].
enum class Orientation { AsStored, SidesExchanged };

TransmissionMatrix exchange_sides(const TransmissionMatrix& beta);

DeterminantSet compute_determinants(const ProblemSpec& spec,
                                    Orientation orientation = Orientation::AsStored);

enum class CaseTag { I, II, III, IV };

std::string_view to_string(CaseTag tag);

inline constexpr double kDefaultZeroTol = 1e-12;

// alpha21p is compared against the largest right-boundary coefficient and
// alpha11 against the largest left-boundary coefficient, both scaled by
// zero_tol.
CaseTag classify_case(const ProblemSpec& spec, double zero_tol = kDefaultZeroTol);

bool alpha11_vanishes(const ProblemSpec& spec, double zero_tol = kDefaultZeroTol);
bool alpha21p_vanishes(const ProblemSpec& spec, double zero_tol = kDefaultZeroTol);

struct Issue {
  ErrorCode code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const { return errors.empty(); }
};

// Strict mode enforces a < c < b, non-degenerate boundary rows and
// d0 > 0, d12 > 0, d34 > 0. Permissive mode reports the positivity
// conditions as warnings so that classical (lambda-independent,
// continuous) problems can run through the same pipeline.
ValidationReport validate(const ProblemSpec& spec, bool strict);

// Throws the first error of validate(spec, strict).
void require_valid(const ProblemSpec& spec, bool strict);

// q(x) on the indicated piece. Side::Auto picks the piece from x and c
// and throws AtTransmissionPointWithoutSide for x == c.
double eval_q(const ProblemSpec& spec, double x, Side side = Side::Auto);

// max |q| over the closure of one piece, by dense sampling.
double sup_abs_q(const ProblemSpec& spec, Side side);
double sup_abs_q(const ProblemSpec& spec);

// Problem files (JSON).
ProblemSpec parse_problem(std::string_view json_text);
ProblemSpec load_problem(const std::string& path);
std::string to_json(const ProblemSpec& spec);

}  // namespace tsl
