#include "tsl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsl {

double Potential::horner(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

bool Potential::is_zero() const {
  auto zero = [](double v) { return v == 0.0; };
  return std::all_of(left.begin(), left.end(), zero) &&
         std::all_of(right.begin(), right.end(), zero);
}

double DeterminantSet::plucker_scale() const {
  return std::max({std::abs(d12 * d34), std::abs(d13 * d24), std::abs(d14 * d23)});
}

TransmissionMatrix exchange_sides(const TransmissionMatrix& beta) {
  TransmissionMatrix out{};
  for (int i = 0; i < 2; ++i) {
    out[i][0] = beta[i][2];
    out[i][1] = beta[i][3];
    out[i][2] = beta[i][0];
    out[i][3] = beta[i][1];
  }
  return out;
}

DeterminantSet compute_determinants(const ProblemSpec& spec, Orientation orientation) {
  const TransmissionMatrix m =
      orientation == Orientation::AsStored ? spec.beta : exchange_sides(spec.beta);
  auto det = [&m](int k, int j) { return m[0][k] * m[1][j] - m[0][j] * m[1][k]; };
  DeterminantSet d;
  d.d0 = spec.alpha21 * spec.alpha20p - spec.alpha20 * spec.alpha21p;
  d.d12 = det(0, 1);
  d.d13 = det(0, 2);
  d.d14 = det(0, 3);
  d.d23 = det(1, 2);
  d.d24 = det(1, 3);
  d.d34 = det(2, 3);
  return d;
}

std::string_view to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::I: return "I";
    case CaseTag::II: return "II";
    case CaseTag::III: return "III";
    case CaseTag::IV: return "IV";
  }
  return "?";
}

namespace {

void check_zero_tol(double zero_tol) {
  if (!(zero_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero_tol must be positive");
}

double right_scale(const ProblemSpec& s) {
  return std::max({std::abs(s.alpha20), std::abs(s.alpha21), std::abs(s.alpha20p),
                   std::abs(s.alpha21p)});
}

double left_scale(const ProblemSpec& s) {
  return std::max(std::abs(s.alpha10), std::abs(s.alpha11));
}

}  // namespace

bool alpha11_vanishes(const ProblemSpec& spec, double zero_tol) {
  check_zero_tol(zero_tol);
  return std::abs(spec.alpha11) <= zero_tol * left_scale(spec);
}

bool alpha21p_vanishes(const ProblemSpec& spec, double zero_tol) {
  check_zero_tol(zero_tol);
  return std::abs(spec.alpha21p) <= zero_tol * right_scale(spec);
}

CaseTag classify_case(const ProblemSpec& spec, double zero_tol) {
  const bool a11_zero = alpha11_vanishes(spec, zero_tol);
  const bool a21p_zero = alpha21p_vanishes(spec, zero_tol);
  if (!a21p_zero) return a11_zero ? CaseTag::II : CaseTag::I;
  return a11_zero ? CaseTag::IV : CaseTag::III;
}

ValidationReport validate(const ProblemSpec& spec, bool strict) {
  ValidationReport report;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(spec.a) || !finite(spec.b) || !finite(spec.c) || !(spec.a < spec.c) ||
      !(spec.c < spec.b)) {
    std::ostringstream msg;
    msg << "require a < c < b, got a=" << spec.a << " c=" << spec.c << " b=" << spec.b;
    report.errors.push_back({ErrorCode::OrderingViolation, msg.str()});
  }
  if (spec.alpha10 == 0.0 && spec.alpha11 == 0.0) {
    report.errors.push_back({ErrorCode::DegenerateBoundaryRow, "(alpha10, alpha11) = (0, 0)"});
  }
  if (right_scale(spec) == 0.0) {
    report.errors.push_back(
        {ErrorCode::DegenerateBoundaryRow, "right boundary coefficients are all zero"});
  }

  const DeterminantSet d = compute_determinants(spec);
  auto positivity = [&](const char* name, double value) {
    if (value > 0.0) return;
    std::ostringstream msg;
    msg << name << " = " << value << " is not positive";
    Issue issue{ErrorCode::PositivityViolation, msg.str()};
    (strict ? report.errors : report.warnings).push_back(issue);
  };
  positivity("Delta0", d.d0);
  positivity("Delta12", d.d12);
  positivity("Delta34", d.d34);

  // The jump maps need both column blocks invertible even in permissive mode.
  if (!strict && (d.d12 == 0.0 || d.d34 == 0.0)) {
    report.errors.push_back({ErrorCode::PositivityViolation,
                             "Delta12 and Delta34 must be nonzero for the jump maps to exist"});
  }
  return report;
}

void require_valid(const ProblemSpec& spec, bool strict) {
  const ValidationReport report = validate(spec, strict);
  if (!report.ok()) throw Error(report.errors.front().code, report.errors.front().detail);
}

double eval_q(const ProblemSpec& spec, double x, Side side) {
  if (side == Side::Auto) {
    if (x == spec.c) {
      throw Error(ErrorCode::AtTransmissionPointWithoutSide,
                  "q is two-valued at the transmission point; pass Side::Left or Side::Right");
    }
    side = x < spec.c ? Side::Left : Side::Right;
  }
  return side == Side::Left ? spec.q.eval_left(x) : spec.q.eval_right(x);
}

double sup_abs_q(const ProblemSpec& spec, Side side) {
  const bool left = side == Side::Left;
  const double lo = left ? spec.a : spec.c;
  const double hi = left ? spec.c : spec.b;
  const auto& coeffs = left ? spec.q.left : spec.q.right;
  if (coeffs.size() <= 1) return coeffs.empty() ? 0.0 : std::abs(coeffs[0]);
  constexpr int kSamples = 4096;
  double best = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double x = lo + (hi - lo) * i / kSamples;
    best = std::max(best, std::abs(Potential::horner(coeffs, x)));
  }
  return best;
}

double sup_abs_q(const ProblemSpec& spec) {
  return std::max(sup_abs_q(spec, Side::Left), sup_abs_q(spec, Side::Right));
}

}  // namespace tsl
