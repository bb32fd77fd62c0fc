#pragma once

#include <string>
#include <vector>

#include "tsl/integrate.hpp"
#include "tsl/model.hpp"
#include "tsl/spectrum.hpp"

namespace tsl::cli {

struct CheckResult {
  std::string name;
  bool ok = false;
  double value = 0.0;  // worst measured quantity
  double limit = 0.0;
  std::string detail;
};

struct CheckOptions {
  IntegratorOptions integrator{};
  // Reference solutions for the residual and Picard checks.
  IntegratorOptions reference = polish_defaults();
  unsigned threads = 1;
};

// max over x of |W(x) - W(x0)| / max |W| for W[phi, psi], five points per
// piece, at each lambda.
CheckResult check_wronskian_constancy(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                      const CheckOptions& opts = {});

// |d34 w1 - d12 w2| / |d34 w1| (exchanged determinants).
CheckResult check_proportionality(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                  const CheckOptions& opts = {});

// Variation-of-parameters residuals for phi and psi on both pieces, k = 0, 1,
// at 20 points per piece.
CheckResult check_integral_residuals(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                     const CheckOptions& opts = {});

// Picard phi2(b) against shooting, relative to max(1, |phi2(b)|).
CheckResult check_picard(const ProblemSpec& spec, const std::vector<double>& lambdas,
                         double tol = 1e-6, const CheckOptions& opts = {});

// Forward then backward transmission map on pseudo-random states.
CheckResult check_round_trip(const ProblemSpec& spec, int samples = 100);

// tau1..tau4 of each eigenfunction relative to its max-norm, and the
// Wronskian proportionality defect.
CheckResult check_eigenpairs(const ProblemSpec& spec, const std::vector<Eigenpair>& eigs,
                             double tol = 1e-8, double defect_tol = 1e-6,
                             const CheckOptions& opts = {});

// Largest of tau1..tau4 for one eigenfunction, relative to its max-norm.
double boundary_residual(const ProblemSpec& spec, const PiecewiseSolution<double>& eig);

}  // namespace tsl::cli
