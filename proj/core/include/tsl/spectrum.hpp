#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tsl/charfun.hpp"
#include "tsl/integrate.hpp"
#include "tsl/model.hpp"
#include "tsl/solutions.hpp"

namespace tsl {

// Predicted square root of an eigenvalue from the leading term of omega.
// Branch 1 is attached to the length b - c, branch 2 to c - a.
//
//   case I    s_n1 = (n - 2) pi / (b - c)     s_n2 = n pi / (c - a)
//   case II   s_n1 = (n - 1) pi / (b - c)     s_n2 = (n + 1/2) pi / (c - a)
//   case III  s_n1 = (n + 1/2) pi / (b - c)   s_n2 = (n - 1) pi / (c - a)
//   case IV   s_n1 = (n - 1/2) pi / (b - c)   s_n2 = (n + 1/2) pi / (c - a)
struct AsymptoticSeed {
  double s_pred = 0.0;
  int branch = 1;
  int n = 0;
  CaseTag tag = CaseTag::I;

  double lambda_pred() const { return s_pred * s_pred; }
};

// Seeds for n in [n_min, n_max] on both branches, sorted by s_pred; seeds
// with s_pred <= 0 are dropped. Throws DegenerateLeadingCoefficient when
// d24 vanishes (relative to the largest transmission determinant).
std::vector<AsymptoticSeed> asymptotic_seeds(const ProblemSpec& spec, int n_min, int n_max,
                                             double zero_tol = kDefaultZeroTol);

bool leading_coefficient_vanishes(const ProblemSpec& spec, double zero_tol = kDefaultZeroTol);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double w_lo = 0.0;
  double w_hi = 0.0;
};

// Sign changes of omega between consecutive samples of a sorted lambda
// grid. A sample where omega is exactly zero yields the degenerate bracket
// [x, x].
std::vector<Bracket> brackets_from_samples(const std::vector<double>& lambdas,
                                           const std::vector<double>& values);

std::vector<Bracket> scan_brackets(const ProblemSpec& spec, double lambda_min, double lambda_max,
                                   double step, const IntegratorOptions& opts = {},
                                   unsigned threads = 1);

struct Eigenpair {
  double lambda = 0.0;
  double s = 0.0;             // sqrt(|lambda|)
  bool s_imaginary = false;   // lambda < 0, so the root is i*s
  std::optional<int> n_index;
  std::optional<int> branch;
  // |omega / omega'| / max(1, |lambda|) at the refined root: a scale-free
  // estimate of the relative distance to the true zero.
  double residual = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::optional<PiecewiseSolution<double>> eigenfunction;
};

// Bracketed root refinement (TOMS 748) until the bracket is narrower than
// refine_tol * max(1, |lambda|). If the bracket no longer shows a sign
// change it is re-evaluated once with tighter integrator tolerances;
// LostBracket if that fails too.
Eigenpair refine(const ProblemSpec& spec, const Bracket& bracket, double refine_tol,
                 const IntegratorOptions& opts = {});

inline IntegratorOptions polish_defaults() {
  IntegratorOptions o;
  o.rel_tol = 1e-13;
  o.abs_tol = 1e-15;
  return o;
}

struct SpectrumOptions {
  // Used for the scan and the zero count.
  IntegratorOptions integrator{};
  // Used for root refinement and eigenfunctions, where the boundary
  // residual scales with lambda times the root error.
  IntegratorOptions polish = polish_defaults();
  double refine_tol = 1e-14;
  // Lower end of the scan; NaN selects -(sup|q| + 10).
  double lambda_min = std::numeric_limits<double>::quiet_NaN();
  // Scan step in s for lambda > 0 and in lambda below; 0 selects a step
  // from the piece lengths.
  double s_step = 0.0;
  double im_half_width = 5.0;
  bool check_completeness = true;
  int max_scan_refinements = 4;
  bool with_eigenfunctions = true;
  ContourOptions contour{};
  unsigned threads = 1;
};

struct SpectrumResult {
  std::vector<Eigenpair> eigenpairs;  // ascending
  double lambda_lo = 0.0;             // range covered by the scan and the count
  double lambda_hi = 0.0;
  std::optional<ZeroCount> zero_count;
  int roots_in_range = 0;  // real roots the scanner found in [lambda_lo, lambda_hi]
  bool complete = true;
  std::string note;
};

// The lowest `count` eigenvalues. Scans from lambda_min upward (merging
// seed-guided samples when d24 != 0), refines every bracket, and compares
// the number of roots with the argument-principle count over the covered
// range, refining the scan where roots are missing. The result is flagged
// incomplete rather than thrown.
SpectrumResult compute_spectrum(const ProblemSpec& spec, int count,
                                const SpectrumOptions& opts = {});

// compute_spectrum, throwing CompletenessMismatch when incomplete.
std::vector<Eigenpair> eigenvalues(const ProblemSpec& spec, int count,
                                   const SpectrumOptions& opts = {});

// Greedy nearest-seed labelling in s. A pair (eigenvalue, seed) is
// admissible if their s-distance is within the window (window <= 0 uses
// half the seed spacing of the seed's branch); pairs are taken in order of
// distance with ties going to branch 1, and each seed and eigenvalue is
// used at most once. Negative eigenvalues are never labelled.
void label_branches(std::vector<Eigenpair>& eigs, const std::vector<AsymptoticSeed>& seeds,
                    double window = 0.0);

// phi at the eigenvalue, scaled so that its largest |y| sample is +1.
// Throws NotAnEigenvalue unless |W[phi, psi]| on both pieces is below
// 1e-6 times the product of the state norms of phi and psi.
PiecewiseSolution<double> eigenfunction(const ProblemSpec& spec, double lambda,
                                        const IntegratorOptions& opts = {});

// Relative Wronskian certificate used by eigenfunction(): the larger of the
// two one-piece values |W| / (|phi| |psi|), with |.| the max of |y|, |y'|.
double proportionality_defect(const ProblemSpec& spec, double lambda,
                              const IntegratorOptions& opts = {});

}  // namespace tsl
