#pragma once

#include <vector>

#include "tsl/model.hpp"
#include "tsl/solutions.hpp"
#include "tsl/spectrum.hpp"

namespace tsl {

// Leading terms for real s = sqrt(lambda) > 0, with d = the determinants in
// the SidesExchanged orientation. k is the derivative order (0 or 1).
//
// phi, alpha11 != 0:   [a, c)  alpha11 cos s(x-a)                         + O(s^(k-1))
//                      (c, b]  -(d24/d12) alpha11 s sin s(c-a) cos s(x-c) + O(s^k)
// phi, alpha11 == 0:   [a, c)  -(alpha10/s) sin s(x-a)                    + O(s^(k-2))
//                      (c, b]  -(d24/d12) alpha10 cos s(c-a) cos s(x-c)   + O(s^(k-1))
// psi, alpha21p != 0:  (c, b]  alpha21p s^2 cos s(b-x)                    + O(s^(k+1))
//                      [a, c)  -(d24/d34) alpha21p s^3 sin s(b-c) cos s(x-c) + O(s^(k+2))
// psi, alpha21p == 0:  (c, b]  -alpha20p s sin s(b-x)                     + O(s^k)
//                      [a, c)  -(d24/d34) alpha20p s^2 cos s(b-c) cos s(x-c) + O(s^(k+1))
//
// side selects the piece; Side::Auto picks it from x and rejects x == c.
double phi_leading(const ProblemSpec& spec, double lambda, double x, int k,
                   Side side = Side::Auto);
double psi_leading(const ProblemSpec& spec, double lambda, double x, int k,
                   Side side = Side::Auto);

// Exponent of s in the remainder bound of the formula above.
int remainder_order(const ProblemSpec& spec, SolutionKind kind, Side side, int k);

// Leading term of omega:
//   I    d24 alpha11 alpha21p s^4 sin s(b-c) sin s(a-c)
//   II  -d24 alpha10 alpha21p s^3 sin s(b-c) cos s(a-c)
//   III  d24 alpha11 alpha20p s^3 cos s(b-c) sin s(a-c)
//   IV  -d24 alpha10 alpha20p s^2 cos s(b-c) cos s(a-c)
// with remainder O(s^(m-1)) where m is the power shown.
double charfun_leading(const ProblemSpec& spec, double lambda);
int charfun_leading_power(CaseTag tag);

// Square root predicted by the literal seed offsets of the reference
// formulas, which exchange the offsets of cases II and III relative to
// asymptotic_seeds; (a - c) is read as c - a.
double literal_seed_s(const ProblemSpec& spec, int branch, int n);

enum class EigenfunctionReading {
  SeedConsistent,  // phi_leading at seed.s_pred
  Literal,         // reference expressions: literal_seed_s, and (n - 1) inside the
                   // right-piece sine of case I, branch 1
};

double eigenfunction_leading(const ProblemSpec& spec, const AsymptoticSeed& seed, double x,
                             Side side = Side::Auto,
                             EigenfunctionReading reading = EigenfunctionReading::SeedConsistent);

// |<u, v>| / (|u| |v|) in L2 over [a, b], by Gauss-Legendre on each piece,
// between a computed eigenfunction and the leading-term overlay.
double eigenfunction_overlap(const ProblemSpec& spec, const PiecewiseSolution<double>& eig,
                             const AsymptoticSeed& seed, EigenfunctionReading reading);

struct DecayRow {
  int n = 0;
  int branch = 1;
  double s_computed = 0.0;
  double s_pred = 0.0;
  double err = 0.0;
  double n_times_err = 0.0;
};

DecayRow make_decay_row(const AsymptoticSeed& seed, double s_computed);

struct DecayOptions {
  SpectrumOptions spectrum{};
  DecayOptions() { spectrum.check_completeness = false; spectrum.with_eigenfunctions = false; }
};

// Computes enough eigenvalues to cover the seeds up to n_max on both
// branches, labels them (label_branches with the default window) and
// tabulates the labelled ones with n in [n_min, n_max], sorted by branch
// then n. Throws DegenerateLeadingCoefficient when d24 = 0.
std::vector<DecayRow> decay_report(const ProblemSpec& spec, int n_min, int n_max,
                                   const DecayOptions& opts = {});

struct BoundednessCheck {
  bool ok = false;
  double max = 0.0;
  double median = 0.0;
  std::size_t samples = 0;
};

// max <= factor * median over the values (empty input fails).
BoundednessCheck bounded_by_median(std::vector<double> values, double factor = 2.0);

// Per branch over rows with n in [n_from, n_to]; ok requires both branches.
struct DecayCheck {
  BoundednessCheck branch1, branch2;
  bool ok() const { return branch1.ok && branch2.ok; }
};
DecayCheck check_decay(const std::vector<DecayRow>& rows, int n_from, int n_to,
                       double factor = 2.0);

struct LadderRow {
  double s = 0.0;
  double max_remainder = 0.0;  // max over the sample points of |computed - leading|
  int order = 0;
  double ratio = 0.0;          // max_remainder / s^order
};

// Remainder of the phi or psi leading term on one piece, for lambda = s^2
// at each s, with the solution computed by shooting.
std::vector<LadderRow> remainder_ladder(const ProblemSpec& spec, SolutionKind kind, Side side,
                                        int k, const std::vector<double>& s_values,
                                        const std::vector<double>& xs,
                                        const IntegratorOptions& opts = {}, unsigned threads = 1);

// |omega(s^2) - leading| / s^(m-1).
std::vector<LadderRow> charfun_remainder_ladder(const ProblemSpec& spec,
                                                const std::vector<double>& s_values,
                                                const IntegratorOptions& opts = {},
                                                unsigned threads = 1);

}  // namespace tsl
