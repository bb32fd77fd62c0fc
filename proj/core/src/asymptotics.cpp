#include "tsl/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tsl/charfun.hpp"
#include "tsl/parallel.hpp"
#include "tsl/quadrature.hpp"

namespace tsl {

namespace {

constexpr double kPi = std::numbers::pi;

Side resolve_side(const ProblemSpec& spec, double x, Side side) {
  if (side != Side::Auto) return side;
  if (x == spec.c)
    throw Error(ErrorCode::AtTransmissionPointWithoutSide, "leading term at x = c needs a side");
  return x < spec.c ? Side::Left : Side::Right;
}

void check_k(int k) {
  if (k != 0 && k != 1) throw Error(ErrorCode::InvalidArgument, "derivative order must be 0 or 1");
}

double positive_root(double lambda) {
  if (!(lambda > 0.0))
    throw Error(ErrorCode::InvalidArgument, "leading terms need lambda > 0 (real s)");
  return std::sqrt(lambda);
}

// phi leading term at s; s_inner replaces s in the sin/cos s(c-a) factor.
double phi_leading_at(const ProblemSpec& spec, double s, double s_inner, double x, int k,
                      Side side) {
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  const double ratio = d.d24 / d.d12;
  const bool a11 = !alpha11_vanishes(spec);
  if (side == Side::Left) {
    const double u = s * (x - spec.a);
    if (a11) return k == 0 ? spec.alpha11 * std::cos(u) : -spec.alpha11 * s * std::sin(u);
    return k == 0 ? -spec.alpha10 * std::sin(u) / s : -spec.alpha10 * std::cos(u);
  }
  const double v = s * (x - spec.c);
  const double amp = a11 ? -ratio * spec.alpha11 * s * std::sin(s_inner * (spec.c - spec.a))
                         : -ratio * spec.alpha10 * std::cos(s_inner * (spec.c - spec.a));
  return k == 0 ? amp * std::cos(v) : -amp * s * std::sin(v);
}

}  // namespace

double phi_leading(const ProblemSpec& spec, double lambda, double x, int k, Side side) {
  check_k(k);
  const double s = positive_root(lambda);
  return phi_leading_at(spec, s, s, x, k, resolve_side(spec, x, side));
}

double psi_leading(const ProblemSpec& spec, double lambda, double x, int k, Side side) {
  check_k(k);
  const double s = positive_root(lambda);
  side = resolve_side(spec, x, side);
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  const double ratio = d.d24 / d.d34;
  const bool a21p = !alpha21p_vanishes(spec);
  if (side == Side::Right) {
    const double u = s * (spec.b - x);
    if (a21p)
      return k == 0 ? spec.alpha21p * s * s * std::cos(u) : spec.alpha21p * s * s * s * std::sin(u);
    return k == 0 ? -spec.alpha20p * s * std::sin(u) : spec.alpha20p * s * s * std::cos(u);
  }
  const double v = s * (x - spec.c);
  const double lb = s * (spec.b - spec.c);
  const double amp = a21p ? -ratio * spec.alpha21p * s * s * s * std::sin(lb)
                          : -ratio * spec.alpha20p * s * s * std::cos(lb);
  return k == 0 ? amp * std::cos(v) : -amp * s * std::sin(v);
}

int remainder_order(const ProblemSpec& spec, SolutionKind kind, Side side, int k) {
  check_k(k);
  if (side == Side::Auto) throw Error(ErrorCode::InvalidArgument, "remainder order needs a side");
  if (kind == SolutionKind::Phi) {
    const int base = alpha11_vanishes(spec) ? -2 : -1;
    return k + base + (side == Side::Right ? 1 : 0);
  }
  const int base = alpha21p_vanishes(spec) ? 0 : 1;
  return k + base + (side == Side::Left ? 1 : 0);
}

int charfun_leading_power(CaseTag tag) {
  switch (tag) {
    case CaseTag::I:
      return 4;
    case CaseTag::II:
    case CaseTag::III:
      return 3;
    case CaseTag::IV:
      return 2;
  }
  return 0;
}

double charfun_leading(const ProblemSpec& spec, double lambda) {
  const double s = positive_root(lambda);
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  const double p = s * (spec.b - spec.c), m = s * (spec.a - spec.c);
  switch (classify_case(spec)) {
    case CaseTag::I:
      return d.d24 * spec.alpha11 * spec.alpha21p * std::pow(s, 4) * std::sin(p) * std::sin(m);
    case CaseTag::II:
      return -d.d24 * spec.alpha10 * spec.alpha21p * std::pow(s, 3) * std::sin(p) * std::cos(m);
    case CaseTag::III:
      return d.d24 * spec.alpha11 * spec.alpha20p * std::pow(s, 3) * std::cos(p) * std::sin(m);
    case CaseTag::IV:
      return -d.d24 * spec.alpha10 * spec.alpha20p * s * s * std::cos(p) * std::cos(m);
  }
  return 0.0;
}

double literal_seed_s(const ProblemSpec& spec, int branch, int n) {
  double o1 = 0.0, o2 = 0.0;
  switch (classify_case(spec)) {
    case CaseTag::I:
      o1 = -2.0, o2 = 0.0;
      break;
    case CaseTag::II:
      o1 = 0.5, o2 = -1.0;
      break;
    case CaseTag::III:
      o1 = -1.0, o2 = 0.5;
      break;
    case CaseTag::IV:
      o1 = -0.5, o2 = 0.5;
      break;
  }
  return branch == 1 ? (n + o1) * kPi / (spec.b - spec.c) : (n + o2) * kPi / (spec.c - spec.a);
}

double eigenfunction_leading(const ProblemSpec& spec, const AsymptoticSeed& seed, double x,
                             Side side, EigenfunctionReading reading) {
  side = resolve_side(spec, x, side);
  if (reading == EigenfunctionReading::SeedConsistent)
    return phi_leading_at(spec, seed.s_pred, seed.s_pred, x, 0, side);
  const double s = literal_seed_s(spec, seed.branch, seed.n);
  double s_inner = s;
  if (classify_case(spec) == CaseTag::I && seed.branch == 1)
    s_inner = (seed.n - 1) * kPi / (spec.b - spec.c);
  return phi_leading_at(spec, s, s_inner, x, 0, side);
}

double eigenfunction_overlap(const ProblemSpec& spec, const PiecewiseSolution<double>& eig,
                             const AsymptoticSeed& seed, EigenfunctionReading reading) {
  const GaussRule rule = gauss_legendre(8);
  const int panels = 32;
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (Side side : {Side::Left, Side::Right}) {
    const double lo = side == Side::Left ? spec.a : spec.c;
    const double hi = side == Side::Left ? spec.c : spec.b;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double x = lo + h * (p + 0.5 * (rule.nodes[i] + 1.0));
        const double w = 0.5 * h * rule.weights[i];
        const double u = eig.at(x, side).y;
        const double v = eigenfunction_leading(spec, seed, x, side, reading);
        uv += w * u * v;
        uu += w * u * u;
        vv += w * v * v;
      }
    }
  }
  if (uu == 0.0 || vv == 0.0) return 0.0;
  return std::abs(uv) / std::sqrt(uu * vv);
}

DecayRow make_decay_row(const AsymptoticSeed& seed, double s_computed) {
  DecayRow row;
  row.n = seed.n;
  row.branch = seed.branch;
  row.s_computed = s_computed;
  row.s_pred = seed.s_pred;
  row.err = std::abs(s_computed - seed.s_pred);
  row.n_times_err = seed.n * row.err;
  return row;
}

std::vector<DecayRow> decay_report(const ProblemSpec& spec, int n_min, int n_max,
                                   const DecayOptions& opts) {
  if (n_min > n_max) throw Error(ErrorCode::InvalidArgument, "n_min must not exceed n_max");
  const std::vector<AsymptoticSeed> wanted = asymptotic_seeds(spec, n_max, n_max);
  double s_top = 0.0;
  for (const AsymptoticSeed& s : wanted) s_top = std::max(s_top, s.s_pred);
  // Roots below s number about s (b - a) / pi; take a margin past the last seed.
  const double s_cover = s_top + 2.0 * kPi / std::min(spec.b - spec.c, spec.c - spec.a);
  const int count = static_cast<int>(std::ceil(s_cover * (spec.b - spec.a) / kPi)) + 8;
  SpectrumResult spectrum = compute_spectrum(spec, count, opts.spectrum);

  const double len_max = std::max(spec.b - spec.c, spec.c - spec.a);
  const double s_last = spectrum.eigenpairs.back().s;
  const int n_top = static_cast<int>(std::ceil(s_last * len_max / kPi)) + 3;
  const std::vector<AsymptoticSeed> seeds = asymptotic_seeds(spec, 0, n_top);
  label_branches(spectrum.eigenpairs, seeds);

  std::vector<DecayRow> rows;
  for (const Eigenpair& e : spectrum.eigenpairs) {
    if (!e.branch || *e.n_index < n_min || *e.n_index > n_max) continue;
    for (const AsymptoticSeed& s : seeds)
      if (s.branch == *e.branch && s.n == *e.n_index) rows.push_back(make_decay_row(s, e.s));
  }
  std::sort(rows.begin(), rows.end(), [](const DecayRow& x, const DecayRow& y) {
    return x.branch != y.branch ? x.branch < y.branch : x.n < y.n;
  });
  return rows;
}

BoundednessCheck bounded_by_median(std::vector<double> values, double factor) {
  BoundednessCheck out;
  out.samples = values.size();
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  out.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  out.max = values.back();
  out.ok = std::isfinite(out.max) && out.max <= factor * out.median;
  return out;
}

DecayCheck check_decay(const std::vector<DecayRow>& rows, int n_from, int n_to, double factor) {
  std::vector<double> v1, v2;
  for (const DecayRow& r : rows) {
    if (r.n < n_from || r.n > n_to) continue;
    (r.branch == 1 ? v1 : v2).push_back(r.n_times_err);
  }
  return {bounded_by_median(std::move(v1), factor), bounded_by_median(std::move(v2), factor)};
}

std::vector<LadderRow> remainder_ladder(const ProblemSpec& spec, SolutionKind kind, Side side,
                                        int k, const std::vector<double>& s_values,
                                        const std::vector<double>& xs,
                                        const IntegratorOptions& opts, unsigned threads) {
  check_k(k);
  if (side == Side::Auto) throw Error(ErrorCode::InvalidArgument, "ladder needs a side");
  for (double x : xs) {
    const bool inside = side == Side::Left ? (x >= spec.a && x < spec.c) : (x > spec.c && x <= spec.b);
    if (!inside) {
      std::ostringstream msg;
      msg << "sample x=" << x << " is not in the requested piece";
      throw Error(ErrorCode::PieceMismatch, msg.str());
    }
  }
  const int order = remainder_order(spec, kind, side, k);
  std::vector<LadderRow> rows(s_values.size());
  parallel_for(s_values.size(), threads, [&](std::size_t i) {
    const double s = s_values[i];
    const double lambda = s * s;
    IntegratorOptions local = opts;
    local.dense_output_points.insert(local.dense_output_points.end(), xs.begin(), xs.end());
    const PiecewiseSolution<double> sol =
        kind == SolutionKind::Phi ? phi(spec, lambda, local) : psi(spec, lambda, local);
    double worst = 0.0;
    for (double x : xs) {
      const StateVector<double> st = sol.at(x, side);
      const double computed = k == 0 ? st.y : st.yp;
      const double lead = kind == SolutionKind::Phi ? phi_leading(spec, lambda, x, k, side)
                                                    : psi_leading(spec, lambda, x, k, side);
      worst = std::max(worst, std::abs(computed - lead));
    }
    rows[i] = {s, worst, order, worst / std::pow(s, order)};
  });
  return rows;
}

std::vector<LadderRow> charfun_remainder_ladder(const ProblemSpec& spec,
                                                const std::vector<double>& s_values,
                                                const IntegratorOptions& opts, unsigned threads) {
  const int order = charfun_leading_power(classify_case(spec)) - 1;
  std::vector<LadderRow> rows(s_values.size());
  parallel_for(s_values.size(), threads, [&](std::size_t i) {
    const double s = s_values[i];
    const double diff = std::abs(charfun<double>(spec, s * s, opts) - charfun_leading(spec, s * s));
    rows[i] = {s, diff, order, diff / std::pow(s, order)};
  });
  return rows;
}

}  // namespace tsl
