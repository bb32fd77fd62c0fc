#include "tsl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <numbers>
#include <sstream>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "tsl/parallel.hpp"

namespace tsl {

namespace {

constexpr double kPi = std::numbers::pi;

// (offset of branch 1, offset of branch 2) in s = (n + offset) pi / length.
std::pair<double, double> seed_offsets(CaseTag tag) {
  switch (tag) {
    case CaseTag::I:
      return {-2.0, 0.0};
    case CaseTag::II:
      return {-1.0, 0.5};
    case CaseTag::III:
      return {0.5, -1.0};
    case CaseTag::IV:
      return {-0.5, 0.5};
  }
  return {0.0, 0.0};
}

double state_norm(const Trace<double>& t) {
  double m = 0.0;
  for (const auto& s : t.states) m = std::max({m, std::abs(s.y), std::abs(s.yp)});
  return m;
}

}  // namespace

bool leading_coefficient_vanishes(const ProblemSpec& spec, double zero_tol) {
  const DeterminantSet d = compute_determinants(spec, Orientation::SidesExchanged);
  const double scale =
      std::max({std::abs(d.d12), std::abs(d.d13), std::abs(d.d14), std::abs(d.d23),
                std::abs(d.d24), std::abs(d.d34)});
  return std::abs(d.d24) <= zero_tol * scale;
}

std::vector<AsymptoticSeed> asymptotic_seeds(const ProblemSpec& spec, int n_min, int n_max,
                                             double zero_tol) {
  if (n_min > n_max) throw Error(ErrorCode::InvalidArgument, "n_min must not exceed n_max");
  if (leading_coefficient_vanishes(spec, zero_tol))
    throw Error(ErrorCode::DegenerateLeadingCoefficient,
                "d24 = 0: the leading terms of omega vanish and no seeds exist");
  const CaseTag tag = classify_case(spec, zero_tol);
  const auto [o1, o2] = seed_offsets(tag);
  const double len1 = spec.b - spec.c, len2 = spec.c - spec.a;
  std::vector<AsymptoticSeed> seeds;
  for (int n = n_min; n <= n_max; ++n) {
    const double s1 = (n + o1) * kPi / len1;
    const double s2 = (n + o2) * kPi / len2;
    if (s1 > 0.0) seeds.push_back({s1, 1, n, tag});
    if (s2 > 0.0) seeds.push_back({s2, 2, n, tag});
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const AsymptoticSeed& x, const AsymptoticSeed& y) {
    return x.s_pred < y.s_pred;
  });
  return seeds;
}

std::vector<Bracket> brackets_from_samples(const std::vector<double>& lambdas,
                                           const std::vector<double>& values) {
  std::vector<Bracket> out;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (values[i] == 0.0) {
      out.push_back({lambdas[i], lambdas[i], 0.0, 0.0});
      continue;
    }
    if (i + 1 < lambdas.size() && values[i + 1] != 0.0 &&
        std::signbit(values[i]) != std::signbit(values[i + 1]))
      out.push_back({lambdas[i], lambdas[i + 1], values[i], values[i + 1]});
  }
  return out;
}

std::vector<Bracket> scan_brackets(const ProblemSpec& spec, double lambda_min, double lambda_max,
                                   double step, const IntegratorOptions& opts, unsigned threads) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "scan step must be positive");
  const CharGrid grid = charfun_grid(spec, lambda_min, lambda_max, step, opts, threads);
  return brackets_from_samples(grid.lambdas, grid.values);
}

Eigenpair refine(const ProblemSpec& spec, const Bracket& bracket, double refine_tol,
                 const IntegratorOptions& opts) {
  if (!(refine_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "refine_tol must be positive");
  if (bracket.lo > bracket.hi) throw Error(ErrorCode::InvalidArgument, "bracket is reversed");

  IntegratorOptions local = opts;
  auto f = [&](double x) { return charfun<double>(spec, x, local); };

  Eigenpair out;
  out.bracket_lo = bracket.lo;
  out.bracket_hi = bracket.hi;
  double root = bracket.lo;
  if (bracket.lo != bracket.hi) {
    double flo = f(bracket.lo), fhi = f(bracket.hi);
    if (flo != 0.0 && fhi != 0.0 && std::signbit(flo) == std::signbit(fhi)) {
      local.rel_tol = std::max(1e-14, opts.rel_tol * 1e-2);
      local.abs_tol = std::max(1e-16, opts.abs_tol * 1e-2);
      flo = f(bracket.lo);
      fhi = f(bracket.hi);
      if (flo != 0.0 && fhi != 0.0 && std::signbit(flo) == std::signbit(fhi)) {
        // A scan sample that lands on a root can carry either sign.
        const auto newton_step = [&](double x, double fx) {
          const double h = std::max(1e-6, 1e-8 * std::abs(x));
          return std::abs(fx * 2.0 * h / (f(x + h) - f(x - h))) / std::max(1.0, std::abs(x));
        };
        const double step_lo = newton_step(bracket.lo, flo), step_hi = newton_step(bracket.hi, fhi);
        const double accept = std::max(refine_tol, 1e-10);
        if (std::min(step_lo, step_hi) <= accept) {
          if (step_lo <= step_hi) {
            flo = 0.0;
          } else {
            fhi = 0.0;
          }
        }
      }
      if (flo != 0.0 && fhi != 0.0 && std::signbit(flo) == std::signbit(fhi)) {
        std::ostringstream msg;
        msg << "no sign change of omega on [" << bracket.lo << ", " << bracket.hi << "]";
        throw Error(ErrorCode::LostBracket, msg.str());
      }
    }
    if (flo == 0.0) {
      root = bracket.lo;
    } else if (fhi == 0.0) {
      root = bracket.hi;
    } else {
      auto done = [&](double x, double y) {
        return std::abs(y - x) <= refine_tol * std::max({1.0, std::abs(x), std::abs(y)});
      };
      std::uintmax_t iters = 200;
      const auto [x0, x1] =
          boost::math::tools::toms748_solve(f, bracket.lo, bracket.hi, flo, fhi, done, iters);
      root = 0.5 * (x0 + x1);
    }
  }
  out.lambda = root;
  out.s = std::sqrt(std::abs(root));
  out.s_imaginary = root < 0.0;
  const double w = f(root);
  const double h = std::max(1e-6, 1e-8 * std::abs(root));
  const double dw = (f(root + h) - f(root - h)) / (2.0 * h);
  out.residual = w == 0.0 ? 0.0 : std::abs(w / dw) / std::max(1.0, std::abs(root));
  return out;
}

double proportionality_defect(const ProblemSpec& spec, double lambda,
                              const IntegratorOptions& opts) {
  const PiecewiseSolution<double> f = phi(spec, lambda, opts);
  const PiecewiseSolution<double> p = psi(spec, lambda, opts);
  const double nf = std::max(state_norm(f.left), state_norm(f.right));
  const double np = std::max(state_norm(p.left), state_norm(p.right));
  const auto w = [](const StateVector<double>& u, const StateVector<double>& v) {
    return u.y * v.yp - u.yp * v.y;
  };
  const double w1 = w(f.at_a(), p.at_a());
  const double w2 = w(f.at_b(), p.at_b());
  return std::max(std::abs(w1), std::abs(w2)) / (nf * np);
}

PiecewiseSolution<double> eigenfunction(const ProblemSpec& spec, double lambda,
                                        const IntegratorOptions& opts) {
  const double defect = proportionality_defect(spec, lambda, opts);
  if (!(defect < 1e-6)) {
    std::ostringstream msg;
    msg << "phi and psi are not proportional at lambda=" << lambda << " (defect " << defect
        << ")";
    throw Error(ErrorCode::NotAnEigenvalue, msg.str());
  }
  PiecewiseSolution<double> sol = phi(spec, lambda, opts);
  double peak = 0.0;
  for (const Trace<double>* t : {&sol.left, &sol.right})
    for (const auto& s : t->states)
      if (std::abs(s.y) > std::abs(peak)) peak = s.y;
  const double scale = 1.0 / peak;
  for (Trace<double>* t : {&sol.left, &sol.right}) {
    for (auto& s : t->states) {
      s.y *= scale;
      s.yp *= scale;
    }
    for (auto& s : t->slopes) {
      s.y *= scale;
      s.yp *= scale;
    }
  }
  return sol;
}

namespace {

class SpectrumSolver {
 public:
  SpectrumSolver(const ProblemSpec& spec, const SpectrumOptions& opts) : spec_(spec), opts_(opts) {
    len_max_ = std::max(spec.b - spec.c, spec.c - spec.a);
    ds_ = opts.s_step > 0.0 ? opts.s_step : kPi / (8.0 * len_max_);
    lambda_min_ = std::isnan(opts.lambda_min) ? -(sup_abs_q(spec) + 10.0) : opts.lambda_min;
    seeded_ = !leading_coefficient_vanishes(spec);
  }

  SpectrumResult run(int count) {
    if (count < 1) throw Error(ErrorCode::InvalidArgument, "eigenvalue count must be >= 1");
    // Enough s-range for count + 1 roots: roughly s (b - a) / pi of them below s.
    double s_hi = (count + 4) * kPi / (spec_.b - spec_.a) + 4.0 * ds_;
    scan_to(s_hi);
    SpectrumResult result;
    for (int pass = 0;; ++pass) {
      std::vector<Eigenpair> roots = refine_all();
      while (static_cast<int>(roots.size()) < count + 1) {
        s_hi *= 1.5;
        scan_to(s_hi);
        roots = refine_all();
      }
      roots.resize(static_cast<std::size_t>(count) + 1);
      const double upper = 0.5 * (roots[count - 1].lambda + roots[count].lambda);
      roots.resize(static_cast<std::size_t>(count));
      result.lambda_lo = lambda_min_;
      result.lambda_hi = upper;
      result.roots_in_range = count;
      result.eigenpairs = std::move(roots);
      if (!opts_.check_completeness) break;

      // One rectangle per found root, split at midpoints.
      std::vector<double> breaks{lambda_min_};
      for (int i = 0; i + 1 < count; ++i)
        breaks.push_back(0.5 * (result.eigenpairs[i].lambda + result.eigenpairs[i + 1].lambda));
      breaks.push_back(upper);
      std::vector<int> per_part(breaks.size() - 1, 0);
      ZeroCount total;
      total.re_lo = breaks.front();
      total.re_hi = breaks.back();
      total.im_half_width = opts_.im_half_width;
      std::ostringstream note;
      try {
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
          const ZeroCount part =
              count_zeros_partitioned(spec_, {breaks[i], breaks[i + 1]}, opts_.im_half_width,
                                      contour_options());
          per_part[i] = part.count;
          total.count += part.count;
          total.winding += part.winding;
          total.error = std::max(total.error, part.error);
          total.points += part.points;
        }
      } catch (const Error& e) {
        result.complete = false;
        result.zero_count.reset();
        result.note = e.what();
        break;
      }
      result.zero_count = total;
      std::vector<std::size_t> missing;
      for (std::size_t i = 0; i < per_part.size(); ++i)
        if (per_part[i] != 1) missing.push_back(i);
      if (missing.empty()) {
        result.complete = true;
        result.note.clear();
        break;
      }
      note << "argument-principle count " << total.count << " vs " << count
           << " real roots on [" << breaks.front() << ", " << breaks.back() << "]";
      result.complete = false;
      result.note = note.str();
      if (pass >= opts_.max_scan_refinements) break;
      for (std::size_t i : missing)
        if (per_part[i] > 1) densify(breaks[i], breaks[i + 1]);
      if (std::none_of(missing.begin(), missing.end(), [&](std::size_t i) { return per_part[i] > 1; }))
        break;
    }

    if (opts_.with_eigenfunctions) {
      auto& eigs = result.eigenpairs;
      parallel_for(eigs.size(), opts_.threads, [&](std::size_t i) {
        eigs[i].eigenfunction = eigenfunction(spec_, eigs[i].lambda, opts_.polish);
      });
    }
    return result;
  }

 private:
  ContourOptions contour_options() const {
    ContourOptions c = opts_.contour;
    c.integrator = opts_.integrator;
    // The winding number needs omega'/omega to a few digits only.
    c.integrator.rel_tol = std::max(c.integrator.rel_tol, 1e-10);
    c.integrator.abs_tol = std::max(c.integrator.abs_tol, 1e-12);
    c.threads = opts_.threads;
    return c;
  }

  // Sample omega at every lambda not yet cached.
  void sample(std::vector<double> lambdas) {
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    std::vector<double> fresh;
    for (double l : lambdas)
      if (!samples_.count(l)) fresh.push_back(l);
    std::vector<double> values(fresh.size());
    parallel_for(fresh.size(), opts_.threads, [&](std::size_t i) {
      values[i] = charfun<double>(spec_, fresh[i], opts_.integrator);
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) samples_[fresh[i]] = values[i];
  }

  // Uniform in lambda up to lambda = 1, then uniform in s; seed-guided
  // samples are merged in.
  void scan_to(double s_hi) {
    std::vector<double> grid;
    const double s_switch = 1.0;
    if (scanned_s_ < 0.0) {
      const double dl = 2.0 * ds_ * s_switch;
      const int m = static_cast<int>(std::ceil((s_switch * s_switch - lambda_min_) / dl));
      for (int i = 0; i <= m; ++i) grid.push_back(lambda_min_ + (s_switch * s_switch - lambda_min_) * i / m);
      scanned_s_ = s_switch;
    }
    const double s_lo = scanned_s_;
    const int m = static_cast<int>(std::ceil((s_hi - s_lo) / ds_));
    for (int i = 1; i <= m; ++i) {
      const double s = s_lo + (s_hi - s_lo) * i / m;
      grid.push_back(s * s);
    }
    if (seeded_) {
      const int n_top = static_cast<int>(std::ceil(s_hi * len_max_ / kPi)) + 3;
      for (const AsymptoticSeed& seed : asymptotic_seeds(spec_, 0, n_top)) {
        if (seed.s_pred <= s_lo || seed.s_pred > s_hi) continue;
        for (double off : {-0.25, 0.0, 0.25}) {
          const double s = seed.s_pred + off * ds_;
          if (s > s_lo && s <= s_hi) grid.push_back(s * s);
        }
      }
    }
    scanned_s_ = s_hi;
    sample(std::move(grid));
  }

  void densify(double lo, double hi) {
    auto it = samples_.lower_bound(lo);
    std::vector<double> grid;
    double prev = it == samples_.begin() ? lo : std::prev(it)->first;
    for (; it != samples_.end() && prev < hi; ++it) {
      const double next = it->first;
      for (int j = 1; j < 8; ++j) grid.push_back(prev + (next - prev) * j / 8.0);
      prev = next;
    }
    sample(std::move(grid));
  }

  // A pair of close roots between two samples leaves no sign change but a
  // same-sign local minimum of |omega| among three consecutive samples.
  // Minimize |omega| there and keep the minimizer as a sample; if omega
  // changes sign the pair then shows up as two brackets.
  void split_dips() {
    std::vector<std::pair<double, double>> windows;
    auto prev = samples_.begin();
    if (prev == samples_.end()) return;
    for (auto mid = std::next(prev); mid != samples_.end() && std::next(mid) != samples_.end();
         prev = mid++) {
      const auto next = std::next(mid);
      const double w0 = prev->second, w1 = mid->second, w2 = next->second;
      if (w1 == 0.0 || std::signbit(w0) != std::signbit(w1) || std::signbit(w1) != std::signbit(w2))
        continue;
      if (!(std::abs(w1) < std::abs(w0) && std::abs(w1) < std::abs(w2))) continue;
      if (!probed_.insert(mid->first).second) continue;
      windows.push_back({prev->first, next->first});
    }
    std::vector<std::pair<double, double>> found(windows.size());
    parallel_for(windows.size(), opts_.threads, [&](std::size_t i) {
      const double sign = std::signbit(samples_.at(windows[i].first)) ? -1.0 : 1.0;
      auto g = [&](double l) { return sign * charfun<double>(spec_, l, opts_.integrator); };
      std::uintmax_t iters = 60;
      const auto [l, v] =
          boost::math::tools::brent_find_minima(g, windows[i].first, windows[i].second, 40, iters);
      found[i] = {l, sign * v};
    });
    for (const auto& [l, w] : found) {
      samples_.emplace(l, w);
      probed_.insert(l);
    }
  }

  std::vector<Eigenpair> refine_all() {
    split_dips();
    std::vector<double> ls, ws;
    for (const auto& [l, w] : samples_) {
      ls.push_back(l);
      ws.push_back(w);
    }
    const std::vector<Bracket> brackets = brackets_from_samples(ls, ws);
    std::vector<Eigenpair> roots(brackets.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < brackets.size(); ++i) {
      const auto key = std::make_pair(brackets[i].lo, brackets[i].hi);
      auto hit = refined_.find(key);
      if (hit != refined_.end())
        roots[i] = hit->second;
      else
        todo.push_back(i);
    }
    parallel_for(todo.size(), opts_.threads, [&](std::size_t k) {
      roots[todo[k]] = refine(spec_, brackets[todo[k]], opts_.refine_tol, opts_.polish);
    });
    for (std::size_t i : todo) refined_[{brackets[i].lo, brackets[i].hi}] = roots[i];

    std::vector<Eigenpair> unique;
    for (const Eigenpair& e : roots) {
      if (!unique.empty() &&
          std::abs(e.lambda - unique.back().lambda) <=
              opts_.refine_tol * std::max(1.0, std::abs(e.lambda)))
        continue;
      unique.push_back(e);
    }
    return unique;
  }

  const ProblemSpec& spec_;
  SpectrumOptions opts_;
  double len_max_ = 1.0;
  double ds_ = 0.1;
  double lambda_min_ = -10.0;
  double scanned_s_ = -1.0;
  bool seeded_ = false;
  std::map<double, double> samples_;
  std::set<double> probed_;
  std::map<std::pair<double, double>, Eigenpair> refined_;
};

}  // namespace

SpectrumResult compute_spectrum(const ProblemSpec& spec, int count, const SpectrumOptions& opts) {
  return SpectrumSolver(spec, opts).run(count);
}

std::vector<Eigenpair> eigenvalues(const ProblemSpec& spec, int count,
                                   const SpectrumOptions& opts) {
  SpectrumResult r = compute_spectrum(spec, count, opts);
  if (!r.complete) throw Error(ErrorCode::CompletenessMismatch, r.note);
  return std::move(r.eigenpairs);
}

void label_branches(std::vector<Eigenpair>& eigs, const std::vector<AsymptoticSeed>& seeds,
                    double window) {
  for (Eigenpair& e : eigs) {
    e.branch.reset();
    e.n_index.reset();
  }
  // Per-seed window: half the spacing to the neighbouring seed of the same branch.
  std::vector<double> win(seeds.size(), window);
  if (window <= 0.0) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      double gap = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < seeds.size(); ++j)
        if (j != i && seeds[j].branch == seeds[i].branch)
          gap = std::min(gap, std::abs(seeds[j].s_pred - seeds[i].s_pred));
      win[i] = 0.5 * gap;
    }
  }
  struct Candidate {
    double dist;
    int branch;
    std::size_t eig, seed;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < eigs.size(); ++i) {
    if (eigs[i].s_imaginary) continue;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      const double d = std::abs(eigs[i].s - seeds[j].s_pred);
      if (d <= win[j]) cands.push_back({d, seeds[j].branch, i, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    return x.branch < y.branch;
  });
  std::vector<bool> eig_used(eigs.size(), false), seed_used(seeds.size(), false);
  for (const Candidate& c : cands) {
    if (eig_used[c.eig] || seed_used[c.seed]) continue;
    eig_used[c.eig] = seed_used[c.seed] = true;
    eigs[c.eig].branch = seeds[c.seed].branch;
    eigs[c.eig].n_index = seeds[c.seed].n;
  }
}

}  // namespace tsl
