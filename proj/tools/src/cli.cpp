#include "tsl_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsl/asymptotics.hpp"
#include "tsl/charfun.hpp"
#include "tsl/model.hpp"
#include "tsl/spectrum.hpp"
#include "tsl_cli/checks.hpp"

namespace tsl::cli {

namespace {

constexpr int kMaxCount = 2000;
constexpr double kPi = 3.14159265358979323846;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Global {
  std::string input;
  std::string output;
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  bool permissive = false;
  unsigned threads = 1;
};

struct SolveArgs {
  int count = 0;
  std::optional<double> lambda_min;
  bool skip_completeness = false;
};

struct CharfunArgs {
  double lambda_min = 0.0, lambda_max = 0.0, step = 0.0;
};

struct EigenArgs {
  int index = 0;
  int samples = 101;
};

struct AsymArgs {
  int n_min = 10, n_max = 30;
};

struct VerifyArgs {
  std::string level = "fast";
};

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidArgument:
      return kUsage;
    case ErrorCode::CompletenessMismatch:
      return kIncomplete;
    default:
      return kDomain;
  }
}

unsigned default_threads() {
  const char* env = std::getenv("TSL_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError(std::string("TSL_THREADS must be a positive integer, got '") + env + "'");
  return static_cast<unsigned>(v);
}

IntegratorOptions integrator(const Global& g) {
  IntegratorOptions o;
  o.rel_tol = g.rel_tol;
  o.abs_tol = g.abs_tol;
  return o;
}

// Tighter settings for root polishing and eigenfunctions.
IntegratorOptions polish(const Global& g) {
  IntegratorOptions o;
  o.rel_tol = std::max(1e-14, std::min(1e-13, g.rel_tol * 1e-2));
  o.abs_tol = std::max(1e-16, std::min(1e-15, g.abs_tol * 1e-2));
  return o;
}

SpectrumOptions spectrum_options(const Global& g) {
  SpectrumOptions o;
  o.integrator = integrator(g);
  o.polish = polish(g);
  o.refine_tol = std::max(1e-14, g.rel_tol * 1e-3);
  o.threads = g.threads;
  o.contour.threads = g.threads;
  return o;
}

ProblemSpec load_checked(const Global& g, std::ostream& err) {
  if (g.input.empty()) throw UsageError("--input is required");
  const ProblemSpec spec = load_problem(g.input);
  const ValidationReport report = validate(spec, !g.permissive);
  for (const Issue& w : report.warnings) err << "warning: " << to_string(w.code) << ": " << w.detail << "\n";
  if (!report.ok()) throw Error(report.errors.front().code, report.errors.front().detail);
  return spec;
}

// Seeds far enough up to label every eigenvalue up to lambda_top.
std::vector<AsymptoticSeed> seeds_up_to(const ProblemSpec& spec, double lambda_top) {
  const double len = std::max(spec.b - spec.c, spec.c - spec.a);
  const double s_top = std::sqrt(std::max(lambda_top, 0.0));
  const int n_top = static_cast<int>(std::ceil(s_top * len / kPi)) + 3;
  return asymptotic_seeds(spec, 0, n_top);
}

void label(const ProblemSpec& spec, std::vector<Eigenpair>& eigs) {
  if (eigs.empty() || leading_coefficient_vanishes(spec)) return;
  label_branches(eigs, seeds_up_to(spec, eigs.back().lambda));
}

std::string s_column(const Eigenpair& e) { return e.s_imaginary ? num(e.s) + "i" : num(e.s); }

int cmd_validate(const Global& g, std::ostream& out, std::ostream& err) {
  if (g.input.empty()) throw UsageError("--input is required");
  const ProblemSpec spec = load_problem(g.input);
  const ValidationReport report = validate(spec, !g.permissive);
  const DeterminantSet d = compute_determinants(spec);
  const DeterminantSet x = compute_determinants(spec, Orientation::SidesExchanged);

  out << "interval a=" << num(spec.a) << " c=" << num(spec.c) << " b=" << num(spec.b) << "\n";
  out << "determinant,stored,exchanged\n";
  out << "Delta0," << num(d.d0) << "," << num(x.d0) << "\n";
  const std::pair<const char*, double DeterminantSet::*> rows[] = {
      {"Delta12", &DeterminantSet::d12}, {"Delta13", &DeterminantSet::d13},
      {"Delta14", &DeterminantSet::d14}, {"Delta23", &DeterminantSet::d23},
      {"Delta24", &DeterminantSet::d24}, {"Delta34", &DeterminantSet::d34}};
  for (const auto& [name, field] : rows) out << name << "," << num(d.*field) << "," << num(x.*field) << "\n";
  out << "plucker," << num(d.plucker()) << "," << num(x.plucker()) << "\n";
  out << "case " << to_string(classify_case(spec)) << " (alpha11 " << (alpha11_vanishes(spec) ? "= 0" : "!= 0")
      << ", alpha21p " << (alpha21p_vanishes(spec) ? "= 0" : "!= 0") << ")\n";
  out << "leading coefficient Delta24 " << (leading_coefficient_vanishes(spec) ? "vanishes" : "nonzero") << "\n";
  for (const Issue& w : report.warnings) out << "warning: " << to_string(w.code) << ": " << w.detail << "\n";
  for (const Issue& e : report.errors) {
    out << "error: " << to_string(e.code) << ": " << e.detail << "\n";
    err << "error: " << to_string(e.code) << ": " << e.detail << "\n";
  }
  out << (report.ok() ? "valid" : "invalid") << (g.permissive ? " (permissive)" : "") << "\n";
  return report.ok() ? kOk : kDomain;
}

int cmd_solve(const Global& g, const SolveArgs& a, std::ostream& out, std::ostream& err) {
  if (a.count < 1) throw UsageError("--count must be >= 1");
  const ProblemSpec spec = load_checked(g, err);
  if (a.count > kMaxCount) throw Error(ErrorCode::InvalidArgument, "--count above " + std::to_string(kMaxCount));
  SpectrumOptions opts = spectrum_options(g);
  opts.with_eigenfunctions = false;
  opts.check_completeness = !a.skip_completeness;
  if (a.lambda_min) opts.lambda_min = *a.lambda_min;
  SpectrumResult r = compute_spectrum(spec, a.count, opts);
  label(spec, r.eigenpairs);

  out << "n,branch,lambda,s,residual,bracket_lo,bracket_hi" << (r.complete ? "" : ",flagged") << "\n";
  for (std::size_t i = 0; i < r.eigenpairs.size(); ++i) {
    const Eigenpair& e = r.eigenpairs[i];
    out << i + 1 << "," << (e.branch ? std::to_string(*e.branch) : "") << "," << num(e.lambda) << ","
        << s_column(e) << "," << num(e.residual) << "," << num(e.bracket_lo) << "," << num(e.bracket_hi)
        << (r.complete ? "" : ",incomplete") << "\n";
  }
  if (!r.complete) {
    err << "warning: CompletenessMismatch: " << r.note << "\n";
    return kIncomplete;
  }
  return kOk;
}

int cmd_charfun(const Global& g, const CharfunArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.step > 0.0)) throw UsageError("--step must be positive");
  if (!(a.lambda_max >= a.lambda_min)) throw UsageError("--lambda-max must not be below --lambda-min");
  const ProblemSpec spec = load_checked(g, err);
  const CharGrid grid = charfun_grid(spec, a.lambda_min, a.lambda_max, a.step, integrator(g), g.threads);
  out << "lambda,w\n";
  for (std::size_t i = 0; i < grid.lambdas.size(); ++i) out << num(grid.lambdas[i]) << "," << num(grid.values[i]) << "\n";
  return kOk;
}

// Least-squares multiple of the overlay that best matches y.
double fit_scale(const std::vector<double>& y, const std::vector<double>& o) {
  double yo = 0.0, oo = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    yo += y[i] * o[i];
    oo += o[i] * o[i];
  }
  return oo > 0.0 ? yo / oo : 0.0;
}

int cmd_eigenfunction(const Global& g, const EigenArgs& a, std::ostream& out, std::ostream& err) {
  if (a.index < 1) throw UsageError("--index must be >= 1");
  if (a.samples < 2) throw UsageError("--samples must be >= 2");
  const ProblemSpec spec = load_checked(g, err);
  if (a.index > kMaxCount)
    throw Error(ErrorCode::NotAnEigenvalue, "index " + std::to_string(a.index) + " is beyond the computable spectrum (" +
                                                std::to_string(kMaxCount) + " eigenvalues)");
  SpectrumOptions opts = spectrum_options(g);
  opts.with_eigenfunctions = false;
  SpectrumResult r = compute_spectrum(spec, a.index, opts);
  if (static_cast<int>(r.eigenpairs.size()) < a.index)
    throw Error(ErrorCode::NotAnEigenvalue, "index " + std::to_string(a.index) + " is beyond the computed spectrum");
  if (!r.complete) err << "warning: CompletenessMismatch: " << r.note << "\n";
  label(spec, r.eigenpairs);
  const Eigenpair& e = r.eigenpairs[a.index - 1];
  const auto eig = eigenfunction(spec, e.lambda, opts.polish);

  struct Row {
    double x;
    Side side;
    StateVector<double> state;
  };
  std::vector<Row> rows;
  for (Side side : {Side::Left, Side::Right}) {
    const double lo = side == Side::Left ? spec.a : spec.c;
    const double hi = side == Side::Left ? spec.c : spec.b;
    for (int i = 0; i < a.samples; ++i) {
      const double x = i + 1 == a.samples ? hi : lo + (hi - lo) * i / (a.samples - 1);
      rows.push_back({x, side, eig.at(x, side)});
    }
  }

  std::optional<AsymptoticSeed> seed;
  if (e.branch && e.n_index) {
    for (const AsymptoticSeed& s : seeds_up_to(spec, e.lambda))
      if (s.branch == *e.branch && s.n == *e.n_index) seed = s;
  }
  std::vector<double> ys, lead, literal;
  if (seed) {
    for (const Row& row : rows) {
      ys.push_back(row.state.y);
      lead.push_back(eigenfunction_leading(spec, *seed, row.x, row.side));
      literal.push_back(eigenfunction_leading(spec, *seed, row.x, row.side, EigenfunctionReading::Literal));
    }
  }
  const double k_lead = seed ? fit_scale(ys, lead) : 0.0;
  const double k_lit = seed ? fit_scale(ys, literal) : 0.0;

  out << "# lambda=" << num(e.lambda) << " index=" << a.index;
  if (seed) out << " branch=" << seed->branch << " n=" << seed->n;
  out << "\n";
  out << "x,side,y,yp" << (seed ? ",y_leading,y_leading_literal" : "") << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& row = rows[i];
    out << num(row.x) << "," << (row.side == Side::Left ? "left" : "right") << "," << num(row.state.y) << ","
        << num(row.state.yp);
    if (seed) out << "," << num(k_lead * lead[i]) << "," << num(k_lit * literal[i]);
    out << "\n";
  }
  return kOk;
}

int cmd_asymptotics(const Global& g, const AsymArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n_min > a.n_max) throw UsageError("--n-min must not exceed --n-max");
  if (a.n_min < 0) throw UsageError("--n-min must be >= 0");
  const ProblemSpec spec = load_checked(g, err);
  if (leading_coefficient_vanishes(spec))
    throw Error(ErrorCode::DegenerateLeadingCoefficient,
                "Delta24 = 0: the leading term of the characteristic function drops out, so the eigenvalue "
                "asymptotics are not available for this transmission matrix");
  DecayOptions opts;
  opts.spectrum = spectrum_options(g);
  opts.spectrum.check_completeness = false;
  opts.spectrum.with_eigenfunctions = false;
  const auto rows = decay_report(spec, a.n_min, a.n_max, opts);
  out << "n,branch,s_computed,s_pred,err,n_times_err\n";
  for (const DecayRow& r : rows)
    out << r.n << "," << r.branch << "," << num(r.s_computed) << "," << num(r.s_pred) << "," << num(r.err) << ","
        << num(r.n_times_err) << "\n";
  return kOk;
}

int cmd_verify(const Global& g, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const ProblemSpec spec = load_checked(g, err);
  CheckOptions co;
  co.integrator = integrator(g);
  co.reference = polish(g);
  co.threads = g.threads;
  const std::vector<double> probe{-7.3, 1.1, 4.7, 13.9, 42.5, 97.1};

  std::vector<CheckResult> results;
  auto run = [&](const char* name, auto&& fn) {
    try {
      results.push_back(fn());
    } catch (const Error& e) {
      results.push_back({name, false, NAN, 0.0, e.what()});
    }
  };
  run("wronskian-constancy", [&] { return check_wronskian_constancy(spec, probe, co); });
  run("proportionality", [&] { return check_proportionality(spec, probe, co); });
  run("integral-residuals", [&] { return check_integral_residuals(spec, {1.0, 10.0, 100.0}, co); });
  run("picard-agreement", [&] { return check_picard(spec, {-50.0, -10.0, -1.0, 1.0, 10.0, 50.0}, 1e-6, co); });
  run("transmission-round-trip", [&] { return check_round_trip(spec); });
  if (a.level == "full") {
    SpectrumOptions opts = spectrum_options(g);
    std::optional<SpectrumResult> spectrum;
    run("argument-principle-completeness", [&] {
      spectrum = compute_spectrum(spec, 10, opts);
      CheckResult r{"argument-principle-completeness", spectrum->complete,
                    spectrum->zero_count ? spectrum->zero_count->error : NAN, 0.25, spectrum->note};
      if (spectrum->zero_count) {
        std::ostringstream s;
        s << "count " << spectrum->zero_count->count << " vs " << spectrum->roots_in_range << " real roots on ["
          << num(spectrum->lambda_lo) << ", " << num(spectrum->lambda_hi) << "]";
        if (!spectrum->note.empty()) s << "; " << spectrum->note;
        r.detail = s.str();
      }
      return r;
    });
    if (spectrum) run("eigenpair-certificates", [&] { return check_eigenpairs(spec, spectrum->eigenpairs, 1e-8, 1e-6, co); });
  }

  bool all = true;
  for (const CheckResult& r : results) {
    all = all && r.ok;
    out << (r.ok ? "PASS " : "FAIL ") << r.name << " value=" << num(r.value) << " limit=" << num(r.limit);
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << "\n";
  }
  out << (all ? "all checks passed" : "verification failed") << "\n";
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discontinuous Sturm-Liouville problems with transmission conditions", "tsl"};
  app.fallthrough();
  app.require_subcommand(1);

  Global g;
  std::optional<unsigned> threads;
  app.add_option("--input,-i", g.input, "Problem file (JSON)");
  app.add_option("--output,-o", g.output, "Write data here instead of stdout");
  app.add_option("--rel-tol", g.rel_tol, "Integrator relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--abs-tol", g.abs_tol, "Integrator absolute tolerance")->check(CLI::PositiveNumber);
  app.add_flag("--permissive", g.permissive, "Report positivity conditions as warnings");
  app.add_option("--threads", threads, "Worker threads (default: TSL_THREADS or 1)")->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "Check a problem file and print its determinants and case");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Lowest eigenvalues");
  solve_cmd->add_option("--count,-n", solve.count, "Number of eigenvalues")->required();
  solve_cmd->add_option("--lambda-min", solve.lambda_min, "Lower end of the scan");
  solve_cmd->add_flag("--skip-completeness", solve.skip_completeness, "Do not run the argument-principle count");

  CharfunArgs cf;
  auto* charfun_cmd = app.add_subcommand("charfun", "Sample the characteristic function");
  charfun_cmd->add_option("--lambda-min", cf.lambda_min)->required();
  charfun_cmd->add_option("--lambda-max", cf.lambda_max)->required();
  charfun_cmd->add_option("--step", cf.step)->required();

  EigenArgs ef;
  auto* eig_cmd = app.add_subcommand("eigenfunction", "Sample one eigenfunction");
  eig_cmd->add_option("--index,-k", ef.index, "1-based index in ascending order")->required();
  eig_cmd->add_option("--samples", ef.samples, "Samples per piece, endpoints included");

  AsymArgs as;
  auto* asym_cmd = app.add_subcommand("asymptotics", "Compare eigenvalues with their asymptotic predictions");
  asym_cmd->add_option("--n-min", as.n_min);
  asym_cmd->add_option("--n-max", as.n_max);

  VerifyArgs vf;
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant checks on a problem");
  verify_cmd->add_option("--level", vf.level)->check(CLI::IsMember({"fast", "full"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    g.threads = threads ? *threads : default_threads();

    std::ofstream file;
    if (!g.output.empty()) {
      file.open(g.output);
      if (!file) throw UsageError("cannot open output file '" + g.output + "'");
    }
    std::ostream& sink = g.output.empty() ? out : file;

    if (*validate_cmd) return cmd_validate(g, sink, err);
    if (*solve_cmd) return cmd_solve(g, solve, sink, err);
    if (*charfun_cmd) return cmd_charfun(g, cf, sink, err);
    if (*eig_cmd) return cmd_eigenfunction(g, ef, sink, err);
    if (*asym_cmd) return cmd_asymptotics(g, as, sink, err);
    if (*verify_cmd) return cmd_verify(g, vf, sink, err);
    return kUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDomain;
  }
}

}  // namespace tsl::cli
