#include "qho/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "qho/closed_form.hpp"
#include "qho/dynamics.hpp"
#include "qho/integrate.hpp"
#include "qho/invariants.hpp"
#include "qho/profile.hpp"
#include "qho/verify.hpp"

namespace qho::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfDomain:
    case ErrorCode::DomainEscape:
    case ErrorCode::StepUnderflow:
    case ErrorCode::PolarOrigin:
    case ErrorCode::TangentPole: return kDomainError;
    case ErrorCode::NonPositiveM:
    case ErrorCode::NotUnboundedRegime:
    case ErrorCode::NotBorderRegime:
    case ErrorCode::InconsistentConstants:
    case ErrorCode::NegativeEnergy:
    case ErrorCode::Aperiodic: return kConstraintViolation;
    default: return kUsage;
  }
}

namespace {

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

// Opens `path` unless it is "-", in which case `fallback` is used.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::ostream& report_fallback(const std::string& out_path, Streams s) {
  return out_path == "-" ? s.err : s.out;
}

void add_config(CLI::App* sub) {
  sub->add_option("--config", "JSON object of flag values; flags on the command line win");
}

// Expands `--config FILE` into flags appended after the explicit ones, skipping
// keys already given. Done before parsing: CLI11 reads config files for the
// top-level app only.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ValidationError("--config", e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  auto scalar = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    std::string joined;
    if (value.is_array()) {
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
    } else {
      joined = scalar(value);
    }
    extra.push_back(flag + "=" + joined);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

Params params_with_dim(double lambda, double alpha, std::optional<long long> dim, std::size_t given) {
  if (dim && static_cast<std::size_t>(*dim) != given)
    throw Error(ErrorCode::DimensionMismatch, "--dim " + std::to_string(*dim) + " but " +
                                                  std::to_string(given) + " coordinates given");
  return validate_params(lambda, alpha, dim ? *dim : static_cast<long long>(given));
}

std::vector<InvariantId> default_track(std::size_t n) {
  std::vector<InvariantId> ids{{InvariantKind::Energy}};
  for (std::size_t k = 0; k < n; ++k) ids.push_back({InvariantKind::QuadraticI, k, k});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) ids.push_back({InvariantKind::AngularJ, i, j});
  return ids;
}

// -- simulate -------------------------------------------------------------------

struct SimulateArgs {
  double lambda = 0.0;
  double alpha = 1.0;
  std::optional<long long> dim;
  Vec x, p, v;
  double t0 = 0.0;
  double t1 = 0.0;
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::vector<std::string> track;
  std::string out = "-";
  std::string report = "-";
  std::string invariants;
};

void setup_simulate(CLI::App& app, SimulateArgs& a, std::function<int()>& action, Streams s) {
  auto* sub = app.add_subcommand("simulate", "Integrate the flow; trajectory CSV + drift JSON");
  add_config(sub);
  sub->add_option("--lambda", a.lambda, "Deformation parameter")->required();
  sub->add_option("--alpha", a.alpha, "Frequency parameter (> 0)")->capture_default_str();
  sub->add_option("--dim", a.dim, "Dimension (defaults to the length of --x)");
  sub->add_option("--x", a.x, "Initial position, comma separated")->required()->delimiter(',');
  auto* p = sub->add_option("--p", a.p, "Initial momenta")->delimiter(',');
  auto* v = sub->add_option("--v", a.v, "Initial velocities")->delimiter(',');
  p->excludes(v);
  sub->add_option("--t0", a.t0, "Start time")->capture_default_str();
  sub->add_option("--t1", a.t1, "End time")->required();
  sub->add_option("--rtol", a.rtol, "Relative tolerance")->capture_default_str();
  sub->add_option("--atol", a.atol, "Absolute tolerance")->capture_default_str();
  sub->add_option("--max-step", a.max_step, "Largest step");
  sub->add_option("--track", a.track, "Invariants to track (H, I11, J12, ReK1K2, P1, ...)")
      ->delimiter(',');
  sub->add_option("--out", a.out, "Trajectory CSV ('-' = stdout)")->capture_default_str();
  sub->add_option("--report", a.report, "Drift JSON ('-' = the free stream)");
  sub->add_option("--invariants", a.invariants, "Per-step invariant JSON array ('-' = stdout)");
  sub->callback([&a, &action, s, p, v] {
    if (p->empty() == v->empty()) throw CLI::ValidationError("exactly one of --p, --v is required");
    action = [&a, s, use_v = !v->empty()] {
      const Params params = params_with_dim(a.lambda, a.alpha, a.dim, a.x.size());
      State init{a.x, use_v ? a.v : a.p, use_v ? Picture::Velocity : Picture::Momentum};
      std::vector<InvariantId> track;
      for (const auto& name : a.track) track.push_back(InvariantId::parse(name));
      if (a.track.empty()) track = default_track(params.dim);
      IntegratorConfig cfg;
      cfg.rel_tol = a.rtol;
      cfg.abs_tol = a.atol;
      cfg.max_step = a.max_step;
      cfg.t0 = a.t0;
      cfg.t1 = a.t1;
      const Trajectory traj = integrate(params, init, cfg, track);

      Sink csv(a.out, s.out);
      write_csv(*csv, traj);
      nlohmann::json rep = drift_json(traj);
      rep["params"] = params;
      const State& first = traj.states.front();
      const double e = hamiltonian(params, first.x, first.second);
      rep["energy"] = e;
      rep["regime"] = std::string(to_string(classify_regime(params, e)));
      if (params.lambda > 0) rep["border_energy"] = params.alpha * params.alpha / (2 * params.lambda);
      Sink js(a.report, report_fallback(a.out, s));
      *js << rep.dump(2) << '\n';
      if (!a.invariants.empty()) {
        Sink inv(a.invariants, s.out);
        *inv << invariant_json(traj).dump() << '\n';
      }
      return kOk;
    };
  });
}

// -- analytic -------------------------------------------------------------------

struct AnalyticArgs {
  std::string regime;
  double lambda = 0.0;
  double alpha = 1.0;
  Vec amplitudes, phases, intercepts, offsets;
  double energy = 0.0;
  double p1 = 0.0, p2 = 0.0;
  double t0 = 0.0;
  std::optional<double> t1;
  std::size_t samples = 201;
  std::string out = "-";
  std::string report = "-";
};

SolutionRegime parse_regime(const std::string& s) {
  if (s == "trig") return SolutionRegime::TrigBounded;
  if (s == "hyper") return SolutionRegime::HyperUnbounded;
  if (s == "linear") return SolutionRegime::LinearBorder;
  if (s == "free-trig") return SolutionRegime::FreeTrig;
  if (s == "free-hyper") return SolutionRegime::FreeHyper;
  return solution_regime_from_string(s);
}

void setup_analytic(CLI::App& app, AnalyticArgs& a, std::function<int()>& action, Streams s) {
  auto* sub = app.add_subcommand("analytic", "Build a closed-form solution; JSON + sampled CSV");
  add_config(sub);
  sub->add_option("--regime", a.regime, "trig | hyper | linear | free-trig | free-hyper")->required();
  sub->add_option("--lambda", a.lambda, "Deformation parameter")->required();
  sub->add_option("--alpha", a.alpha, "Frequency parameter (ignored by free regimes)")
      ->capture_default_str();
  sub->add_option("--A", a.amplitudes, "Amplitudes (slopes for linear)")->delimiter(',');
  sub->add_option("--phi", a.phases, "Phases (default 0)")->delimiter(',');
  sub->add_option("--B", a.intercepts, "Intercepts for linear (default 0)")->delimiter(',');
  sub->add_option("--energy", a.energy, "Free motion energy");
  sub->add_option("--P1", a.p1, "Free motion Noether momentum P1");
  sub->add_option("--P2", a.p2, "Free motion Noether momentum P2");
  sub->add_option("--offsets", a.offsets, "Free motion time offsets")->delimiter(',');
  sub->add_option("--t0", a.t0, "First sample time")->capture_default_str();
  sub->add_option("--t1", a.t1, "Last sample time (default: one period, 3/rate or 5)");
  sub->add_option("--samples", a.samples, "Number of samples")->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{10'000'000}));
  sub->add_option("--out", a.out, "Sampled trajectory CSV ('-' = stdout)")->capture_default_str();
  sub->add_option("--report", a.report, "Solution JSON ('-' = the free stream)");
  sub->callback([&a, &action, s] {
    action = [&a, s] {
      const SolutionRegime regime = parse_regime(a.regime);
      ClosedFormSolution sol;
      Params params;
      if (is_free(regime)) {
        const std::size_t n = a.offsets.empty() ? (a.p2 != 0.0 ? 2 : 1) : a.offsets.size();
        params = validate_params(a.lambda, 1.0, static_cast<long long>(n));
        params.alpha = 0.0;
        const Vec off = a.offsets.empty() ? Vec(n, 0.0) : a.offsets;
        sol = free_solution(params, a.energy, a.p1, a.p2, off);
        if (sol.regime != regime)
          throw Error(ErrorCode::InconsistentConstants,
                      std::string(to_string(regime)) + " needs lambda of the other sign");
      } else {
        if (a.amplitudes.empty()) throw CLI::ValidationError("--A is required");
        const std::size_t n = a.amplitudes.size();
        params = validate_params(a.lambda, a.alpha, static_cast<long long>(n));
        const Vec& second = regime == SolutionRegime::LinearBorder ? a.intercepts : a.phases;
        const Vec fill = second.empty() ? Vec(n, 0.0) : second;
        if (regime == SolutionRegime::TrigBounded) sol = make_trig_solution(params, a.amplitudes, fill);
        else if (regime == SolutionRegime::HyperUnbounded) sol = make_hyper_solution(params, a.amplitudes, fill);
        else sol = make_linear_solution(params, a.amplitudes, fill);
      }

      double t1 = a.t0 + 5.0;
      if (a.t1) t1 = *a.t1;
      else if (auto per = try_period(sol)) t1 = a.t0 + *per;
      else if (regime != SolutionRegime::LinearBorder) t1 = a.t0 + 3.0 / sol.rate;

      Vec grid;
      for (std::size_t i = 0; i < a.samples; ++i)
        grid.push_back(a.t0 + (t1 - a.t0) * static_cast<double>(i) / static_cast<double>(a.samples - 1));

      // residual gate, relative to the size of the acceleration
      double amax = 1.0;
      for (double t : grid)
        for (double acc : eval_kinematics(sol, t).a) amax = std::max(amax, std::abs(acc));
      Vec interior;
      for (double t : grid)
        if (in_domain(params, eval(sol, t).x)) interior.push_back(t);
      const double res = residual(params, sol, interior) / amax;
      if (!(res <= 1e-9))
        throw Error(ErrorCode::InconsistentConstants,
                    "equation-of-motion residual " + format_double(res) + " exceeds 1e-9");

      Trajectory traj;
      traj.dim = params.dim;
      traj.tracked = {InvariantId{InvariantKind::Energy}};
      traj.invariant_track.assign(1, {});
      std::size_t omitted = 0;
      for (double t : interior) {
        const State m = to_momentum_picture(params, eval(sol, t));
        traj.times.push_back(t);
        traj.states.push_back(m);
        traj.invariant_track[0].push_back(hamiltonian(params, m.x, m.second));
      }
      omitted = grid.size() - interior.size();
      if (omitted > 0)
        s.err << "warning: omitted " << omitted << " samples on the lambda < 0 boundary\n";

      Sink csv(a.out, s.out);
      write_csv(*csv, traj);

      nlohmann::json rep;
      rep["params"] = params;
      rep["solution"] = sol;
      rep["rate"] = sol.rate;
      if (auto per = try_period(sol)) rep["period"] = *per;
      else rep["period"] = nullptr;
      const double e = solution_energy(params, sol);
      rep["energy"] = e;
      if (!is_free(regime)) rep["regime"] = std::string(to_string(classify_regime(params, e)));
      if (params.lambda > 0 && !is_free(regime))
        rep["border_energy"] = params.alpha * params.alpha / (2 * params.lambda);
      rep["residual"] = res;
      Sink js(a.report, report_fallback(a.out, s));
      *js << rep.dump(2) << '\n';
      return kOk;
    };
  });
}

// -- profile --------------------------------------------------------------------

struct ProfileArgs {
  std::string kind;
  std::optional<double> lambda, kappa;
  double strength = 1.0;
  double from = 0.0, to = 3.0;
  std::size_t count = 301;
  Vec at;
  std::string out = "-";
};

void setup_profile(CLI::App& app, ProfileArgs& a, std::function<int()>& action, Streams s) {
  auto* sub = app.add_subcommand("profile", "Potential profile as coord,value CSV");
  add_config(sub);
  sub->add_option("--kind", a.kind, "v1d | v2d-radial | curved")->required();
  sub->add_option("--lambda", a.lambda, "Deformation parameter (v1d, v2d-radial)");
  sub->add_option("--kappa", a.kappa, "Curvature (curved)");
  sub->add_option("--alpha,--omega0", a.strength, "alpha, or omega0 for curved")->capture_default_str();
  sub->add_option("--from", a.from, "Grid start")->capture_default_str();
  sub->add_option("--to", a.to, "Grid end")->capture_default_str();
  sub->add_option("--count", a.count, "Grid points")->capture_default_str();
  sub->add_option("--at", a.at, "Explicit coordinates (replace the grid)")->delimiter(',');
  sub->add_option("--out", a.out, "CSV ('-' = stdout)")->capture_default_str();
  sub->callback([&a, &action, s] {
    ProfileSpec spec;
    spec.kind = profile_kind_from_string(a.kind);
    const bool curved = spec.kind == ProfileKind::Curved;
    if (curved ? !a.kappa : !a.lambda)
      throw CLI::ValidationError(curved ? "--kappa is required for curved"
                                        : "--lambda is required for " + a.kind);
    if (curved ? a.lambda.has_value() : a.kappa.has_value())
      throw CLI::ValidationError(curved ? "--lambda does not apply to curved"
                                        : "--kappa only applies to curved");
    spec.curvature = curved ? *a.kappa : *a.lambda;
    spec.strength = a.strength;
    spec.from = a.from;
    spec.to = a.to;
    spec.count = a.count;
    spec.points = a.at;
    action = [&a, spec, s] {
      const ProfileTable t = profile(spec);
      for (const auto& w : t.warnings) s.err << "warning: " << w << '\n';
      Sink csv(a.out, s.out);
      write_profile_csv(*csv, t);
      return kOk;
    };
  });
}

// -- verify ---------------------------------------------------------------------

struct VerifyArgs {
  std::uint64_t seed = VerifyOptions{}.seed;
  std::optional<std::size_t> cases;
  std::vector<int> only;
  std::optional<int> inject_fault;
  std::string replay;
  std::optional<double> lambda;
  double alpha = 1.0;
  double replay_tol = 1e-8;
  bool summary = false;
  std::string out = "-";
};

void setup_verify(CLI::App& app, VerifyArgs& a, std::function<int()>& action, Streams s) {
  auto* sub = app.add_subcommand("verify", "Run the acceptance checks; pass/fail JSON report");
  add_config(sub);
  sub->add_option("--seed", a.seed, "Seed for the randomized checks")->capture_default_str();
  sub->add_option("--cases", a.cases, "Random cases per check (overrides the defaults)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--only", a.only, "Run only these criteria")->delimiter(',')
      ->check(CLI::Range(1, 12));
  sub->add_option("--inject-fault", a.inject_fault, "Harness self-test: force criterion N to fail")
      ->check(CLI::Range(1, 12));
  auto* rp = sub->add_option("--replay", a.replay, "Check a trajectory CSV written by simulate");
  sub->add_option("--lambda", a.lambda, "Model lambda for --replay")->needs(rp);
  sub->add_option("--alpha", a.alpha, "Model alpha for --replay")->needs(rp)->capture_default_str();
  sub->add_option("--replay-tol", a.replay_tol, "Drift bound for --replay")->needs(rp)
      ->capture_default_str();
  sub->add_flag("--summary", a.summary, "Also print one line per check on stderr");
  sub->add_option("--out", a.out, "Report JSON ('-' = stdout)")->capture_default_str();
  sub->callback([&a, &action, s, rp] {
    if (!rp->empty() && !a.lambda) throw CLI::ValidationError("--replay needs --lambda");
    action = [&a, s] {
      VerifyReport report;
      if (!a.replay.empty()) {
        std::ifstream in(a.replay);
        if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read '" + a.replay + "'");
        const Trajectory traj = read_csv(in);
        const Params params = validate_params(*a.lambda, a.alpha, static_cast<long long>(traj.dim));
        report.seed = a.seed;
        report.criteria.push_back(replay_check(params, traj, a.replay_tol));
      } else {
        VerifyOptions opts;
        opts.seed = a.seed;
        opts.cases = a.cases;
        opts.only = {a.only.begin(), a.only.end()};
        opts.inject_fault = a.inject_fault;
        report = run_verify(opts);
      }
      Sink js(a.out, s.out);
      *js << to_json(report).dump(2) << '\n';
      if (a.summary) print_summary(s.err, report);
      return report.pass() ? kOk : kVerificationFailure;
    };
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Streams s{out, err};
  CLI::App app{"Lambda-deformed quasi-harmonic oscillator", "qho"};
  app.require_subcommand(1);

  std::function<int()> action;
  SimulateArgs sim;
  AnalyticArgs ana;
  ProfileArgs prof;
  VerifyArgs ver;
  setup_simulate(app, sim, action, s);
  setup_analytic(app, ana, action, s);
  setup_profile(app, prof, action, s);
  setup_verify(app, ver, action, s);

  try {
    std::vector<std::string> argv_store{"qho"};
    const auto expanded = expand_config(args);
    argv_store.insert(argv_store.end(), expanded.begin(), expanded.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }

  try {
    return action();
  } catch (const DomainEscapeError& e) {
    err << "error: " << e.what() << " (last valid t = " << format_double(e.last_valid_time())
        << ")\n";
    return kDomainError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    const int code = exit_code_for(e.code());
    if (code == kUsage) {
      const auto subs = app.get_subcommands();
      if (!subs.empty()) err << '\n' << subs.front()->help();
    }
    return code;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace qho::cli
