#include "qho/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace qho {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_sizes(const Params& params, ConstVec a, ConstVec b) {
  require_dim(params, a, "amplitudes");
  require_dim(params, b, "phases");
}

// Phase difference reduced to (-pi, pi].
double reduced(double d) {
  double r = std::remainder(d, kTwoPi);
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

}  // namespace

std::string_view to_string(SolutionRegime r) {
  switch (r) {
    case SolutionRegime::TrigBounded: return "TrigBounded";
    case SolutionRegime::HyperUnbounded: return "HyperUnbounded";
    case SolutionRegime::LinearBorder: return "LinearBorder";
    case SolutionRegime::FreeTrig: return "FreeTrig";
    case SolutionRegime::FreeHyper: return "FreeHyper";
  }
  return "Unknown";
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Bounded: return "Bounded";
    case Regime::Border: return "Border";
    case Regime::Unbounded: return "Unbounded";
  }
  return "Unknown";
}

SolutionRegime solution_regime_from_string(std::string_view s) {
  for (auto r : {SolutionRegime::TrigBounded, SolutionRegime::HyperUnbounded,
                 SolutionRegime::LinearBorder, SolutionRegime::FreeTrig, SolutionRegime::FreeHyper})
    if (to_string(r) == s) return r;
  throw Error(ErrorCode::InvalidConfig, "unknown regime '" + std::string(s) + "'");
}

bool is_free(SolutionRegime r) {
  return r == SolutionRegime::FreeTrig || r == SolutionRegime::FreeHyper;
}

double trig_amplitude_sum(double lambda, ConstVec a, ConstVec phi) {
  double sum = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i] * a[i];
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = std::sin(reduced(phi[i] - phi[j]));
      cross += a[i] * a[i] * a[j] * a[j] * s * s;
    }
  }
  return sum + lambda * cross;
}

double hyper_amplitude_sum(double lambda, ConstVec a, ConstVec phi) {
  double sum = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += a[i] * a[i];
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double s = std::sinh(phi[i] - phi[j]);
      cross += a[i] * a[i] * a[j] * a[j] * s * s;
    }
  }
  return sum + lambda * cross;
}

double linear_amplitude_sum(double lambda, ConstVec slopes, ConstVec intercepts) {
  return norm2(slopes) + lambda * sum_sq_angular(slopes, intercepts);
}

double trig_max_radius_sq(ConstVec a, ConstVec phi) {
  // r^2 = S/2 - Re(e^{2iwt} sum A_i^2 e^{2i phi_i})/2
  std::complex<double> z{0.0, 0.0};
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * a[i];
    z += a[i] * a[i] * std::polar(1.0, 2.0 * phi[i]);
  }
  return 0.5 * (s + std::abs(z));
}

Regime classify_regime(const Params& params, double energy) {
  if (energy < -params.tol || !std::isfinite(energy))
    throw Error(ErrorCode::NegativeEnergy, "energy = " + std::to_string(energy));
  if (params.lambda <= 0.0) return Regime::Bounded;
  const double threshold = params.alpha * params.alpha / (2.0 * params.lambda);
  if (std::abs(energy - threshold) <= params.tol) return Regime::Border;
  return energy < threshold ? Regime::Bounded : Regime::Unbounded;
}

double trig_rate(const Params& params, ConstVec a, ConstVec phi) {
  require_sizes(params, a, phi);
  const double m = 1.0 + params.lambda * trig_amplitude_sum(params.lambda, a, phi);
  if (!(m > 0.0)) throw Error(ErrorCode::NonPositiveM, "M = " + std::to_string(m));
  if (params.lambda < 0.0) {
    const double rmax = trig_max_radius_sq(a, phi);
    if (!(rmax < 1.0 / -params.lambda - params.boundary_margin))
      throw Error(ErrorCode::NonPositiveM,
                  "max r^2 = " + std::to_string(rmax) + " leaves the lambda < 0 disc");
  }
  return params.alpha / std::sqrt(m);
}

double hyper_rate(const Params& params, ConstVec a, ConstVec phi) {
  require_sizes(params, a, phi);
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::NotUnboundedRegime, "requires lambda > 0");
  const double m = params.lambda * hyper_amplitude_sum(params.lambda, a, phi) - 1.0;
  if (!(m > 0.0))
    throw Error(ErrorCode::NotUnboundedRegime, "lambda P_h - 1 = " + std::to_string(m));
  return params.alpha / std::sqrt(m);
}

ClosedFormSolution make_trig_solution(const Params& params, Vec a, Vec phi) {
  const double w = trig_rate(params, a, phi);
  return {SolutionRegime::TrigBounded, std::move(a), std::move(phi), w};
}

ClosedFormSolution make_hyper_solution(const Params& params, Vec a, Vec phi) {
  const double w = hyper_rate(params, a, phi);
  return {SolutionRegime::HyperUnbounded, std::move(a), std::move(phi), w};
}

ClosedFormSolution make_linear_solution(const Params& params, Vec slopes, Vec intercepts) {
  require_sizes(params, slopes, intercepts);
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::NotBorderRegime, "requires lambda > 0");
  const double a2 = params.alpha * params.alpha;
  const double lp = params.lambda * linear_amplitude_sum(params.lambda, slopes, intercepts);
  if (std::abs(lp - a2) > 1e-9 * a2)
    throw Error(ErrorCode::NotBorderRegime, "alpha^2 = " + std::to_string(a2) +
                                                " but lambda P_L = " + std::to_string(lp));
  return {SolutionRegime::LinearBorder, std::move(slopes), std::move(intercepts), 0.0};
}

ClosedFormSolution scale_to_border(const Params& params, Vec slopes, Vec intercepts) {
  require_sizes(params, slopes, intercepts);
  if (!(params.lambda > 0.0)) throw Error(ErrorCode::NotBorderRegime, "requires lambda > 0");
  const double pl = linear_amplitude_sum(params.lambda, slopes, intercepts);
  if (!(pl > 0.0)) throw Error(ErrorCode::NotBorderRegime, "zero slopes");
  // P_L is homogeneous of degree 2 in the slopes.
  const double c = params.alpha / std::sqrt(params.lambda * pl);
  for (double& s : slopes) s *= c;
  return make_linear_solution(params, std::move(slopes), std::move(intercepts));
}

ClosedFormSolution free_solution(const Params& params, double energy, double p1, double p2,
                                 ConstVec offsets) {
  const double lam = params.lambda;
  if (lam == 0.0) throw Error(ErrorCode::InconsistentConstants, "lambda must be nonzero");
  if (!(energy > 0.0)) throw Error(ErrorCode::InconsistentConstants, "energy must be positive");
  if (params.dim != 1 && params.dim != 2)
    throw Error(ErrorCode::DimensionMismatch, "free solutions are defined for dim 1 and 2");
  require_dim(params, offsets, "offsets");
  if (params.dim == 1 && p2 != 0.0)
    throw Error(ErrorCode::InconsistentConstants, "P2 must vanish in one dimension");

  const double c = std::sqrt(2.0 * std::abs(lam) * energy);
  // Scaled squared amplitudes (amplitude * sqrt|lambda|).
  double ax2 = 1.0 - p2 * p2 / (2.0 * energy);
  double ay2 = 1.0 - p1 * p1 / (2.0 * energy);
  constexpr double kSlack = 1e-12;
  if (ax2 < -kSlack || ay2 < -kSlack)
    throw Error(ErrorCode::InconsistentConstants, "negative amplitude radicand");
  ax2 = std::max(ax2, 0.0);
  ay2 = std::max(ay2, 0.0);

  const bool hyper = lam > 0.0;
  double restriction;
  if (params.dim == 1) {
    restriction = ax2;
    if (std::abs(ay2) > 1e-9)
      throw Error(ErrorCode::InconsistentConstants, "one-dimensional motion needs P1^2 = 2E");
  } else {
    const double d = c * (offsets[0] - offsets[1]);
    const double f = hyper ? std::sinh(d) * std::sinh(d) : -std::sin(d) * std::sin(d);
    restriction = ax2 + ay2 + ax2 * ay2 * f;
  }
  if (std::abs(restriction - 1.0) > 1e-9)
    throw Error(ErrorCode::InconsistentConstants,
                "amplitude restriction evaluates to " + std::to_string(restriction));

  const double scale = 1.0 / std::sqrt(std::abs(lam));
  ClosedFormSolution sol;
  sol.regime = hyper ? SolutionRegime::FreeHyper : SolutionRegime::FreeTrig;
  sol.rate = c;
  sol.amplitudes = {std::sqrt(ax2) * scale};
  sol.phases = {c * offsets[0]};
  if (params.dim == 2) {
    sol.amplitudes.push_back(std::sqrt(ay2) * scale);
    sol.phases.push_back(c * offsets[1]);
  }
  return sol;
}

Kinematics eval_kinematics(const ClosedFormSolution& sol, double t) {
  const std::size_t n = sol.amplitudes.size();
  Kinematics k{Vec(n), Vec(n), Vec(n)};
  const double w = sol.rate;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = sol.amplitudes[i];
    switch (sol.regime) {
      case SolutionRegime::TrigBounded:
      case SolutionRegime::FreeTrig: {
        const double th = w * t + sol.phases[i];
        k.x[i] = a * std::sin(th);
        k.v[i] = a * w * std::cos(th);
        k.a[i] = -w * w * k.x[i];
        break;
      }
      case SolutionRegime::HyperUnbounded:
      case SolutionRegime::FreeHyper: {
        const double th = w * t + sol.phases[i];
        k.x[i] = a * std::sinh(th);
        k.v[i] = a * w * std::cosh(th);
        k.a[i] = w * w * k.x[i];
        break;
      }
      case SolutionRegime::LinearBorder:
        k.x[i] = a * t + sol.phases[i];
        k.v[i] = a;
        k.a[i] = 0.0;
        break;
    }
  }
  return k;
}

State eval(const ClosedFormSolution& sol, double t) {
  Kinematics k = eval_kinematics(sol, t);
  return {std::move(k.x), std::move(k.v), Picture::Velocity};
}

double residual(const Params& params, const ClosedFormSolution& sol, ConstVec t_grid) {
  Params p = params;
  if (is_free(sol.regime)) p.alpha = 0.0;
  double worst = 0.0;
  for (double t : t_grid) {
    const Kinematics k = eval_kinematics(sol, t);
    const Vec f = force(p, k.x, k.v);
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(k.a[i] - f[i]));
  }
  return worst;
}

double solution_energy(const Params& params, const ClosedFormSolution& sol) {
  const double a2 = params.alpha * params.alpha;
  const double lam = params.lambda;
  switch (sol.regime) {
    case SolutionRegime::TrigBounded: {
      const double pe = trig_amplitude_sum(lam, sol.amplitudes, sol.phases);
      return 0.5 * a2 * pe / (1.0 + lam * pe);
    }
    case SolutionRegime::HyperUnbounded: {
      const double ph = hyper_amplitude_sum(lam, sol.amplitudes, sol.phases);
      return 0.5 * a2 * ph / (lam * ph - 1.0);
    }
    case SolutionRegime::LinearBorder:
      return a2 / (2.0 * lam);
    case SolutionRegime::FreeTrig:
    case SolutionRegime::FreeHyper:
      return sol.rate * sol.rate / (2.0 * std::abs(lam));
  }
  return 0.0;
}

std::optional<double> try_period(const ClosedFormSolution& sol) {
  if (sol.regime == SolutionRegime::TrigBounded || sol.regime == SolutionRegime::FreeTrig)
    return kTwoPi / sol.rate;
  return std::nullopt;
}

double period(const ClosedFormSolution& sol) {
  if (auto p = try_period(sol)) return *p;
  throw Error(ErrorCode::Aperiodic, std::string(to_string(sol.regime)) + " has no period");
}

void to_json(nlohmann::json& j, const ClosedFormSolution& s) {
  j = nlohmann::json{{"regime", std::string(to_string(s.regime))}, {"A", s.amplitudes}};
  if (s.regime == SolutionRegime::LinearBorder) {
    j["B"] = s.phases;
  } else {
    j["phi"] = s.phases;
    j["rate"] = s.rate;
  }
}

ClosedFormSolution solution_from_json(const nlohmann::json& j) {
  ClosedFormSolution s;
  s.regime = solution_regime_from_string(j.at("regime").get<std::string>());
  s.amplitudes = j.at("A").get<Vec>();
  if (s.regime == SolutionRegime::LinearBorder) {
    s.phases = j.at("B").get<Vec>();
  } else {
    s.phases = j.at("phi").get<Vec>();
    s.rate = j.at("rate").get<double>();
  }
  if (s.phases.size() != s.amplitudes.size())
    throw Error(ErrorCode::DimensionMismatch, "A and phi/B differ in length");
  return s;
}

}  // namespace qho
