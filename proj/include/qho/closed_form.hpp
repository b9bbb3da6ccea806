#pragma once

#include <optional>

#include "qho/dynamics.hpp"
#include "qho/model.hpp"

namespace qho {

enum class SolutionRegime { TrigBounded, HyperUnbounded, LinearBorder, FreeTrig, FreeHyper };

enum class Regime { Bounded, Border, Unbounded };

std::string_view to_string(SolutionRegime r);
std::string_view to_string(Regime r);
SolutionRegime solution_regime_from_string(std::string_view s);

/// Exact solution of the oscillator (or of the free motion, alpha = 0).
///
///   TrigBounded, FreeTrig:  x_i = A_i sin(rate t + phi_i)
///   HyperUnbounded, FreeHyper: x_i = A_i sinh(rate t + phi_i)
///   LinearBorder:           x_i = A_i t + B_i   (phases hold B, rate unused)
struct ClosedFormSolution {
  SolutionRegime regime = SolutionRegime::TrigBounded;
  Vec amplitudes;
  Vec phases;
  double rate = 0.0;

  const Vec& slopes() const { return amplitudes; }
  const Vec& intercepts() const { return phases; }
};

struct Kinematics {
  Vec x;
  Vec v;
  Vec a;
};

// Sum of A_i^2 + lambda * sum_{i<j} A_i^2 A_j^2 sin^2(phi_i - phi_j).
double trig_amplitude_sum(double lambda, ConstVec amplitudes, ConstVec phases);
// Same with sinh^2; the phase difference is not reduced.
double hyper_amplitude_sum(double lambda, ConstVec amplitudes, ConstVec phases);
// sum A_i^2 + lambda * sum_{i<j} (A_i B_j - A_j B_i)^2
double linear_amplitude_sum(double lambda, ConstVec slopes, ConstVec intercepts);

// max_t sum_i A_i^2 sin^2(w t + phi_i), in closed form.
double trig_max_radius_sq(ConstVec amplitudes, ConstVec phases);

Regime classify_regime(const Params& params, double energy);

double trig_rate(const Params& params, ConstVec amplitudes, ConstVec phases);
double hyper_rate(const Params& params, ConstVec amplitudes, ConstVec phases);

ClosedFormSolution make_trig_solution(const Params& params, Vec amplitudes, Vec phases);
ClosedFormSolution make_hyper_solution(const Params& params, Vec amplitudes, Vec phases);
/// Throws NotBorderRegime unless alpha^2 = lambda P_L (relative 1e-9) and lambda > 0.
ClosedFormSolution make_linear_solution(const Params& params, Vec slopes, Vec intercepts);
/// Rescales `slopes` so that alpha^2 = lambda P_L holds exactly.
ClosedFormSolution scale_to_border(const Params& params, Vec slopes, Vec intercepts);

/// Free motion (alpha = 0) with energy E and Noether momenta P1, P2; `offsets`
/// are time offsets, x = A sinh(C (t + offset_1)) with C = sqrt(2|lambda|E).
/// Works for dim 1 (P2 must be 0) and dim 2.
ClosedFormSolution free_solution(const Params& params, double energy, double p1, double p2,
                                 ConstVec offsets);

Kinematics eval_kinematics(const ClosedFormSolution& sol, double t);
State eval(const ClosedFormSolution& sol, double t);

/// max over the grid of |x''_analytic - force(x, x')|_inf; free regimes use alpha = 0.
double residual(const Params& params, const ClosedFormSolution& sol, ConstVec t_grid);

double solution_energy(const Params& params, const ClosedFormSolution& sol);

/// 2 pi / rate for the trigonometric regimes; throws Aperiodic otherwise.
double period(const ClosedFormSolution& sol);
std::optional<double> try_period(const ClosedFormSolution& sol);

bool is_free(SolutionRegime r);

void to_json(nlohmann::json& j, const ClosedFormSolution& s);
ClosedFormSolution solution_from_json(const nlohmann::json& j);

}  // namespace qho
