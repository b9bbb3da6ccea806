#pragma once

#include "qho/model.hpp"

// Energies, forces and the Legendre map of the lambda-deformed oscillator
//
//   L = T - V,  T = |v|^2/2 - lambda (x.v)^2 / (2 (1 + lambda r^2)),
//               V = (alpha^2/2) r^2 / (1 + lambda r^2),
//
// where T is the same as (1/(2(1+lambda r^2))) [|v|^2 + lambda sum_{i<j} J_ij^2].
// In the momentum picture
//
//   H = (|p|^2 + lambda (x.p)^2)/2 + V.
//
// Every function checks the position against the lambda < 0 disc and throws
// OutOfDomain rather than evaluating near the degenerate boundary.
namespace qho {

struct EnergyBreakdown {
  double kinetic = 0.0;
  double potential = 0.0;
  double total = 0.0;
};

// sum_{i<j} (a_i b_j - a_j b_i)^2, computed pairwise.
double sum_sq_angular(ConstVec a, ConstVec b);

double kinetic_energy(const Params& params, ConstVec x, ConstVec v);
double potential_energy(const Params& params, ConstVec x);
EnergyBreakdown lagrangian_energy(const Params& params, ConstVec x, ConstVec v);

/// Acceleration of the Euler-Lagrange flow:
///   F_k = [-alpha^2 + lambda (|v|^2 + lambda sum_{i<j} J_ij^2)] x_k / (1 + lambda r^2)
Vec force(const Params& params, ConstVec x, ConstVec v);

/// Legendre map p = dT/dv = v - lambda (x.v) x / (1 + lambda r^2).
Vec to_momenta(const Params& params, ConstVec x, ConstVec v);
/// Inverse Legendre map v = p + lambda (x.p) x.
Vec to_velocities(const Params& params, ConstVec x, ConstVec p);

double hamiltonian(const Params& params, ConstVec x, ConstVec p);

struct PhaseVelocity {
  Vec dx;
  Vec dp;
};

/// Canonical equations, closed form:
///   dx/dt = p + lambda (x.p) x
///   dp/dt = -lambda (x.p) p - alpha^2 x / (1 + lambda r^2)^2
PhaseVelocity hamilton_field(const Params& params, ConstVec x, ConstVec p);

// Unchecked kernel used by the integrator hot loop; writes into `dx`, `dp`.
void hamilton_field_into(const Params& params, ConstVec x, ConstVec p, std::span<double> dx,
                         std::span<double> dp);

State to_momentum_picture(const Params& params, const State& s);
State to_velocity_picture(const Params& params, const State& s);

}  // namespace qho
