#include "qho/dynamics.hpp"

namespace qho {

namespace {

void check(const Params& params, ConstVec x, ConstVec w, const char* what) {
  require_dim(params, w, what);
  require_in_domain(params, x);
}

}  // namespace

double sum_sq_angular(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double jij = a[i] * b[j] - a[j] * b[i];
      s += jij * jij;
    }
  return s;
}

double kinetic_energy(const Params& params, ConstVec x, ConstVec v) {
  check(params, x, v, "velocity");
  const double s = params.metric_factor(norm2(x));
  return (norm2(v) + params.lambda * sum_sq_angular(x, v)) / (2.0 * s);
}

double potential_energy(const Params& params, ConstVec x) {
  require_in_domain(params, x);
  const double r2 = norm2(x);
  return 0.5 * params.alpha * params.alpha * r2 / params.metric_factor(r2);
}

EnergyBreakdown lagrangian_energy(const Params& params, ConstVec x, ConstVec v) {
  EnergyBreakdown e;
  e.kinetic = kinetic_energy(params, x, v);
  e.potential = potential_energy(params, x);
  e.total = e.kinetic + e.potential;
  return e;
}

Vec force(const Params& params, ConstVec x, ConstVec v) {
  check(params, x, v, "velocity");
  const double lam = params.lambda;
  const double s = params.metric_factor(norm2(x));
  const double c =
      (-params.alpha * params.alpha + lam * (norm2(v) + lam * sum_sq_angular(x, v))) / s;
  Vec f(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) f[k] = c * x[k];
  return f;
}

Vec to_momenta(const Params& params, ConstVec x, ConstVec v) {
  check(params, x, v, "velocity");
  const double c = params.lambda * dot(x, v) / params.metric_factor(norm2(x));
  Vec p(v.begin(), v.end());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] -= c * x[k];
  return p;
}

Vec to_velocities(const Params& params, ConstVec x, ConstVec p) {
  check(params, x, p, "momentum");
  const double c = params.lambda * dot(x, p);
  Vec v(p.begin(), p.end());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] += c * x[k];
  return v;
}

double hamiltonian(const Params& params, ConstVec x, ConstVec p) {
  check(params, x, p, "momentum");
  const double xp = dot(x, p);
  return 0.5 * (norm2(p) + params.lambda * xp * xp) + potential_energy(params, x);
}

void hamilton_field_into(const Params& params, ConstVec x, ConstVec p, std::span<double> dx,
                         std::span<double> dp) {
  const double lam = params.lambda;
  const double xp = dot(x, p);
  const double s = params.metric_factor(norm2(x));
  const double pull = params.alpha * params.alpha / (s * s);
  for (std::size_t k = 0; k < x.size(); ++k) {
    dx[k] = p[k] + lam * xp * x[k];
    dp[k] = -lam * xp * p[k] - pull * x[k];
  }
}

PhaseVelocity hamilton_field(const Params& params, ConstVec x, ConstVec p) {
  check(params, x, p, "momentum");
  PhaseVelocity out{Vec(x.size()), Vec(x.size())};
  hamilton_field_into(params, x, p, out.dx, out.dp);
  return out;
}

State to_momentum_picture(const Params& params, const State& s) {
  if (s.picture == Picture::Momentum) return s;
  return {s.x, to_momenta(params, s.x, s.second), Picture::Momentum};
}

State to_velocity_picture(const Params& params, const State& s) {
  if (s.picture == Picture::Velocity) return s;
  return {s.x, to_velocities(params, s.x, s.second), Picture::Velocity};
}

}  // namespace qho
