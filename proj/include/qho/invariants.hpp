#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qho/model.hpp"

namespace qho {

enum class InvariantKind {
  NoetherP,     // P_i(lambda), velocity-picture Noether momentum (free motion only)
  AngularJ,     // J_ij = x_i p_j - x_j p_i
  QuadraticI,   // I_ij(lambda); I_kk is I_k
  ComplexK,     // K_i = P_i + i alpha x_i / sqrt(1 + lambda r^2)
  KProductRe,   // Re(K_i K_j^*)
  KProductIm,   // Im(K_i K_j^*)
  Energy,       // H
  H1,
  H2,
  H3,
};

/// Identifies a conserved quantity; indices are zero-based.
struct InvariantId {
  InvariantKind kind = InvariantKind::Energy;
  std::size_t i = 0;
  std::size_t j = 0;

  /// Display name with one-based indices: "H", "I12", "J12", "P1", "ReK1K2", ...
  std::string name() const;
  static InvariantId parse(std::string_view name);

  friend bool operator==(const InvariantId&, const InvariantId&) = default;
};

struct InvariantValue {
  InvariantId id;
  std::complex<double> value;
};

// -- point evaluations -------------------------------------------------------

double noether_p(const Params& params, ConstVec x, ConstVec v, std::size_t i);
double angular_j(ConstVec x, ConstVec w, std::size_t i, std::size_t j);
std::complex<double> complex_k(const Params& params, ConstVec x, ConstVec v, std::size_t i);
double quadratic_i(const Params& params, ConstVec x, ConstVec p, std::size_t i, std::size_t j);

struct HamiltonianParts {
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
};
// n = 2 split H = H1 + H2 - lambda H3.
HamiltonianParts hamiltonian_parts(const Params& params, ConstVec x, ConstVec p);

/// Evaluates `id` at a state given in either picture. Velocity-picture
/// quantities (P_i, K_i) convert through to_velocities when given momenta.
InvariantValue evaluate(const Params& params, const InvariantId& id, const State& state);
double evaluate_real(const Params& params, const InvariantId& id, const State& state);

// -- observables and brackets ------------------------------------------------

/// Phase-space function of (x, p), with an optional analytic gradient.
struct Observable {
  using ValueFn = std::function<double(ConstVec x, ConstVec p)>;
  using GradFn =
      std::function<void(ConstVec x, ConstVec p, std::span<double> gx, std::span<double> gp)>;

  std::string name;
  ValueFn value;
  GradFn gradient;  // empty => finite differences

  double operator()(ConstVec x, ConstVec p) const { return value(x, p); }
};

Observable operator+(const Observable& a, const Observable& b);
Observable operator-(const Observable& a, const Observable& b);
Observable operator*(double c, const Observable& a);
Observable square(const Observable& a);

Observable hamiltonian_observable(const Params& params);
Observable quadratic_observable(const Params& params, std::size_t i, std::size_t j);
// Any i != j; J_ji = -J_ij.
Observable angular_observable(std::size_t i, std::size_t j);
Observable position_observable(std::size_t i);
Observable momentum_observable(std::size_t i);
Observable observable_for(const Params& params, const InvariantId& id);

enum class BracketMode { Auto, FiniteDifference };

struct Gradient {
  Vec gx;
  Vec gp;
};

// Central differences, h = eps^{1/3} max(1, |coordinate|).
Gradient gradient_fd(const Params& params, const Observable& f, ConstVec x, ConstVec p);
Gradient gradient(const Params& params, const Observable& f, ConstVec x, ConstVec p,
                  BracketMode mode = BracketMode::Auto);

/// {f, g} = sum_k df/dx_k dg/dp_k - df/dp_k dg/dx_k.
double poisson_bracket(const Observable& f, const Observable& g, ConstVec x, ConstVec p,
                       const Params& params, BracketMode mode = BracketMode::Auto);

/// The three n = 3 involutive triples plus (I1+I2+I3, J12, J^2).
std::vector<std::vector<Observable>> involutive_sets_n3(const Params& params);

/// (I_k, J_{i,i+1}), k = 1..n, i = 1..n-1.
std::vector<Observable> fundamental_set(const Params& params);

/// Rank of the gradient matrix of `obs` at (x, p), singular values below
/// rel_tol * sigma_max are treated as zero.
std::size_t jacobian_rank(const Params& params, const std::vector<Observable>& obs, ConstVec x,
                          ConstVec p, double rel_tol = 1e-8);

void to_json(nlohmann::json& j, const InvariantId& id);

}  // namespace qho
