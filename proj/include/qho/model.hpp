#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "json.hpp"

#include "qho/error.hpp"

namespace qho {

using Vec = std::vector<double>;
using ConstVec = std::span<const double>;

/// Radius of the configuration-space disc on which the kinetic term is
/// positive definite: 1/sqrt(|lambda|) for lambda < 0, +inf otherwise.
struct DomainRadius {
  double value = std::numeric_limits<double>::infinity();
  bool finite() const { return value < std::numeric_limits<double>::infinity(); }
};

/// Model triple (lambda, alpha, n) plus numeric tolerances.
struct Params {
  double lambda = 0.0;
  double alpha = 1.0;
  std::size_t dim = 1;
  double boundary_margin = 0.0;  // guard band on r^2, only used for lambda < 0
  double tol = 1e-10;

  DomainRadius domain_radius() const;

  // 1 + lambda r^2
  double metric_factor(double r2) const { return 1.0 + lambda * r2; }
};

Params validate_params(double lambda, double alpha, long long dim);

bool in_domain(const Params& params, ConstVec x);

// Throws OutOfDomain / DimensionMismatch when `x` is not an admissible position.
void require_in_domain(const Params& params, ConstVec x);
void require_dim(const Params& params, ConstVec v, const char* what);

enum class Picture { Velocity, Momentum };

/// Phase-space point. `second` holds velocities or momenta, per `picture`.
struct State {
  Vec x;
  Vec second;
  Picture picture = Picture::Momentum;
};

double dot(ConstVec a, ConstVec b);
double norm2(ConstVec a);

void to_json(nlohmann::json& j, const Params& p);
Params params_from_json(const nlohmann::json& j);

}  // namespace qho
