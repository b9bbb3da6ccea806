#include "qho/model.hpp"

#include <cmath>
#include <string>

namespace qho {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::NonPositiveDim: return "NonPositiveDim";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NegativeEnergy: return "NegativeEnergy";
    case ErrorCode::NonPositiveM: return "NonPositiveM";
    case ErrorCode::NotUnboundedRegime: return "NotUnboundedRegime";
    case ErrorCode::NotBorderRegime: return "NotBorderRegime";
    case ErrorCode::InconsistentConstants: return "InconsistentConstants";
    case ErrorCode::Aperiodic: return "Aperiodic";
    case ErrorCode::IndexError: return "IndexError";
    case ErrorCode::NotSeparableForm: return "NotSeparableForm";
    case ErrorCode::PolarOrigin: return "PolarOrigin";
    case ErrorCode::TangentPole: return "TangentPole";
    case ErrorCode::DomainEscape: return "DomainEscape";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NotOscillatory: return "NotOscillatory";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

DomainRadius Params::domain_radius() const {
  if (lambda < 0.0) return {1.0 / std::sqrt(-lambda)};
  return {};
}

Params validate_params(double lambda, double alpha, long long dim) {
  if (!std::isfinite(lambda)) throw Error(ErrorCode::InvalidParams, "lambda must be finite");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::NonPositiveAlpha, "alpha = " + std::to_string(alpha));
  if (dim < 1) throw Error(ErrorCode::NonPositiveDim, "dim = " + std::to_string(dim));

  Params p;
  p.lambda = lambda;
  p.alpha = alpha;
  p.dim = static_cast<std::size_t>(dim);
  p.tol = 1e-10;
  // Relative guard band: 1e-9 of the domain radius, applied to r^2.
  p.boundary_margin = lambda < 0.0 ? 1e-9 * p.domain_radius().value : 1e-9;
  return p;
}

double dot(ConstVec a, ConstVec b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(ConstVec a) { return dot(a, a); }

void require_dim(const Params& params, ConstVec v, const char* what) {
  if (v.size() != params.dim)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + " has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(params.dim));
}

bool in_domain(const Params& params, ConstVec x) {
  require_dim(params, x, "position");
  if (params.lambda >= 0.0) return true;
  return norm2(x) < 1.0 / -params.lambda - params.boundary_margin;
}

void require_in_domain(const Params& params, ConstVec x) {
  if (!in_domain(params, x))
    throw Error(ErrorCode::OutOfDomain, "r^2 = " + std::to_string(norm2(x)) +
                                            " is outside 1/|lambda| - margin");
}

void to_json(nlohmann::json& j, const Params& p) {
  j = nlohmann::json{{"lambda", p.lambda}, {"alpha", p.alpha}, {"dim", p.dim}};
}

Params params_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("lambda") || !j.contains("alpha") || !j.contains("dim"))
    throw Error(ErrorCode::InvalidParams, "expected {\"lambda\",\"alpha\",\"dim\"}");
  return validate_params(j.at("lambda").get<double>(), j.at("alpha").get<double>(),
                         j.at("dim").get<long long>());
}

}  // namespace qho
