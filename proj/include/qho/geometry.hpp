#pragma once

#include <array>
#include <functional>

#include "qho/model.hpp"

namespace qho {

/// Metric of the kinetic term at a point of the plane,
///   ds^2 = [(1 + lambda y^2) dx^2 + (1 + lambda x^2) dy^2 - 2 lambda x y dx dy] / (1 + lambda r^2).
struct Metric2 {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 1.0;

  double det() const { return g11 * g22 - g12 * g12; }
  double quadratic_form(double vx, double vy) const {
    return g11 * vx * vx + 2.0 * g12 * vx * vy + g22 * vy * vy;
  }
};

using Vec2 = std::array<double, 2>;
using Vec4 = std::array<double, 4>;
using Mat2 = std::array<std::array<double, 2>, 2>;

enum class KillingLabel { X1, X2, XJ };

Metric2 metric(const Params& params, double x, double y);

Vec2 killing_field(const Params& params, KillingLabel label, double x, double y);
/// Analytic Jacobian d(field)/d(x, y); row = component, column = coordinate.
Mat2 killing_jacobian(const Params& params, KillingLabel label, double x, double y);

/// Tangent lift to (x, y, vx, vy).
Vec4 killing_lift(const Params& params, KillingLabel label, double x, double y, double vx,
                  double vy);

/// Derivative of the kinetic term along the lifted field, from the analytic
/// gradient of T. Vanishes for every label.
double kinetic_lie_derivative(const Params& params, KillingLabel label, double x, double y,
                              double vx, double vy);

/// [a, b] = (Db) a - (Da) b from analytic Jacobians.
Vec2 lie_bracket(const Params& params, KillingLabel a, KillingLabel b, double x, double y);

/// The combination the structure constants predict for [a, b]:
///   [X1, X2] = lambda XJ, [X1, XJ] = X2, [X2, XJ] = -X1.
Vec2 lie_algebra_rhs(const Params& params, KillingLabel a, KillingLabel b, double x, double y);

// -- separable charts ----------------------------------------------------------

enum class ChartKind { ZxY, XZy, Polar };
enum class ChartDirection { Forward, Backward };

struct Chart {
  ChartKind kind = ChartKind::ZxY;
  double lambda = 0.0;
};

/// Forward: Cartesian (x, y) -> chart coordinates; Backward inverts.
///   ZxY:   (z_x, y),  z_x = x / sqrt(1 + lambda y^2)
///   XZy:   (x, z_y),  z_y = y / sqrt(1 + lambda x^2)
///   Polar: (r, phi)
Vec2 chart_map(const Chart& chart, ChartDirection dir, Vec2 point);

/// Potential written in a chart's separable form (alpha^2 factored out):
///   ZxY:   V = W1(z_x)/(1 + lambda y^2) + W2(y)
///   XZy:   V = W1(x) + W2(z_y)/(1 + lambda x^2)
///   Polar: V = W1(r) + W2(phi)/r^2          (W1 = F, W2 = G)
struct SeparablePotential {
  ChartKind chart = ChartKind::ZxY;
  std::function<double(double)> w1;
  std::function<double(double)> w2;
};

/// The oscillator potential r^2/(1 + lambda r^2) in the separable form of `chart`.
SeparablePotential oscillator_separable_potential(const Params& params, ChartKind chart);

struct SeparableIntegrals {
  double i1 = 0.0;
  double i2 = 0.0;
};

/// Quadratic integrals (I1, I2) of the chart, at Cartesian (x, p); H = (I1 + I2)/2.
/// Throws NotSeparableForm when `potential` was written for a different chart.
SeparableIntegrals separable_invariants(const Chart& chart, const Params& params, ConstVec x,
                                        ConstVec p, const SeparablePotential& potential);

// -- curvature ---------------------------------------------------------------

/// x -> q: asinh(sqrt(lambda) x)/sqrt(lambda) (lambda > 0),
///         asin(sqrt|lambda| x)/sqrt|lambda| (lambda < 0), series for tiny |lambda|.
double curvature_map(const Params& params, double x);
double curvature_map_inverse(const Params& params, double q);

/// sinh(sqrt(lambda) q)/cosh^3 (lambda > 0), sin/cos^3 (lambda < 0).
double transformed_force(double lambda, double q);
/// (alpha^2/(2 lambda)) tanh^2(sqrt(lambda) q), or the tan^2 form for lambda < 0.
double transformed_potential(const Params& params, double q);

struct Sample1D {
  double t = 0.0;
  double x = 0.0;
  double v = 0.0;
  double a = 0.0;
};

/// Maps a 1-D trajectory of the oscillator to q(t) (chain rule for q', q'')
/// and returns the max residual of sqrt|lambda| q'' + alpha^2 F(q) = 0
/// (q'' + alpha^2 q at lambda = 0).
double curved_lagrangian_check(const Params& params, std::span<const Sample1D> trajectory);

struct KappaTrig {
  double cos = 1.0;
  double sin = 0.0;
  double tan = 0.0;
};

/// Curvature-tagged Cos_kappa, Sin_kappa, Tan_kappa. Throws TangentPole at Cos_kappa = 0.
KappaTrig kappa_trig(double kappa, double x);
/// Cos_kappa and Sin_kappa only; never throws.
std::pair<double, double> kappa_cos_sin(double kappa, double x);

/// (1/2) omega0^2 Tan_kappa(rho)^2.
double curved_potential(double kappa, double omega0, double rho);

}  // namespace qho
