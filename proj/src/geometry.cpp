#include "qho/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qho/dynamics.hpp"

namespace qho {

namespace {

void require_plane(const Params& params, double x, double y) {
  if (params.dim != 2) throw Error(ErrorCode::DimensionMismatch, "planar geometry needs dim = 2");
  const double pt[2] = {x, y};
  require_in_domain(params, pt);
}

double root_factor(const Params& params, double x, double y) {
  return std::sqrt(params.metric_factor(x * x + y * y));
}

constexpr double kSeriesCutoff = 1e-12;
constexpr double kPoleCos = 1e-14;

}  // namespace

Metric2 metric(const Params& params, double x, double y) {
  require_plane(params, x, y);
  const double lam = params.lambda;
  const double s = params.metric_factor(x * x + y * y);
  return {(1.0 + lam * y * y) / s, -lam * x * y / s, (1.0 + lam * x * x) / s};
}

Vec2 killing_field(const Params& params, KillingLabel label, double x, double y) {
  require_plane(params, x, y);
  switch (label) {
    case KillingLabel::X1: return {root_factor(params, x, y), 0.0};
    case KillingLabel::X2: return {0.0, root_factor(params, x, y)};
    case KillingLabel::XJ: return {-y, x};
  }
  return {0.0, 0.0};
}

Mat2 killing_jacobian(const Params& params, KillingLabel label, double x, double y) {
  require_plane(params, x, y);
  const double rs = root_factor(params, x, y);
  const std::array<double, 2> grad_root = {params.lambda * x / rs, params.lambda * y / rs};
  switch (label) {
    case KillingLabel::X1: return Mat2{{grad_root, {0.0, 0.0}}};
    case KillingLabel::X2: return Mat2{{{0.0, 0.0}, grad_root}};
    case KillingLabel::XJ: return Mat2{{{0.0, -1.0}, {1.0, 0.0}}};
  }
  return {};
}

Vec4 killing_lift(const Params& params, KillingLabel label, double x, double y, double vx,
                  double vy) {
  const Vec2 f = killing_field(params, label, x, y);
  const Mat2 d = killing_jacobian(params, label, x, y);
  return {f[0], f[1], d[0][0] * vx + d[0][1] * vy, d[1][0] * vx + d[1][1] * vy};
}

double kinetic_lie_derivative(const Params& params, KillingLabel label, double x, double y,
                              double vx, double vy) {
  const Vec4 lift = killing_lift(params, label, x, y, vx, vy);
  const double lam = params.lambda;
  const double s = params.metric_factor(x * x + y * y);
  const double xv = x * vx + y * vy;
  // dT/dx_k = -lambda (x.v) v_k / s + lambda^2 (x.v)^2 x_k / s^2 ; dT/dv = p
  const double tx = -lam * xv * vx / s + lam * lam * xv * xv * x / (s * s);
  const double ty = -lam * xv * vy / s + lam * lam * xv * xv * y / (s * s);
  const double px = vx - lam * xv * x / s;
  const double py = vy - lam * xv * y / s;
  return tx * lift[0] + ty * lift[1] + px * lift[2] + py * lift[3];
}

Vec2 lie_bracket(const Params& params, KillingLabel a, KillingLabel b, double x, double y) {
  const Vec2 fa = killing_field(params, a, x, y);
  const Vec2 fb = killing_field(params, b, x, y);
  const Mat2 da = killing_jacobian(params, a, x, y);
  const Mat2 db = killing_jacobian(params, b, x, y);
  Vec2 out{};
  for (int i = 0; i < 2; ++i)
    out[i] = db[i][0] * fa[0] + db[i][1] * fa[1] - (da[i][0] * fb[0] + da[i][1] * fb[1]);
  return out;
}

Vec2 lie_algebra_rhs(const Params& params, KillingLabel a, KillingLabel b, double x, double y) {
  using L = KillingLabel;
  auto field = [&](L l, double c) {
    const Vec2 f = killing_field(params, l, x, y);
    return Vec2{c * f[0], c * f[1]};
  };
  if (a == b) return {0.0, 0.0};
  if (a == L::X1 && b == L::X2) return field(L::XJ, params.lambda);
  if (a == L::X2 && b == L::X1) return field(L::XJ, -params.lambda);
  if (a == L::X1 && b == L::XJ) return field(L::X2, 1.0);
  if (a == L::XJ && b == L::X1) return field(L::X2, -1.0);
  if (a == L::X2 && b == L::XJ) return field(L::X1, -1.0);
  return field(L::X1, 1.0);  // [XJ, X2] = X1
}

Vec2 chart_map(const Chart& chart, ChartDirection dir, Vec2 pt) {
  const double lam = chart.lambda;
  auto root = [&](double u) {
    const double g = 1.0 + lam * u * u;
    if (!(g > 0.0)) throw Error(ErrorCode::OutOfDomain, "1 + lambda u^2 <= 0 in chart map");
    return std::sqrt(g);
  };
  const bool fwd = dir == ChartDirection::Forward;
  switch (chart.kind) {
    case ChartKind::ZxY:
      return fwd ? Vec2{pt[0] / root(pt[1]), pt[1]} : Vec2{pt[0] * root(pt[1]), pt[1]};
    case ChartKind::XZy:
      return fwd ? Vec2{pt[0], pt[1] / root(pt[0])} : Vec2{pt[0], pt[1] * root(pt[0])};
    case ChartKind::Polar:
      if (fwd) {
        const double r = std::hypot(pt[0], pt[1]);
        if (r == 0.0) throw Error(ErrorCode::PolarOrigin, "angle undefined at r = 0");
        return {r, std::atan2(pt[1], pt[0])};
      }
      return {pt[0] * std::cos(pt[1]), pt[0] * std::sin(pt[1])};
  }
  return pt;
}

SeparablePotential oscillator_separable_potential(const Params& params, ChartKind chart) {
  const double lam = params.lambda;
  auto rational = [lam](double u) { return u * u / (1.0 + lam * u * u); };
  switch (chart) {
    case ChartKind::ZxY:
    case ChartKind::XZy: return {chart, rational, rational};
    case ChartKind::Polar: return {chart, rational, [](double) { return 0.0; }};
  }
  return {};
}

SeparableIntegrals separable_invariants(const Chart& chart, const Params& params, ConstVec x,
                                        ConstVec p, const SeparablePotential& potential) {
  if (potential.chart != chart.kind || !potential.w1 || !potential.w2)
    throw Error(ErrorCode::NotSeparableForm, "potential is not written in this chart's form");
  if (chart.lambda != params.lambda)
    throw Error(ErrorCode::NotSeparableForm, "chart and params disagree on lambda");
  require_dim(params, p, "momentum");
  require_plane(params, x[0], x[1]);

  const double lam = params.lambda;
  const double a2 = params.alpha * params.alpha;
  const double r2 = norm2(x);
  const double s = params.metric_factor(r2);
  const double j = x[0] * p[1] - x[1] * p[0];
  const Vec2 q = chart_map(chart, ChartDirection::Forward, {x[0], x[1]});

  switch (chart.kind) {
    case ChartKind::ZxY: {
      const double w1 = potential.w1(q[0]);
      const double gy = lam * x[1] * x[1] / (1.0 + lam * x[1] * x[1]);
      return {s * p[0] * p[0] + a2 * w1,
              s * p[1] * p[1] - lam * j * j + a2 * (potential.w2(x[1]) - gy * w1)};
    }
    case ChartKind::XZy: {
      const double w2 = potential.w2(q[1]);
      const double gx = lam * x[0] * x[0] / (1.0 + lam * x[0] * x[0]);
      return {s * p[0] * p[0] - lam * j * j + a2 * (potential.w1(x[0]) - gx * w2),
              s * p[1] * p[1] + a2 * w2};
    }
    case ChartKind::Polar: {
      const double r = q[0];
      const double pr = (x[0] * p[0] + x[1] * p[1]) / r;
      const double c = (1.0 - r2) / r2;
      const double g = potential.w2(q[1]);
      return {s * pr * pr + c * j * j + a2 * (potential.w1(r) + c * g), j * j + a2 * g};
    }
  }
  return {};
}

double curvature_map(const Params& params, double x) {
  const double lam = params.lambda;
  if (std::abs(lam) < kSeriesCutoff) {
    const double x2 = x * x;
    return x * (1.0 - lam * x2 / 6.0 + 3.0 * lam * lam * x2 * x2 / 40.0);
  }
  const double k = std::sqrt(std::abs(lam));
  if (lam > 0.0) return std::asinh(k * x) / k;
  if (std::abs(k * x) > 1.0)
    throw Error(ErrorCode::OutOfDomain, "|x| exceeds 1/sqrt|lambda| in curvature map");
  return std::asin(k * x) / k;
}

double curvature_map_inverse(const Params& params, double q) {
  const double lam = params.lambda;
  if (std::abs(lam) < kSeriesCutoff) {
    const double q2 = q * q;
    return q * (1.0 + lam * q2 / 6.0 + lam * lam * q2 * q2 / 120.0);
  }
  const double k = std::sqrt(std::abs(lam));
  if (lam > 0.0) return std::sinh(k * q) / k;
  if (std::abs(k * q) > std::numbers::pi / 2.0)
    throw Error(ErrorCode::OutOfDomain, "|q| exceeds pi/(2 sqrt|lambda|)");
  return std::sin(k * q) / k;
}

double transformed_force(double lambda, double q) {
  const double k = std::sqrt(std::abs(lambda));
  const double u = k * q;
  if (lambda > 0.0) {
    const double c = std::cosh(u);
    return std::sinh(u) / (c * c * c);
  }
  if (lambda < 0.0) {
    const double c = std::cos(u);
    return std::sin(u) / (c * c * c);
  }
  return 0.0;
}

double transformed_potential(const Params& params, double q) {
  const double lam = params.lambda;
  const double a2 = params.alpha * params.alpha;
  if (lam == 0.0) return 0.5 * a2 * q * q;
  const double k = std::sqrt(std::abs(lam));
  const double t = lam > 0.0 ? std::tanh(k * q) : std::tan(k * q);
  return a2 * t * t / (2.0 * std::abs(lam));
}

double curved_lagrangian_check(const Params& params, std::span<const Sample1D> trajectory) {
  if (params.dim != 1) throw Error(ErrorCode::DimensionMismatch, "conjugacy check is 1-D");
  const double lam = params.lambda;
  const double a2 = params.alpha * params.alpha;
  const double k = std::sqrt(std::abs(lam));
  double worst = 0.0;
  for (const auto& smp : trajectory) {
    const double pos[1] = {smp.x};
    require_in_domain(params, pos);
    const double g = 1.0 + lam * smp.x * smp.x;
    const double rg = std::sqrt(g);
    const double q = curvature_map(params, smp.x);
    const double qdd = smp.a / rg - lam * smp.x * smp.v * smp.v / (g * rg);
    const double res =
        lam == 0.0 ? qdd + a2 * q : k * qdd + a2 * transformed_force(lam, q);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

std::pair<double, double> kappa_cos_sin(double kappa, double x) {
  if (kappa > 0.0) {
    const double k = std::sqrt(kappa);
    return {std::cos(k * x), std::sin(k * x) / k};
  }
  if (kappa < 0.0) {
    const double k = std::sqrt(-kappa);
    return {std::cosh(k * x), std::sinh(k * x) / k};
  }
  return {1.0, x};
}

KappaTrig kappa_trig(double kappa, double x) {
  const auto [c, s] = kappa_cos_sin(kappa, x);
  if (std::abs(c) < kPoleCos)
    throw Error(ErrorCode::TangentPole, "Cos_kappa vanishes at x = " + std::to_string(x));
  return {c, s, s / c};
}

double curved_potential(double kappa, double omega0, double rho) {
  if (rho < 0.0) throw Error(ErrorCode::OutOfDomain, "rho must be nonnegative");
  if (kappa > 0.0 && std::sqrt(kappa) * rho >= std::numbers::pi / 2.0)
    throw Error(ErrorCode::TangentPole, "rho at or beyond pi/(2 sqrt(kappa))");
  const double t = kappa_trig(kappa, rho).tan;
  return 0.5 * omega0 * omega0 * t * t;
}

}  // namespace qho
