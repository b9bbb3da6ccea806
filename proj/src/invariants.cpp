#include "qho/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "qho/dynamics.hpp"

namespace qho {

namespace {

std::string pair_label(std::size_t i, std::size_t j) {
  if (i < 9 && j < 9) return std::to_string(i + 1) + std::to_string(j + 1);
  return std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

std::pair<std::size_t, std::size_t> parse_pair(std::string_view s, bool allow_single) {
  auto to_index = [&](std::string_view d) -> std::size_t {
    if (d.empty() || !std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; }))
      throw Error(ErrorCode::IndexError, "bad index '" + std::string(s) + "'");
    const std::size_t v = std::stoul(std::string(d));
    if (v == 0) throw Error(ErrorCode::IndexError, "indices are one-based");
    return v - 1;
  };
  if (auto us = s.find('_'); us != std::string_view::npos)
    return {to_index(s.substr(0, us)), to_index(s.substr(us + 1))};
  if (s.size() == 2) return {to_index(s.substr(0, 1)), to_index(s.substr(1, 1))};
  if (allow_single && !s.empty()) {
    const std::size_t k = to_index(s);
    return {k, k};
  }
  throw Error(ErrorCode::IndexError, "expected an index pair in '" + std::string(s) + "'");
}

void require_index(std::size_t i, std::size_t n) {
  if (i >= n)
    throw Error(ErrorCode::IndexError,
                "index " + std::to_string(i) + " out of range for dim " + std::to_string(n));
}

double sqrt_factor(const Params& params, ConstVec x) {
  return std::sqrt(params.metric_factor(norm2(x)));
}

}  // namespace

std::string InvariantId::name() const {
  switch (kind) {
    case InvariantKind::NoetherP: return "P" + std::to_string(i + 1);
    case InvariantKind::AngularJ: return "J" + pair_label(i, j);
    case InvariantKind::QuadraticI: return "I" + pair_label(i, j);
    case InvariantKind::ComplexK: return "K" + std::to_string(i + 1);
    case InvariantKind::KProductRe:
      return "ReK" + std::to_string(i + 1) + "K" + std::to_string(j + 1);
    case InvariantKind::KProductIm:
      return "ImK" + std::to_string(i + 1) + "K" + std::to_string(j + 1);
    case InvariantKind::Energy: return "H";
    case InvariantKind::H1: return "H1";
    case InvariantKind::H2: return "H2";
    case InvariantKind::H3: return "H3";
  }
  return "?";
}

InvariantId InvariantId::parse(std::string_view s) {
  if (s == "H" || s == "E") return {InvariantKind::Energy};
  if (s == "H1") return {InvariantKind::H1};
  if (s == "H2") return {InvariantKind::H2};
  if (s == "H3") return {InvariantKind::H3};
  auto kproduct = [&](std::string_view rest, InvariantKind kind) -> InvariantId {
    // "K<i>K<j>"
    if (rest.empty() || rest[0] != 'K') throw Error(ErrorCode::IndexError, std::string(s));
    const auto k2 = rest.find('K', 1);
    if (k2 == std::string_view::npos) throw Error(ErrorCode::IndexError, std::string(s));
    auto [i, ii] = parse_pair(rest.substr(1, k2 - 1), true);
    auto [j, jj] = parse_pair(rest.substr(k2 + 1), true);
    return {kind, i, j};
  };
  if (s.starts_with("ReK")) return kproduct(s.substr(2), InvariantKind::KProductRe);
  if (s.starts_with("ImK")) return kproduct(s.substr(2), InvariantKind::KProductIm);
  if (s.starts_with("P")) {
    auto [i, ii] = parse_pair(s.substr(1), true);
    return {InvariantKind::NoetherP, i, i};
  }
  if (s.starts_with("K")) {
    auto [i, ii] = parse_pair(s.substr(1), true);
    return {InvariantKind::ComplexK, i, i};
  }
  if (s.starts_with("J")) {
    auto [i, j] = parse_pair(s.substr(1), false);
    if (!(i < j)) throw Error(ErrorCode::IndexError, "J_ij needs i < j: '" + std::string(s) + "'");
    return {InvariantKind::AngularJ, i, j};
  }
  if (s.starts_with("I")) {
    auto [i, j] = parse_pair(s.substr(1), true);
    return {InvariantKind::QuadraticI, i, j};
  }
  throw Error(ErrorCode::IndexError, "unknown invariant '" + std::string(s) + "'");
}

void to_json(nlohmann::json& j, const InvariantId& id) { j = id.name(); }

double noether_p(const Params& params, ConstVec x, ConstVec v, std::size_t i) {
  require_dim(params, v, "velocity");
  require_in_domain(params, x);
  require_index(i, params.dim);
  // (v_i - lambda sum_j J_ij x_j) / sqrt(1 + lambda r^2)
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) sum += (x[i] * v[j] - x[j] * v[i]) * x[j];
  return (v[i] - params.lambda * sum) / sqrt_factor(params, x);
}

double angular_j(ConstVec x, ConstVec w, std::size_t i, std::size_t j) {
  if (x.size() != w.size()) throw Error(ErrorCode::DimensionMismatch, "x and v/p differ");
  if (!(i < j) || j >= x.size())
    throw Error(ErrorCode::IndexError, "J_ij needs 0 <= i < j < n");
  return x[i] * w[j] - x[j] * w[i];
}

std::complex<double> complex_k(const Params& params, ConstVec x, ConstVec v, std::size_t i) {
  const double pi = noether_p(params, x, v, i);
  return {pi, params.alpha * x[i] / sqrt_factor(params, x)};
}

double quadratic_i(const Params& params, ConstVec x, ConstVec p, std::size_t i, std::size_t j) {
  require_dim(params, p, "momentum");
  require_in_domain(params, x);
  require_index(i, params.dim);
  require_index(j, params.dim);
  const double s = params.metric_factor(norm2(x));
  return s * p[i] * p[j] + params.alpha * params.alpha * x[i] * x[j] / s;
}

HamiltonianParts hamiltonian_parts(const Params& params, ConstVec x, ConstVec p) {
  if (params.dim != 2) throw Error(ErrorCode::DimensionMismatch, "H1, H2, H3 need dim = 2");
  const double j = angular_j(x, p, 0, 1);
  return {0.5 * quadratic_i(params, x, p, 0, 0), 0.5 * quadratic_i(params, x, p, 1, 1),
          0.5 * j * j};
}

InvariantValue evaluate(const Params& params, const InvariantId& id, const State& state) {
  const State ps = to_momentum_picture(params, state);
  auto velocity = [&] { return to_velocity_picture(params, state).second; };
  const auto& x = ps.x;
  const auto& p = ps.second;
  InvariantValue out{id, {}};
  switch (id.kind) {
    case InvariantKind::NoetherP: out.value = noether_p(params, x, velocity(), id.i); break;
    case InvariantKind::AngularJ:
      require_dim(params, p, "momentum");
      out.value = angular_j(x, p, id.i, id.j);
      break;
    case InvariantKind::QuadraticI: out.value = quadratic_i(params, x, p, id.i, id.j); break;
    case InvariantKind::ComplexK: out.value = complex_k(params, x, velocity(), id.i); break;
    case InvariantKind::KProductRe:
    case InvariantKind::KProductIm: {
      const Vec v = velocity();
      const auto kij = complex_k(params, x, v, id.i) * std::conj(complex_k(params, x, v, id.j));
      out.value = id.kind == InvariantKind::KProductRe ? kij.real() : kij.imag();
      break;
    }
    case InvariantKind::Energy: out.value = hamiltonian(params, x, p); break;
    case InvariantKind::H1: out.value = hamiltonian_parts(params, x, p).h1; break;
    case InvariantKind::H2: out.value = hamiltonian_parts(params, x, p).h2; break;
    case InvariantKind::H3: out.value = hamiltonian_parts(params, x, p).h3; break;
  }
  return out;
}

double evaluate_real(const Params& params, const InvariantId& id, const State& state) {
  if (id.kind == InvariantKind::ComplexK)
    throw Error(ErrorCode::InvalidConfig, "K_i is complex and not itself conserved");
  return evaluate(params, id, state).value.real();
}

// -- observables -------------------------------------------------------------

Observable operator+(const Observable& a, const Observable& b) {
  Observable out;
  out.name = "(" + a.name + " + " + b.name + ")";
  out.value = [a, b](ConstVec x, ConstVec p) { return a.value(x, p) + b.value(x, p); };
  if (a.gradient && b.gradient)
    out.gradient = [a, b](ConstVec x, ConstVec p, std::span<double> gx, std::span<double> gp) {
      Vec bx(gx.size()), bp(gp.size());
      a.gradient(x, p, gx, gp);
      b.gradient(x, p, bx, bp);
      for (std::size_t k = 0; k < gx.size(); ++k) {
        gx[k] += bx[k];
        gp[k] += bp[k];
      }
    };
  return out;
}

Observable operator*(double c, const Observable& a) {
  Observable out;
  out.name = std::to_string(c) + "*" + a.name;
  out.value = [a, c](ConstVec x, ConstVec p) { return c * a.value(x, p); };
  if (a.gradient)
    out.gradient = [a, c](ConstVec x, ConstVec p, std::span<double> gx, std::span<double> gp) {
      a.gradient(x, p, gx, gp);
      for (double& g : gx) g *= c;
      for (double& g : gp) g *= c;
    };
  return out;
}

Observable operator-(const Observable& a, const Observable& b) {
  Observable out = a + (-1.0) * b;
  out.name = "(" + a.name + " - " + b.name + ")";
  return out;
}

Observable square(const Observable& a) {
  Observable out;
  out.name = a.name + "^2";
  out.value = [a](ConstVec x, ConstVec p) {
    const double v = a.value(x, p);
    return v * v;
  };
  if (a.gradient)
    out.gradient = [a](ConstVec x, ConstVec p, std::span<double> gx, std::span<double> gp) {
      const double v = a.value(x, p);
      a.gradient(x, p, gx, gp);
      for (double& g : gx) g *= 2.0 * v;
      for (double& g : gp) g *= 2.0 * v;
    };
  return out;
}

Observable hamiltonian_observable(const Params& params) {
  Observable h;
  h.name = "H";
  h.value = [params](ConstVec x, ConstVec p) {
    const double xp = dot(x, p);
    const double r2 = norm2(x);
    return 0.5 * (norm2(p) + params.lambda * xp * xp) +
           0.5 * params.alpha * params.alpha * r2 / params.metric_factor(r2);
  };
  h.gradient = [params](ConstVec x, ConstVec p, std::span<double> gx, std::span<double> gp) {
    const double lam = params.lambda;
    const double xp = dot(x, p);
    const double s = params.metric_factor(norm2(x));
    const double pull = params.alpha * params.alpha / (s * s);
    for (std::size_t k = 0; k < x.size(); ++k) {
      gx[k] = lam * xp * p[k] + pull * x[k];
      gp[k] = p[k] + lam * xp * x[k];
    }
  };
  return h;
}

Observable quadratic_observable(const Params& params, std::size_t i, std::size_t j) {
  require_index(i, params.dim);
  require_index(j, params.dim);
  Observable q;
  q.name = i == j ? "I" + std::to_string(i + 1) : "I" + pair_label(i, j);
  q.value = [params, i, j](ConstVec x, ConstVec p) {
    const double s = params.metric_factor(norm2(x));
    return s * p[i] * p[j] + params.alpha * params.alpha * x[i] * x[j] / s;
  };
  q.gradient = [params, i, j](ConstVec x, ConstVec p, std::span<double> gx,
                              std::span<double> gp) {
    const double lam = params.lambda;
    const double a2 = params.alpha * params.alpha;
    const double s = params.metric_factor(norm2(x));
    const double pp = p[i] * p[j];
    const double xx = x[i] * x[j];
    for (std::size_t k = 0; k < x.size(); ++k) {
      gx[k] = 2.0 * lam * x[k] * pp - 2.0 * lam * x[k] * a2 * xx / (s * s);
      gp[k] = 0.0;
    }
    gx[i] += a2 * x[j] / s;
    gx[j] += a2 * x[i] / s;
    gp[i] += s * p[j];
    gp[j] += s * p[i];
  };
  return q;
}

Observable angular_observable(std::size_t i, std::size_t j) {
  Observable a;
  a.name = "J" + pair_label(i, j);
  a.value = [i, j](ConstVec x, ConstVec p) { return x[i] * p[j] - x[j] * p[i]; };
  a.gradient = [i, j](ConstVec x, ConstVec p, std::span<double> gx, std::span<double> gp) {
    std::fill(gx.begin(), gx.end(), 0.0);
    std::fill(gp.begin(), gp.end(), 0.0);
    gx[i] += p[j];
    gx[j] -= p[i];
    gp[j] += x[i];
    gp[i] -= x[j];
  };
  return a;
}

Observable position_observable(std::size_t i) {
  Observable o;
  o.name = "x" + std::to_string(i + 1);
  o.value = [i](ConstVec x, ConstVec) { return x[i]; };
  o.gradient = [i](ConstVec, ConstVec, std::span<double> gx, std::span<double> gp) {
    std::fill(gx.begin(), gx.end(), 0.0);
    std::fill(gp.begin(), gp.end(), 0.0);
    gx[i] = 1.0;
  };
  return o;
}

Observable momentum_observable(std::size_t i) {
  Observable o;
  o.name = "p" + std::to_string(i + 1);
  o.value = [i](ConstVec, ConstVec p) { return p[i]; };
  o.gradient = [i](ConstVec, ConstVec, std::span<double> gx, std::span<double> gp) {
    std::fill(gx.begin(), gx.end(), 0.0);
    std::fill(gp.begin(), gp.end(), 0.0);
    gp[i] = 1.0;
  };
  return o;
}

Observable observable_for(const Params& params, const InvariantId& id) {
  switch (id.kind) {
    case InvariantKind::Energy: return hamiltonian_observable(params);
    case InvariantKind::QuadraticI: return quadratic_observable(params, id.i, id.j);
    case InvariantKind::AngularJ:
      require_index(id.j, params.dim);
      return angular_observable(id.i, id.j);
    case InvariantKind::KProductRe: return quadratic_observable(params, id.i, id.j);
    case InvariantKind::KProductIm: {
      require_index(id.j, params.dim);
      Observable o = params.alpha * angular_observable(id.i, id.j);
      o.name = id.name();
      return o;
    }
    case InvariantKind::H1:
    case InvariantKind::H2: {
      if (params.dim != 2) throw Error(ErrorCode::DimensionMismatch, "H1/H2 need dim = 2");
      const std::size_t k = id.kind == InvariantKind::H1 ? 0 : 1;
      Observable o = 0.5 * quadratic_observable(params, k, k);
      o.name = id.name();
      return o;
    }
    case InvariantKind::H3: {
      if (params.dim != 2) throw Error(ErrorCode::DimensionMismatch, "H3 needs dim = 2");
      Observable o = 0.5 * square(angular_observable(0, 1));
      o.name = "H3";
      return o;
    }
    case InvariantKind::NoetherP:
    case InvariantKind::ComplexK: {
      Observable o;
      o.name = id.name();
      const InvariantId copy = id;
      o.value = [params, copy](ConstVec x, ConstVec p) {
        State s{Vec(x.begin(), x.end()), Vec(p.begin(), p.end()), Picture::Momentum};
        return evaluate(params, copy, s).value.real();
      };
      return o;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "no observable for " + id.name());
}

Gradient gradient_fd(const Params& params, const Observable& f, ConstVec x, ConstVec p) {
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  const std::size_t n = x.size();
  Gradient g{Vec(n), Vec(n)};
  Vec xs(x.begin(), x.end()), ps(p.begin(), p.end());
  for (std::size_t k = 0; k < n; ++k) {
    const double hx = cbrt_eps * std::max(1.0, std::abs(x[k]));
    xs[k] = x[k] + hx;
    require_in_domain(params, xs);
    const double fp = f.value(xs, ps);
    xs[k] = x[k] - hx;
    require_in_domain(params, xs);
    const double fm = f.value(xs, ps);
    xs[k] = x[k];
    g.gx[k] = (fp - fm) / (2.0 * hx);

    const double hp = cbrt_eps * std::max(1.0, std::abs(p[k]));
    ps[k] = p[k] + hp;
    const double gp_plus = f.value(xs, ps);
    ps[k] = p[k] - hp;
    const double gp_minus = f.value(xs, ps);
    ps[k] = p[k];
    g.gp[k] = (gp_plus - gp_minus) / (2.0 * hp);
  }
  return g;
}

Gradient gradient(const Params& params, const Observable& f, ConstVec x, ConstVec p,
                  BracketMode mode) {
  if (mode == BracketMode::Auto && f.gradient) {
    require_in_domain(params, x);
    Gradient g{Vec(x.size()), Vec(x.size())};
    f.gradient(x, p, g.gx, g.gp);
    return g;
  }
  return gradient_fd(params, f, x, p);
}

double poisson_bracket(const Observable& f, const Observable& g, ConstVec x, ConstVec p,
                       const Params& params, BracketMode mode) {
  require_dim(params, x, "position");
  require_dim(params, p, "momentum");
  const Gradient df = gradient(params, f, x, p, mode);
  const Gradient dg = gradient(params, g, x, p, mode);
  double b = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) b += df.gx[k] * dg.gp[k] - df.gp[k] * dg.gx[k];
  return b;
}

std::vector<std::vector<Observable>> involutive_sets_n3(const Params& params) {
  if (params.dim != 3) throw Error(ErrorCode::DimensionMismatch, "involutive sets need dim = 3");
  const double lam = params.lambda;
  const Observable i1 = quadratic_observable(params, 0, 0);
  const Observable i2 = quadratic_observable(params, 1, 1);
  const Observable i3 = quadratic_observable(params, 2, 2);
  const Observable j12 = square(angular_observable(0, 1));
  const Observable j23 = square(angular_observable(1, 2));
  const Observable j31 = square(angular_observable(2, 0));

  std::vector<std::vector<Observable>> sets;
  sets.push_back({i1, i2 - lam * j12, i3 - lam * (j23 + j31)});
  sets.push_back({i1 - lam * (j12 + j31), i2, i3 - lam * j23});
  sets.push_back({i1 - lam * j31, i2 - lam * (j12 + j23), i3});
  Observable total_j2 = j12 + j23 + j31;
  total_j2.name = "J^2";
  sets.push_back({i1 + i2 + i3, angular_observable(0, 1), total_j2});
  return sets;
}

std::vector<Observable> fundamental_set(const Params& params) {
  std::vector<Observable> out;
  for (std::size_t k = 0; k < params.dim; ++k) out.push_back(quadratic_observable(params, k, k));
  for (std::size_t i = 0; i + 1 < params.dim; ++i) out.push_back(angular_observable(i, i + 1));
  return out;
}

std::size_t jacobian_rank(const Params& params, const std::vector<Observable>& obs, ConstVec x,
                          ConstVec p, double rel_tol) {
  const std::size_t n = x.size();
  Eigen::MatrixXd jac(obs.size(), 2 * n);
  for (std::size_t r = 0; r < obs.size(); ++r) {
    const Gradient g = gradient(params, obs[r], x, p);
    for (std::size_t k = 0; k < n; ++k) {
      jac(r, k) = g.gx[k];
      jac(r, n + k) = g.gp[k];
    }
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > rel_tol * sv(0)) ++rank;
  return rank;
}

}  // namespace qho
