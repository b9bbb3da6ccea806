#include "qho/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>

#include "qho/closed_form.hpp"
#include "qho/dynamics.hpp"
#include "qho/geometry.hpp"
#include "qho/integrate.hpp"
#include "qho/invariants.hpp"
#include "qho/profile.hpp"

namespace qho {

bool Measurement::pass() const {
  if (!std::isfinite(measured)) return false;
  switch (relation) {
    case Relation::LessEqual: return measured <= bound;
    case Relation::LessThan: return measured < bound;
    case Relation::GreaterThan: return measured > bound;
  }
  return false;
}

bool CriterionResult::pass() const {
  if (!error.empty() || measurements.empty()) return false;
  return std::all_of(measurements.begin(), measurements.end(),
                     [](const Measurement& m) { return m.pass(); });
}

bool VerifyReport::pass() const {
  return std::all_of(criteria.begin(), criteria.end(),
                     [](const CriterionResult& c) { return c.pass(); });
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Rng {
  std::mt19937_64 eng;
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng);
  }
};

// Separate stream per criterion so --only does not shift the others.
Rng rng_for(std::uint64_t seed, int criterion) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(criterion)};
  return Rng{std::mt19937_64(seq)};
}

IntegratorConfig tight(double t1) {
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  c.t1 = t1;
  return c;
}

struct Sampled {
  Vec x;
  Vec p;
};

// Random phase-space point: |x| well inside the disc for lambda < 0.
Sampled random_state(Rng& rng, const Params& params, double xscale = 1.5, double pscale = 1.5) {
  const std::size_t n = params.dim;
  Sampled s{Vec(n), Vec(n)};
  for (;;) {
    for (auto& v : s.x) v = rng.uniform(-xscale, xscale);
    if (params.lambda < 0.0) {
      const double rmax = 0.9 * params.domain_radius().value;
      const double r = std::sqrt(norm2(s.x));
      const double target = rng.uniform(0.0, rmax);
      if (r > 0.0)
        for (auto& v : s.x) v *= target / r;
    }
    if (in_domain(params, s.x)) break;
  }
  for (auto& v : s.p) v = rng.uniform(-pscale, pscale);
  return s;
}

ClosedFormSolution random_trig(Rng& rng, const Params& params) {
  for (;;) {
    const std::size_t n = params.dim;
    Vec a(n), phi(n);
    for (auto& v : a) v = rng.uniform(0.2, 1.2);
    for (auto& v : phi) v = rng.uniform(0.0, kTwoPi);
    if (params.lambda < 0.0) {
      const double target = rng.uniform(0.1, 0.8) / -params.lambda;
      const double c = std::sqrt(target / trig_max_radius_sq(a, phi));
      for (auto& v : a) v *= c;
    }
    try {
      return make_trig_solution(params, a, phi);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonPositiveM) throw;
    }
  }
}

ClosedFormSolution random_hyper(Rng& rng, const Params& params) {
  const std::size_t n = params.dim;
  Vec a(n), phi(n);
  for (auto& v : a) v = rng.uniform(0.2, 1.2);
  for (auto& v : phi) v = rng.uniform(-1.0, 1.0);
  // lambda sum A^2 in [1.2, 3] keeps lambda P_h - 1 away from zero
  const double c = std::sqrt(rng.uniform(1.2, 3.0) / (params.lambda * norm2(a)));
  for (auto& v : a) v *= c;
  return make_hyper_solution(params, a, phi);
}

ClosedFormSolution random_linear(Rng& rng, const Params& params) {
  const std::size_t n = params.dim;
  Vec s(n), b(n);
  for (auto& v : s) v = rng.uniform(-1.0, 1.0);
  for (auto& v : b) v = rng.uniform(-1.0, 1.0);
  return scale_to_border(params, s, b);
}

// Free hyperbolic motion; params.alpha must already be zero.
ClosedFormSolution random_free_hyper(Rng& rng, const Params& params) {
  const double energy = rng.uniform(0.2, 1.0);
  if (params.dim == 1) {
    const Vec off{rng.uniform(-1.0, 1.0)};
    return free_solution(params, energy, std::sqrt(2.0 * energy), 0.0, off);
  }
  const double c = std::sqrt(2.0 * params.lambda * energy);
  const Vec off{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
  const double d = c * (off[0] - off[1]);
  const double ax2 = rng.uniform(0.1, 0.9);
  const double ay2 = (1.0 - ax2) / (1.0 + ax2 * std::sinh(d) * std::sinh(d));
  const double p2 = std::sqrt(2.0 * energy * (1.0 - ax2));
  const double p1 = std::sqrt(2.0 * energy * (1.0 - ay2));
  return free_solution(params, energy, p1, p2, off);
}

std::vector<InvariantId> k_products() {
  return {{InvariantKind::KProductRe, 0, 0},
          {InvariantKind::KProductRe, 1, 1},
          {InvariantKind::KProductRe, 0, 1},
          {InvariantKind::KProductIm, 0, 1}};
}

double radius(const State& s) { return std::sqrt(norm2(s.x)); }

// Finite-difference bracket error scaled by |grad f| |grad g| (analytic gradients):
// the cross-check stays meaningful for the quartic observables.
double fd_bracket_error(const Params& params, const Observable& f, const Observable& g,
                        const Sampled& s) {
  const double exact = poisson_bracket(f, g, s.x, s.p, params);
  const double fd = poisson_bracket(f, g, s.x, s.p, params, BracketMode::FiniteDifference);
  auto gnorm = [&](const Observable& o) {
    const Gradient gr = gradient(params, o, s.x, s.p);
    return std::sqrt(norm2(gr.gx) + norm2(gr.gp));
  };
  return std::abs(fd - exact) / std::max(1.0, gnorm(f) * gnorm(g));
}

// max |r_i - (c0 + c1 t_i)| for the least-squares line through (t, r)
double affine_residual(ConstVec t, ConstVec r) {
  const double m = static_cast<double>(t.size());
  double st = 0, sr = 0, stt = 0, str = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sr += r[i];
    stt += t[i] * t[i];
    str += t[i] * r[i];
  }
  const double slope = (m * str - st * sr) / (m * stt - st * st);
  const double icpt = (sr - slope * st) / m;
  double worst = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    worst = std::max(worst, std::abs(r[i] - (icpt + slope * t[i])));
  return worst;
}

using Runner = std::function<void(CriterionResult&, Rng&, std::size_t)>;

struct Criterion {
  int id;
  const char* claim;
  std::size_t default_cases;
  Runner run;
};

// -- 1 -------------------------------------------------------------------------
void frequency_amplitude(CriterionResult& out, Rng& rng, std::size_t cases) {
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Params params = validate_params(rng.uniform(-0.9, 3.0), rng.uniform(0.5, 2.0),
                                          static_cast<long long>(rng.pick(1, 3)));
    const ClosedFormSolution sol = random_trig(rng, params);
    const double expected = kTwoPi / sol.rate;
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.t1 = 3.25 * expected;
    const Trajectory traj = integrate(params, eval(sol, 0.0), cfg);
    const auto big = static_cast<std::size_t>(
        std::max_element(sol.amplitudes.begin(), sol.amplitudes.end()) - sol.amplitudes.begin());
    const double measured = estimate_period(traj, big);
    worst = std::max(worst, std::abs(measured - expected) / expected);
  }
  out.measurements.push_back({"max relative period error", worst, 1e-4});
}

// -- 2 -------------------------------------------------------------------------
void superintegrability(CriterionResult& out, Rng& rng, std::size_t cases) {
  for (double lam : {-0.5, 0.0, 1.0}) {
    const Params params = validate_params(lam, 1.0, 2);
    const Observable h = hamiltonian_observable(params);
    const std::vector<Observable> partners = {quadratic_observable(params, 0, 0),
                                              quadratic_observable(params, 1, 1),
                                              angular_observable(0, 1)};
    double analytic = 0.0, fd = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
      const Sampled s = random_state(rng, params);
      for (const auto& g : partners) {
        analytic = std::max(analytic, std::abs(poisson_bracket(h, g, s.x, s.p, params)));
        fd = std::max(fd, fd_bracket_error(params, h, g, s));
      }
    }
    char label[64];
    std::snprintf(label, sizeof label, "lambda=%g analytic", lam);
    out.measurements.push_back({label, analytic, 1e-7});
    std::snprintf(label, sizeof label, "lambda=%g finite-diff vs analytic, scaled", lam);
    out.measurements.push_back({label, fd, 1e-7});
  }
}

// -- 3 -------------------------------------------------------------------------
void complex_factorization(CriterionResult& out, Rng& rng, std::size_t cases) {
  const double lambdas[] = {-0.5, 0.5, 1.0, 2.0};
  double worst = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Params params = validate_params(lambdas[c % 4], rng.uniform(0.5, 2.0), 2);
    const ClosedFormSolution sol = random_trig(rng, params);
    const Trajectory traj =
        integrate(params, eval(sol, 0.0), tight(20.0 * kTwoPi / sol.rate), k_products());
    for (double d : traj.drift) worst = std::max(worst, d);
  }
  out.measurements.push_back({"max relative drift over 20 periods", worst, 1e-8});
}

// -- 4 -------------------------------------------------------------------------
void regime_trichotomy(CriterionResult& out, Rng&, std::size_t) {
  const Params params = validate_params(1.0, 1.0, 2);
  auto regime_ok = [&](const State& s, Regime want) {
    const State m = to_momentum_picture(params, s);
    return classify_regime(params, hamiltonian(params, m.x, m.second)) == want ? 0.0 : 1.0;
  };

  // E = 0.4: x = 0, p = (sqrt(0.8), 0); A^2 = 4, omega^2 = 1/5
  {
    const State s{{0.0, 0.0}, {std::sqrt(0.8), 0.0}, Picture::Momentum};
    const double expected = kTwoPi * std::sqrt(5.0);
    const Trajectory traj = integrate(params, s, tight(3.25 * expected));
    double rmax = 0.0;
    for (const auto& st : traj.states) rmax = std::max(rmax, radius(st));
    out.measurements.push_back({"E=0.4 classified bounded (mismatch)", regime_ok(s, Regime::Bounded), 0.0});
    out.measurements.push_back(
        {"E=0.4 relative period error", std::abs(estimate_period(traj, 0) - expected) / expected,
         1e-6});
    out.measurements.push_back({"E=0.4 max r - A", rmax - 2.0, 1e-9});
  }
  // E = 0.5: x = (0.5, 0), v = (1, 0); r = 0.5 + t
  {
    const State s{{0.5, 0.0}, {1.0, 0.0}, Picture::Velocity};
    const Trajectory traj = integrate(params, s, tight(10.0));
    Vec r;
    for (const auto& st : traj.states) r.push_back(radius(st));
    out.measurements.push_back({"E=0.5 classified border (mismatch)", regime_ok(s, Regime::Border), 0.0});
    out.measurements.push_back({"E=0.5 affine fit residual of r(t)", affine_residual(traj.times, r), 1e-6});
  }
  // E = 0.6: x = 0, p = (sqrt(1.2), 0); r = sqrt(6) sinh(t / sqrt(5))
  {
    const State s{{0.0, 0.0}, {std::sqrt(1.2), 0.0}, Picture::Momentum};
    const Trajectory traj = integrate(params, s, tight(10.0));
    Vec r;
    double dev = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      r.push_back(radius(traj.states[i]));
      const double law = std::sqrt(6.0) * std::sinh(traj.times[i] / std::sqrt(5.0));
      dev = std::max(dev, std::abs(r.back() - law) / std::max(1.0, law));
    }
    out.measurements.push_back({"E=0.6 classified unbounded (mismatch)", regime_ok(s, Regime::Unbounded), 0.0});
    out.measurements.push_back({"E=0.6 deviation from A sinh(Omega t)", dev, 1e-6});
    out.measurements.push_back({"E=0.6 affine fit residual (must be large)",
                                affine_residual(traj.times, r), 1e-3, Relation::GreaterThan});
  }
}

// -- 5 -------------------------------------------------------------------------
void energy_bound(CriterionResult& out, Rng& rng, std::size_t cases) {
  double trig_ratio = 0.0, hyper_ratio = std::numeric_limits<double>::infinity(), cross = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Params params = validate_params(rng.uniform(0.1, 3.0), rng.uniform(0.5, 2.0),
                                          static_cast<long long>(rng.pick(1, 3)));
    const double border = params.alpha * params.alpha / (2.0 * params.lambda);
    Vec a(params.dim), phi(params.dim);
    for (auto& v : a) v = rng.uniform(0.05, 3.0);
    for (auto& v : phi) v = rng.uniform(0.0, kTwoPi);
    const ClosedFormSolution trig = make_trig_solution(params, a, phi);
    const ClosedFormSolution hyp = random_hyper(rng, params);
    trig_ratio = std::max(trig_ratio, solution_energy(params, trig) / border);
    hyper_ratio = std::min(hyper_ratio, solution_energy(params, hyp) / border);
    for (const auto* sol : {&trig, &hyp}) {
      const State m = to_momentum_picture(params, eval(*sol, 0.3));
      const double e = solution_energy(params, *sol);
      cross = std::max(cross, std::abs(hamiltonian(params, m.x, m.second) - e) / e);
    }
  }
  out.measurements.push_back({"max E_trig / (alpha^2/2lambda)", trig_ratio, 1.0, Relation::LessThan});
  out.measurements.push_back({"min E_hyper / (alpha^2/2lambda)", hyper_ratio, 1.0, Relation::GreaterThan});
  out.measurements.push_back({"closed-form energy vs H along solution", cross, 1e-10});
}

// -- 6 -------------------------------------------------------------------------
void lie_algebra(CriterionResult& out, Rng& rng, std::size_t cases) {
  using L = KillingLabel;
  const std::pair<L, L> pairs[] = {{L::X1, L::X2}, {L::X1, L::XJ}, {L::X2, L::XJ}};
  double worst = 0.0, zero_bracket = 0.0, lie_t = 0.0;
  for (double lam : {-0.5, 0.0, 1.0, 2.0}) {
    const Params params = validate_params(lam, 1.0, 2);
    for (std::size_t c = 0; c < cases; ++c) {
      const Sampled s = random_state(rng, params);
      for (const auto& [a, b] : pairs) {
        const Vec2 lhs = lie_bracket(params, a, b, s.x[0], s.x[1]);
        const Vec2 rhs = lie_algebra_rhs(params, a, b, s.x[0], s.x[1]);
        worst = std::max({worst, std::abs(lhs[0] - rhs[0]), std::abs(lhs[1] - rhs[1])});
        if (lam == 0.0 && a == L::X1 && b == L::X2)
          zero_bracket = std::max({zero_bracket, std::abs(lhs[0]), std::abs(lhs[1])});
      }
      const Vec v = to_velocities(params, s.x, s.p);
      for (L l : {L::X1, L::X2, L::XJ})
        lie_t = std::max(lie_t, std::abs(kinetic_lie_derivative(params, l, s.x[0], s.x[1], v[0], v[1])));
    }
  }
  out.measurements.push_back({"max |[Xa,Xb] - structure rhs|", worst, 1e-12});
  out.measurements.push_back({"lambda=0 |[X1,X2]|", zero_bracket, 1e-12});
  out.measurements.push_back({"max |lift(X) T|", lie_t, 1e-12});
}

// -- 7 -------------------------------------------------------------------------
void decompositions(CriterionResult& out, Rng& rng, std::size_t cases) {
  double quad = 0.0, split = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Params params = validate_params(rng.uniform(-0.9, 2.0), rng.uniform(0.5, 2.0),
                                          static_cast<long long>(rng.pick(2, 4)));
    const Sampled s = random_state(rng, params);
    const double h = hamiltonian(params, s.x, s.p);
    double sum = 0.0;
    for (std::size_t k = 0; k < params.dim; ++k) sum += 0.5 * quadratic_i(params, s.x, s.p, k, k);
    for (std::size_t i = 0; i < params.dim; ++i)
      for (std::size_t j = i + 1; j < params.dim; ++j) {
        const double jij = angular_j(s.x, s.p, i, j);
        sum -= 0.5 * params.lambda * jij * jij;
      }
    quad = std::max(quad, std::abs(h - sum) / std::max(1.0, std::abs(h)));

    const Params p2 = validate_params(params.lambda, params.alpha, 2);
    const Sampled s2 = random_state(rng, p2);
    const HamiltonianParts hp = hamiltonian_parts(p2, s2.x, s2.p);
    const double h2 = hamiltonian(p2, s2.x, s2.p);
    split = std::max(split, std::abs(h2 - (hp.h1 + hp.h2 - p2.lambda * hp.h3)) /
                                std::max(1.0, std::abs(h2)));
  }
  out.measurements.push_back({"H - (sum I_k/2 - lambda/2 sum J^2)", quad, 1e-12});
  out.measurements.push_back({"H - (H1 + H2 - lambda H3), n=2", split, 1e-12});
}

// -- 8 -------------------------------------------------------------------------
void involutive_sets(CriterionResult& out, Rng& rng, std::size_t cases) {
  const double lambdas[] = {-0.5, 0.7, 1.5};
  double analytic = 0.0, fd = 0.0;
  for (std::size_t c = 0; c < cases; ++c) {
    const Params params = validate_params(lambdas[c % 3], rng.uniform(0.5, 2.0), 3);
    const Sampled s = random_state(rng, params, 1.0, 1.0);
    for (const auto& set : involutive_sets_n3(params))
      for (std::size_t a = 0; a < set.size(); ++a)
        for (std::size_t b = a + 1; b < set.size(); ++b) {
          analytic = std::max(analytic, std::abs(poisson_bracket(set[a], set[b], s.x, s.p, params)));
          fd = std::max(fd, fd_bracket_error(params, set[a], set[b], s));
        }
  }
  out.measurements.push_back({"max pairwise bracket, analytic", analytic, 1e-7});
  out.measurements.push_back({"finite-diff vs analytic, scaled", fd, 1e-7});
}

// -- 9 -------------------------------------------------------------------------
void conjugacy(CriterionResult& out, Rng&, std::size_t) {
  for (double lam : {1.0, -1.0}) {
    const Params params = validate_params(lam, 1.0, 1);
    const ClosedFormSolution sol = make_trig_solution(params, {lam > 0 ? 1.0 : 0.6}, {0.3});
    const Trajectory traj = integrate(params, eval(sol, 0.0), tight(2.0 * kTwoPi / sol.rate));
    std::vector<Sample1D> samples;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const auto& st = traj.states[i];
      const Vec v = to_velocities(params, st.x, st.second);
      samples.push_back({traj.times[i], st.x[0], v[0], force(params, st.x, v)[0]});
    }
    char label[64];
    std::snprintf(label, sizeof label, "lambda=%g transformed EOM residual", lam);
    out.measurements.push_back({label, curved_lagrangian_check(params, samples), 1e-8});

    // V(x(q)) against the closed tanh^2 / tan^2 form
    const double qmax = lam > 0 ? 3.0 : 0.95 * std::numbers::pi / 2.0;
    double dev = 0.0;
    for (int k = -100; k <= 100; ++k) {
      const double q = qmax * k / 100.0;
      const double x = curvature_map_inverse(params, q);
      const double pos[1] = {x};
      if (!in_domain(params, pos)) continue;
      const double v = potential_energy(params, pos);
      dev = std::max(dev, std::abs(transformed_potential(params, q) - v) / std::max(1.0, v));
    }
    std::snprintf(label, sizeof label, "lambda=%g transformed potential", lam);
    out.measurements.push_back({label, dev, 1e-12});
  }
}

// -- 10 ------------------------------------------------------------------------
void independence(CriterionResult& out, Rng& rng, std::size_t cases) {
  for (long long n : {2, 3}) {
    double deficit = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
      const Params params = validate_params(rng.uniform(-0.9, 2.0), rng.uniform(0.5, 2.0), n);
      const Sampled s = random_state(rng, params);
      const auto rank = static_cast<double>(jacobian_rank(params, fundamental_set(params), s.x, s.p));
      deficit = std::max(deficit, std::abs(rank - static_cast<double>(2 * n - 1)));
    }
    out.measurements.push_back({"n=" + std::to_string(n) + " |rank - (2n-1)|", deficit, 0.0});
  }
}

// -- 11 ------------------------------------------------------------------------
void analytic_vs_numeric(CriterionResult& out, Rng& rng, std::size_t cases) {
  const SolutionRegime cycle[] = {SolutionRegime::TrigBounded, SolutionRegime::HyperUnbounded,
                                  SolutionRegime::LinearBorder, SolutionRegime::FreeHyper};
  double worst[4] = {0, 0, 0, 0};
  bool seen[4] = {false, false, false, false};
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t kind = c % 4;
    const auto dim = static_cast<long long>(rng.pick(1, 3));
    ClosedFormSolution sol;
    Params params;
    double t1 = 0.0;
    switch (cycle[kind]) {
      case SolutionRegime::TrigBounded:
        params = validate_params(rng.uniform(-0.9, 3.0), rng.uniform(0.5, 2.0), dim);
        sol = random_trig(rng, params);
        t1 = kTwoPi / sol.rate;
        break;
      case SolutionRegime::HyperUnbounded:
        params = validate_params(rng.uniform(0.2, 2.0), rng.uniform(0.5, 2.0), dim);
        sol = random_hyper(rng, params);
        t1 = 3.0 / sol.rate;
        break;
      case SolutionRegime::LinearBorder:
        params = validate_params(rng.uniform(0.2, 2.0), rng.uniform(0.5, 2.0), dim);
        sol = random_linear(rng, params);
        t1 = 5.0;
        break;
      default:
        params = validate_params(rng.uniform(0.2, 2.0), 1.0, std::min(dim, 2LL));
        params.alpha = 0.0;
        sol = random_free_hyper(rng, params);
        t1 = 3.0 / sol.rate;
        break;
    }
    const Trajectory traj = integrate(params, eval(sol, 0.0), tight(t1));
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const Kinematics k = eval_kinematics(sol, traj.times[i]);
      double scale = 1.0, diff = 0.0;
      for (std::size_t d = 0; d < k.x.size(); ++d) {
        scale = std::max(scale, std::abs(k.x[d]));
        diff = std::max(diff, std::abs(k.x[d] - traj.states[i].x[d]));
      }
      worst[kind] = std::max(worst[kind], diff / scale);
    }
    seen[kind] = true;
  }
  for (std::size_t k = 0; k < 4; ++k)
    if (seen[k])
      out.measurements.push_back(
          {std::string(to_string(cycle[k])) + " max pointwise error", worst[k], 1e-7});
}

// -- 12 ------------------------------------------------------------------------
void figures(CriterionResult& out, Rng&, std::size_t) {
  auto monotone_violations = [](const ProfileTable& t) {
    double bad = 0.0;
    for (std::size_t i = 1; i < t.rows.size(); ++i)
      if (t.rows[i].value < t.rows[i - 1].value) bad += 1.0;
    return bad;
  };
  // v1d with lambda in {1, 2} and the radial profile with lambda = 1 approach alpha^2/(2 lambda)
  struct Case {
    ProfileKind kind;
    double lambda;
  };
  for (const Case c : {Case{ProfileKind::V1D, 1.0}, Case{ProfileKind::V1D, 2.0},
                       Case{ProfileKind::V2DRadial, 1.0}}) {
    ProfileSpec spec;
    spec.kind = c.kind;
    spec.curvature = c.lambda;
    spec.from = 0.0;
    spec.to = 1e3;
    spec.count = 1001;
    const ProfileTable t = profile(spec);
    char label[96];
    std::snprintf(label, sizeof label, "%s lambda=%g monotone violations",
                  std::string(to_string(c.kind)).c_str(), c.lambda);
    out.measurements.push_back({label, monotone_violations(t), 0.0});
    std::snprintf(label, sizeof label, "%s lambda=%g |V(1e3) - alpha^2/(2 lambda)|",
                  std::string(to_string(c.kind)).c_str(), c.lambda);
    out.measurements.push_back({label, std::abs(t.rows.back().value - 0.5 / c.lambda), 1e-9});
  }
  // radial lambda in {-1, 0}: monotone on the admissible range
  for (double lam : {-1.0, 0.0}) {
    ProfileSpec spec;
    spec.kind = ProfileKind::V2DRadial;
    spec.curvature = lam;
    spec.to = lam < 0 ? 0.999 : 3.0;
    char label[96];
    std::snprintf(label, sizeof label, "v2d-radial lambda=%g monotone violations", lam);
    out.measurements.push_back({label, monotone_violations(profile(spec)), 0.0});
  }
  ProfileSpec wall;
  wall.kind = ProfileKind::Curved;
  wall.curvature = 1.0;
  wall.points = {std::numbers::pi / 2.0 - 1e-3};
  const ProfileTable t = profile(wall);
  out.measurements.push_back({"curved kappa=1 U(pi/2 - 1e-3), omega0=1",
                              t.rows.empty() ? 0.0 : t.rows.front().value, 1e6,
                              Relation::GreaterThan});
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "frequency-amplitude law omega^2 = alpha^2/M", 200, frequency_amplitude},
      {2, "superintegrability: {H,I1}, {H,I2}, {H,J} vanish", 500, superintegrability},
      {3, "K_i K_j* products conserved", 12, complex_factorization},
      {4, "regime trichotomy at alpha = lambda = 1", 1, regime_trichotomy},
      {5, "energies below/above alpha^2/(2 lambda)", 200, energy_bound},
      {6, "Killing fields close the lambda-deformed algebra", 500, lie_algebra},
      {7, "Hamiltonian decompositions", 1000, decompositions},
      {8, "n=3 involutive sets", 200, involutive_sets},
      {9, "conjugacy to the curved oscillator", 1, conjugacy},
      {10, "fundamental set has rank 2n-1", 100, independence},
      {11, "closed form agrees with integration", 50, analytic_vs_numeric},
      {12, "figure data: asymptotes and the kappa = 1 wall", 1, figures},
  };
  return all;
}

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::LessThan: return "<";
    case Relation::GreaterThan: return ">";
  }
  return "?";
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opts) {
  VerifyReport report;
  report.seed = opts.seed;
  for (const auto& c : criteria()) {
    if (!opts.only.empty() && !opts.only.contains(c.id)) continue;
    CriterionResult res;
    res.id = c.id;
    res.claim = c.claim;
    Rng rng = rng_for(opts.seed, c.id);
    const std::size_t n = c.default_cases > 1 && opts.cases ? std::max<std::size_t>(*opts.cases, 1)
                                                            : c.default_cases;
    try {
      c.run(res, rng, n);
    } catch (const Error& e) {
      res.error = e.what();
    }
    if (opts.inject_fault == c.id)
      for (auto& m : res.measurements)
        m.bound = m.relation == Relation::GreaterThan ? std::numeric_limits<double>::max() : 0.0;
    report.criteria.push_back(std::move(res));
  }
  return report;
}

CriterionResult replay_check(const Params& params, const Trajectory& traj, double drift_tol) {
  CriterionResult res;
  res.id = 0;
  res.claim = "trajectory replay";
  try {
    double mismatch = 0.0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      require_in_domain(params, traj.states[i].x);
      for (std::size_t k = 0; k < traj.tracked.size(); ++k) {
        const double stored = traj.invariant_track[k][i];
        const double fresh = evaluate_real(params, traj.tracked[k], traj.states[i]);
        mismatch = std::max(mismatch, std::abs(stored - fresh) / std::max(1.0, std::abs(fresh)));
      }
    }
    res.measurements.push_back({"stored vs recomputed invariants", mismatch, 1e-12});
    for (std::size_t k = 0; k < traj.tracked.size(); ++k)
      res.measurements.push_back({traj.tracked[k].name() + " drift", traj.drift[k], drift_tol});
  } catch (const Error& e) {
    res.error = e.what();
  }
  return res;
}

nlohmann::json to_json(const VerifyReport& report) {
  nlohmann::json crit = nlohmann::json::array();
  for (const auto& c : report.criteria) {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : c.measurements)
      ms.push_back({{"label", m.label},
                    {"measured", m.measured},
                    {"relation", relation_symbol(m.relation)},
                    {"bound", m.bound},
                    {"pass", m.pass()}});
    nlohmann::json entry{{"id", c.id}, {"claim", c.claim}, {"pass", c.pass()}, {"measurements", ms}};
    if (!c.error.empty()) entry["error"] = c.error;
    crit.push_back(std::move(entry));
  }
  return {{"seed", report.seed}, {"pass", report.pass()}, {"criteria", crit}};
}

void print_summary(std::ostream& out, const VerifyReport& report) {
  for (const auto& c : report.criteria) {
    out << (c.pass() ? "PASS" : "FAIL") << "  " << c.id << "  " << c.claim << "  |";
    if (!c.error.empty()) out << " error: " << c.error;
    const char* sep = " ";
    for (const auto& m : c.measurements) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3g (%s %.3g)", m.measured, relation_symbol(m.relation),
                    m.bound);
      out << sep << m.label << " = " << buf;
      sep = "; ";
    }
    out << '\n';
  }
}

}  // namespace qho
