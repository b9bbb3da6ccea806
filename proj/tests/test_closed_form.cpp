#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qho/closed_form.hpp"
#include "qho/dynamics.hpp"

using namespace qho;
using oracle::make;
using std::numbers::pi;

namespace {

Vec grid(double t0, double t1, int n) {
  Vec g(n);
  for (int k = 0; k < n; ++k) g[k] = t0 + (t1 - t0) * k / (n - 1);
  return g;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qho::Error thrown";
  return ErrorCode::InvalidConfig;
}

Params free_params(double lambda, std::size_t dim) {
  Params p;
  p.lambda = lambda;
  p.alpha = 0.0;
  p.dim = dim;
  return p;
}

}  // namespace

TEST(Regime, Classification) {
  EXPECT_EQ(classify_regime(make(-1, 1, 2), 100), Regime::Bounded);
  EXPECT_EQ(classify_regime(make(0, 1, 2), 1e6), Regime::Bounded);
  EXPECT_EQ(classify_regime(make(1, 1, 2), 0.5), Regime::Border);
  EXPECT_EQ(classify_regime(make(1, 1, 2), 0.6), Regime::Unbounded);
  EXPECT_EQ(classify_regime(make(1, 1, 2), 0.4), Regime::Bounded);
  EXPECT_EQ(code_of([] { classify_regime(make(1, 1, 2), -1); }), ErrorCode::NegativeEnergy);
}

TEST(TrigRate, Examples) {
  EXPECT_DOUBLE_EQ(trig_rate(make(0, 2, 2), Vec{3, 1}, Vec{0.2, 1}), 2.0);
  EXPECT_NEAR(trig_rate(make(3, 2, 1), Vec{1}, Vec{0}), 1.0, 1e-15);
  EXPECT_NEAR(trig_rate(make(1, 1, 2), Vec{0.5, 0.5}, Vec{0, pi / 2}), 0.8, 1e-15);
  EXPECT_NEAR(trig_amplitude_sum(1, Vec{0.5, 0.5}, Vec{0, pi / 2}), 0.5625, 1e-15);
}

TEST(HyperRate, Examples) {
  EXPECT_NEAR(hyper_rate(make(1, 1, 2), Vec{2, 0}, Vec{0, 0}), 1 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(hyper_rate(make(2, 2, 2), Vec{1, 1}, Vec{0, 0}), 2 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(code_of([] { hyper_rate(make(1, 1, 2), Vec{0.5, 0.5}, Vec{0, 0}); }),
            ErrorCode::NotUnboundedRegime);
  EXPECT_EQ(code_of([] { hyper_rate(make(-1, 1, 2), Vec{3, 0}, Vec{0, 0}); }),
            ErrorCode::NotUnboundedRegime);
}

TEST(Eval, Examples) {
  ClosedFormSolution trig{SolutionRegime::TrigBounded, {1, 0}, {0, 0}, 1.0};
  const State s = eval(trig, 0);
  EXPECT_EQ(s.picture, Picture::Velocity);
  EXPECT_EQ(s.x, (Vec{0, 0}));
  EXPECT_EQ(s.second, (Vec{1, 0}));

  ClosedFormSolution lin{SolutionRegime::LinearBorder, {1, 0}, {0, 1}, 0.0};
  const State l = eval(lin, 2);
  EXPECT_EQ(l.x, (Vec{2, 1}));
  EXPECT_EQ(l.second, (Vec{1, 0}));

  ClosedFormSolution hyp{SolutionRegime::HyperUnbounded, {1, 0}, {0, 0}, 1.0};
  EXPECT_NEAR(eval(hyp, 1).x[0], 1.1752011936438014, 1e-15);
}

TEST(Residual, ValidSolutionsSolveTheEquations) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(-0.9, 3), amp(0.05, 1.0), ph(0, 2 * pi);
  for (int k = 0; k < 100; ++k) {
    const double l = lam(rng);
    const Params p = make(l, 1.3, 3);
    Vec A{amp(rng), amp(rng), amp(rng)}, phi{ph(rng), ph(rng), ph(rng)};
    if (l < 0) {
      const double scale = 0.6 / std::sqrt(-l * (A[0] * A[0] + A[1] * A[1] + A[2] * A[2]));
      for (auto& a : A) a *= std::min(1.0, scale);
    }
    const auto sol = make_trig_solution(p, A, phi);
    EXPECT_LE(residual(p, sol, grid(0, 2 * period(sol), 101)), 1e-10);
  }
}

TEST(Residual, HarmonicIsExact) {
  const Params p = make(0, 1.7, 2);
  const auto sol = make_trig_solution(p, Vec{1, 0}, Vec{0, 0});
  EXPECT_EQ(sol.rate, 1.7);
  EXPECT_LE(residual(p, sol, grid(0, 10, 200)), 1e-14);
}

TEST(Residual, WrongRateIsDetected) {
  const Params p = make(1, 1, 2);
  ClosedFormSolution wrong{SolutionRegime::TrigBounded, {1, 0}, {0, 0}, 1.0};
  EXPECT_GE(residual(p, wrong, grid(0, 2 * pi, 200)), 0.1);
}

TEST(Energy, Examples) {
  const Params p1 = make(1, 1, 2);
  const auto lin = scale_to_border(p1, Vec{0.3, 0.1}, Vec{0.2, -0.5});
  EXPECT_NEAR(solution_energy(p1, lin), 0.5, 1e-12);

  const auto h = make_trig_solution(make(0, 1, 2), Vec{1, 0}, Vec{0, 0});
  EXPECT_NEAR(solution_energy(make(0, 1, 2), h), 0.5, 1e-15);

  const auto s = make_trig_solution(p1, Vec{0.5, 0.5}, Vec{0, pi / 2});
  EXPECT_NEAR(solution_energy(p1, s), 0.18, 1e-14);
  double lo = 1e9, hi = -1e9;
  for (double t : grid(0, 8, 50)) {
    const State m = to_momentum_picture(p1, eval(s, t));
    const double e = hamiltonian(p1, m.x, m.second);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  EXPECT_LE(hi - lo, 1e-12);
  EXPECT_NEAR(lo, 0.18, 1e-12);
}

TEST(Energy, BoundHoldsOnBothSides) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> lam(0.05, 3), amp(0.0, 3.0), ph(0, 2 * pi),
      al(0.2, 3);
  int hyper = 0;
  for (int k = 0; k < 300; ++k) {
    const Params p = make(lam(rng), al(rng), 2);
    const Vec A{amp(rng), amp(rng)}, phi{ph(rng), ph(rng)};
    const double border = p.alpha * p.alpha / (2 * p.lambda);
    EXPECT_LT(solution_energy(p, make_trig_solution(p, A, phi)), border);
    if (p.lambda * hyper_amplitude_sum(p.lambda, A, phi) > 1.0 + 1e-6) {
      ++hyper;
      EXPECT_GT(solution_energy(p, make_hyper_solution(p, A, phi)), border);
    }
  }
  EXPECT_GT(hyper, 50);
}

TEST(Linear, BorderConstraint) {
  const Params p = make(1, 1, 2);
  // alpha^2 = lambda (A1^2 + A2^2 + lambda (A1 B2 - A2 B1)^2) = 1 for A = (1, 0), B = (0, 0)
  const auto sol = make_linear_solution(p, Vec{1, 0}, Vec{0, 0});
  EXPECT_LE(residual(p, sol, grid(0, 5, 50)), 1e-12);
  EXPECT_EQ(code_of([&] { make_linear_solution(p, Vec{0.5, 0}, Vec{0, 0}); }),
            ErrorCode::NotBorderRegime);
  EXPECT_EQ(code_of([] { make_linear_solution(make(-1, 1, 2), Vec{1, 0}, Vec{0, 0}); }),
            ErrorCode::NotBorderRegime);
  const auto scaled = scale_to_border(p, Vec{2, 1}, Vec{0.3, 0.7});
  EXPECT_NEAR(p.lambda * linear_amplitude_sum(p.lambda, scaled.slopes(), scaled.intercepts()),
              p.alpha * p.alpha, 1e-12);
}

TEST(Period, Examples) {
  EXPECT_DOUBLE_EQ(period({SolutionRegime::TrigBounded, {1}, {0}, 1.0}), 2 * pi);
  EXPECT_NEAR(period({SolutionRegime::TrigBounded, {1}, {0}, 0.8}), 7.853981633974483, 1e-14);
  EXPECT_EQ(code_of([] { period({SolutionRegime::HyperUnbounded, {1}, {0}, 1.0}); }),
            ErrorCode::Aperiodic);
  EXPECT_FALSE(try_period({SolutionRegime::LinearBorder, {1}, {0}, 0.0}).has_value());
}

TEST(Limit, SmallLambdaApproachesHarmonic) {
  const Vec A{0.7, 0.4}, phi{0.3, 1.9};
  const auto a = make_trig_solution(make(1e-8, 1, 2), A, phi);
  const auto b = make_trig_solution(make(0, 1, 2), A, phi);
  EXPECT_NEAR(a.rate, 1.0, 1e-8);
  for (double t : grid(0, 20, 100)) {
    const Vec xa = eval(a, t).x, xb = eval(b, t).x;
    EXPECT_LE(oracle::max_abs_diff(xa, xb), 1e-6);
  }
}

TEST(MaxRadius, AgreesWithSampling) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> amp(0, 2), ph(0, 2 * pi);
  for (int k = 0; k < 50; ++k) {
    const Vec A{amp(rng), amp(rng), amp(rng)}, phi{ph(rng), ph(rng), ph(rng)};
    double best = 0;
    for (int s = 0; s < 20000; ++s) {
      const double th = pi * s / 20000;
      double r2 = 0;
      for (int i = 0; i < 3; ++i) r2 += std::pow(A[i] * std::sin(th + phi[i]), 2);
      best = std::max(best, r2);
    }
    const double exact = trig_max_radius_sq(A, phi);
    EXPECT_GE(exact, best - 1e-12);
    EXPECT_NEAR(exact, best, 1e-6 * std::max(1.0, exact));
  }
}

TEST(Free, ExampleSatisfiesFreeEquations) {
  const Params p = free_params(1, 2);
  const auto sol = free_solution(p, 0.5, 1.0, 0.0, Vec{0, 0});
  EXPECT_TRUE(is_free(sol.regime));
  EXPECT_LE(residual(p, sol, grid(-2, 2, 81)), 1e-10);
  EXPECT_NEAR(solution_energy(p, sol), 0.5, 1e-12);
}

TEST(Free, OneDimensionalReduction) {
  // P1^2 = 2E: x = sinh(sqrt(2 lambda E) t)/sqrt(lambda)
  const double lam = 2.0, E = 0.8;
  const Params p = free_params(lam, 1);
  const auto sol = free_solution(p, E, std::sqrt(2 * E), 0.0, Vec{0});
  for (double t : grid(-1, 1, 21))
    EXPECT_NEAR(eval(sol, t).x[0], std::sinh(std::sqrt(2 * lam * E) * t) / std::sqrt(lam), 1e-12);
  EXPECT_EQ(code_of([&] { free_solution(p, E, 0.1, 0.0, Vec{0}); }),
            ErrorCode::InconsistentConstants);
}

TEST(Free, NegativeLambdaIsTrigonometric) {
  const Params p = free_params(-1, 2);
  const auto sol = free_solution(p, 0.3, std::sqrt(0.6), 0.0, Vec{0, 0});
  EXPECT_EQ(sol.regime, SolutionRegime::FreeTrig);
  EXPECT_LE(residual(p, sol, grid(-0.5, 0.5, 41)), 1e-10);
}

TEST(Json, RoundTrip) {
  const auto sol = make_trig_solution(make(0.5, 1, 2), Vec{0.4, 0.2}, Vec{0.1, 2.0});
  nlohmann::json j = sol;
  EXPECT_TRUE(j.contains("A"));
  EXPECT_TRUE(j.contains("phi"));
  const auto back = solution_from_json(j);
  EXPECT_EQ(back.regime, sol.regime);
  EXPECT_EQ(back.amplitudes, sol.amplitudes);
  EXPECT_EQ(back.phases, sol.phases);
  EXPECT_EQ(back.rate, sol.rate);

  nlohmann::json lj = ClosedFormSolution{SolutionRegime::LinearBorder, {1, 0}, {0, 1}, 0.0};
  EXPECT_TRUE(lj.contains("B"));
  EXPECT_EQ(solution_from_json(lj).intercepts(), (Vec{0, 1}));
}
