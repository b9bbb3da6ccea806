#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qho/closed_form.hpp"
#include "qho/invariants.hpp"

using namespace qho;
using oracle::make;

TEST(Noether, Examples) {
  EXPECT_EQ(noether_p(make(0, 1, 2), Vec{0.3, 0.4}, Vec{1.5, -2}, 1), -2);
  const Params p = make(1, 1, 2);
  EXPECT_NEAR(noether_p(p, Vec{1, 0}, Vec{0, 1}, 0), 0.0, 1e-15);
  EXPECT_NEAR(noether_p(p, Vec{1, 0}, Vec{0, 1}, 1), std::sqrt(2.0), 1e-15);
}

// Direct n-dimensional formula (v_i - lambda sum_j J_ij x_j)/sqrt(1 + lambda r^2).
TEST(Noether, MatchesAngularForm) {
  std::mt19937_64 rng(6);
  for (double lam : {-0.6, 0.5, 2.0}) {
    const Params p = make(lam, 1, 3);
    for (int k = 0; k < 100; ++k) {
      auto s = oracle::random_phase(rng, p);
      for (std::size_t i = 0; i < 3; ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < 3; ++j)
          sum += (s.x[i] * s.w[j] - s.x[j] * s.w[i]) * s.x[j];
        const double direct = (s.w[i] - lam * sum) / std::sqrt(1 + lam * norm2(s.x));
        EXPECT_NEAR(noether_p(p, s.x, s.w, i), direct, 1e-12);
      }
    }
  }
}

TEST(Angular, ExamplesAndPictureIndependence) {
  EXPECT_EQ(angular_j(Vec{1, 0}, Vec{0, 1}, 0, 1), 1);
  EXPECT_EQ(angular_j(Vec{2, 1}, Vec{4, 2}, 0, 1), 0);
  EXPECT_THROW(angular_j(Vec{1, 0}, Vec{0, 1}, 1, 0), Error);  // i < j required
  EXPECT_EQ(angular_observable(1, 0)(Vec{1, 0}, Vec{0, 1}), -1);
  EXPECT_THROW(angular_j(Vec{1, 0}, Vec{0, 1}, 0, 2), Error);

  std::mt19937_64 rng(7);
  const Params p = make(0.8, 1, 3);
  for (int k = 0; k < 1000; ++k) {
    auto s = oracle::random_phase(rng, p);
    const Vec mom = to_momenta(p, s.x, s.w);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j)
        EXPECT_NEAR(angular_j(s.x, s.w, i, j), angular_j(s.x, mom, i, j), 1e-13);
  }
}

TEST(ComplexK, Example) {
  const Params p = make(0, 1, 2);
  const auto k = complex_k(p, Vec{1, 0}, Vec{0, 0}, 0);
  EXPECT_EQ(k, std::complex<double>(0, 1));
  EXPECT_DOUBLE_EQ(std::norm(k), 1.0);
  EXPECT_DOUBLE_EQ(quadratic_i(p, Vec{1, 0}, Vec{0, 0}, 0, 0), 1.0);
}

TEST(ComplexK, ProductsMatchQuadraticAndAngular) {
  std::mt19937_64 rng(9);
  for (double lam : {-0.5, 0.0, 1.0}) {
    const Params p = make(lam, 1.4, 2);
    for (int k = 0; k < 1000; ++k) {
      auto s = oracle::random_phase(rng, p);
      const Vec mom = to_momenta(p, s.x, s.w);
      const auto k1 = complex_k(p, s.x, s.w, 0), k2 = complex_k(p, s.x, s.w, 1);
      const auto prod = k1 * std::conj(k2);
      EXPECT_NEAR(prod.real(), quadratic_i(p, s.x, mom, 0, 1), 1e-12 * std::max(1.0, std::abs(prod)));
      // Im(K1 K2*) = alpha (x v_y - y v_x)
      const double i3 = p.alpha * (s.x[0] * s.w[1] - s.x[1] * s.w[0]);
      EXPECT_NEAR(prod.imag(), i3, 1e-12 * std::max(1.0, std::abs(i3)));
      EXPECT_NEAR(std::norm(k1), quadratic_i(p, s.x, mom, 0, 0), 1e-12 * std::max(1.0, std::norm(k1)));
    }
  }
}

TEST(Quadratic, ExampleAndSymmetry) {
  EXPECT_DOUBLE_EQ(quadratic_i(make(0, 1, 2), Vec{1, 0}, Vec{0, 1}, 0, 0), 1.0);
  const Params p = make(0.3, 2, 3);
  const Vec x{0.1, 0.5, -0.2}, q{1, -1, 0.4};
  EXPECT_EQ(quadratic_i(p, x, q, 0, 2), quadratic_i(p, x, q, 2, 0));
}

TEST(Quadratic, HamiltonianReconstruction) {
  std::mt19937_64 rng(10);
  for (double lam : {-0.5, 0.0, 1.0, 2.5}) {
    for (std::size_t n : {2u, 3u, 4u}) {
      const Params p = make(lam, 0.7, n);
      for (int k = 0; k < 1000 / 4; ++k) {
        auto s = oracle::random_phase(rng, p);
        double sumI = 0, sumJ = 0;
        for (std::size_t i = 0; i < n; ++i) {
          sumI += quadratic_i(p, s.x, s.w, i, i);
          for (std::size_t j = i + 1; j < n; ++j) sumJ += std::pow(angular_j(s.x, s.w, i, j), 2);
        }
        const double H = hamiltonian(p, s.x, s.w);
        EXPECT_NEAR(0.5 * sumI - 0.5 * lam * sumJ, H, 1e-12 * std::max(1.0, std::abs(H)));
        if (n == 2) {
          const auto hp = hamiltonian_parts(p, s.x, s.w);
          EXPECT_NEAR(hp.h1, 0.5 * quadratic_i(p, s.x, s.w, 0, 0), 1e-14 * std::max(1.0, hp.h1));
          EXPECT_NEAR(hp.h3, 0.5 * std::pow(angular_j(s.x, s.w, 0, 1), 2), 1e-14 * std::max(1.0, hp.h3));
          EXPECT_NEAR(hp.h1 + hp.h2 - lam * hp.h3, H, 1e-12 * std::max(1.0, std::abs(H)));
        }
      }
    }
  }
}

// I1 = (1 + lambda B^2 sin^2 phi12) A^2 w^2, I2 symmetric, |J| = w A B |sin phi12|,
// A = sqrt(I1 - lambda J^2)/w.
TEST(Quadratic, BoundedSolutionValues) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lam(-0.9, 3), amp(0.05, 1.0), ph(0, 2 * std::numbers::pi),
      tt(0, 10);
  for (int k = 0; k < 200; ++k) {
    const Params p = make(lam(rng), 1.1, 2);
    double A = amp(rng), B = amp(rng);
    if (p.lambda < 0) {
      const double f = std::min(1.0, 0.6 / std::sqrt(-p.lambda * (A * A + B * B)));
      A *= f;
      B *= f;
    }
    const double f1 = ph(rng), f2 = ph(rng);
    const auto sol = make_trig_solution(p, Vec{A, B}, Vec{f1, f2});
    const double w = sol.rate, s2 = std::pow(std::sin(f1 - f2), 2);
    const State m = to_momentum_picture(p, eval(sol, tt(rng)));
    const double I1 = quadratic_i(p, m.x, m.second, 0, 0);
    const double I2 = quadratic_i(p, m.x, m.second, 1, 1);
    const double J = angular_j(m.x, m.second, 0, 1);
    EXPECT_NEAR(I1, (1 + p.lambda * B * B * s2) * A * A * w * w, 1e-10);
    EXPECT_NEAR(I2, (1 + p.lambda * A * A * s2) * B * B * w * w, 1e-10);
    EXPECT_NEAR(J, w * A * B * std::sin(f1 - f2), 1e-10);
    EXPECT_NEAR(std::sqrt(I1 - p.lambda * J * J) / w, A, 1e-10);
  }
}

TEST(Ids, NamesRoundTrip) {
  for (const char* name : {"H", "H1", "H2", "H3", "I11", "I12", "J12", "J23", "P1", "P3", "K2",
                           "ReK1K2", "ImK1K3"}) {
    const auto id = InvariantId::parse(name);
    EXPECT_EQ(id.name(), name);
  }
  EXPECT_EQ(InvariantId::parse("E").kind, InvariantKind::Energy);
  EXPECT_THROW(InvariantId::parse("Q7"), Error);
  EXPECT_THROW(InvariantId::parse("J11"), Error);
}

TEST(Evaluate, PicturesAgree) {
  const Params p = make(0.6, 1.2, 2);
  const State v{{0.3, -0.2}, {0.7, 0.1}, Picture::Velocity};
  const State m = to_momentum_picture(p, v);
  for (const char* name : {"H", "I11", "I12", "J12", "P1", "P2", "ReK1K2", "ImK1K2", "H3"}) {
    const auto id = InvariantId::parse(name);
    EXPECT_NEAR(evaluate_real(p, id, v), evaluate_real(p, id, m), 1e-14) << name;
  }
  const auto k = evaluate(p, InvariantId::parse("K1"), m).value;
  EXPECT_NEAR(std::abs(k - complex_k(p, v.x, v.second, 0)), 0.0, 1e-14);
}

TEST(Gradients, AnalyticMatchFiniteDifference) {
  std::mt19937_64 rng(13);
  for (double lam : {-0.5, 0.0, 1.0}) {
    const Params p = make(lam, 1.3, 3);
    const std::vector<Observable> obs = {
        hamiltonian_observable(p), quadratic_observable(p, 0, 0), quadratic_observable(p, 1, 2),
        angular_observable(0, 2), angular_observable(2, 1), square(angular_observable(0, 1)),
        quadratic_observable(p, 1, 1) - 0.5 * angular_observable(0, 1)};
    for (int k = 0; k < 20; ++k) {
      auto s = oracle::random_phase(rng, p, 1.0);
      for (const auto& f : obs) {
        ASSERT_TRUE(static_cast<bool>(f.gradient)) << f.name;
        const auto g = gradient(p, f, s.x, s.w);
        const Vec gx = oracle::grad([&](const Vec& x) { return f(x, s.w); }, s.x);
        const Vec gp = oracle::grad([&](const Vec& q) { return f(s.x, q); }, s.w);
        EXPECT_LT(oracle::max_abs_diff(g.gx, gx), 1e-8) << f.name;
        EXPECT_LT(oracle::max_abs_diff(g.gp, gp), 1e-8) << f.name;
      }
    }
  }
}

TEST(Bracket, CanonicalPair) {
  const Params p = make(0.5, 1, 2);
  const Vec x{0.2, 0.4}, q{-1, 0.3};
  for (auto mode : {BracketMode::Auto, BracketMode::FiniteDifference}) {
    EXPECT_NEAR(poisson_bracket(position_observable(0), momentum_observable(0), x, q, p, mode), 1.0, 1e-8);
    EXPECT_NEAR(poisson_bracket(position_observable(0), momentum_observable(1), x, q, p, mode), 0.0, 1e-8);
    EXPECT_NEAR(poisson_bracket(momentum_observable(1), position_observable(1), x, q, p, mode), -1.0, 1e-8);
  }
}

TEST(Bracket, HamiltonianCommutesWithIntegrals) {
  std::mt19937_64 rng(14);
  for (double lam : {-0.5, 0.0, 1.0}) {
    const Params p = make(lam, 1, 2);
    const auto H = hamiltonian_observable(p);
    for (int k = 0; k < 200; ++k) {
      auto s = oracle::random_phase(rng, p);
      for (const auto& g : {quadratic_observable(p, 0, 0), quadratic_observable(p, 1, 1),
                            quadratic_observable(p, 0, 1), angular_observable(0, 1)}) {
        EXPECT_LE(std::abs(poisson_bracket(H, g, s.x, s.w, p)), 1e-7) << g.name;
        if (k < 20)
          EXPECT_LE(std::abs(poisson_bracket(H, g, s.x, s.w, p, BracketMode::FiniteDifference)),
                    1e-6) << g.name;
      }
      // and a non-integral does not commute
      if (k == 0) EXPECT_GT(std::abs(poisson_bracket(H, position_observable(0), s.x, s.w, p)), 1e-3);
    }
  }
}

TEST(Involutive, SetsCommute) {
  std::mt19937_64 rng(15);
  for (double lam : {-0.5, 0.7}) {
    const Params p = make(lam, 1, 3);
    const auto sets = involutive_sets_n3(p);
    ASSERT_EQ(sets.size(), 4u);
    const auto H = hamiltonian_observable(p);
    for (int k = 0; k < 200; ++k) {
      auto s = oracle::random_phase(rng, p, 1.0);
      for (const auto& set : sets) {
        ASSERT_EQ(set.size(), 3u);
        for (std::size_t a = 0; a < 3; ++a) {
          EXPECT_LE(std::abs(poisson_bracket(H, set[a], s.x, s.w, p)), 1e-7);
          for (std::size_t b = a + 1; b < 3; ++b)
            EXPECT_LE(std::abs(poisson_bracket(set[a], set[b], s.x, s.w, p)), 1e-7)
                << set[a].name << " " << set[b].name;
        }
      }
    }
  }
}

TEST(Involutive, ThirdSetIsTheListedOne) {
  const Params p = make(0.7, 1.2, 3);
  const auto set = involutive_sets_n3(p)[2];
  const Vec x{0.3, -0.1, 0.5}, q{0.2, 0.9, -0.4};
  auto I = [&](std::size_t k) { return quadratic_i(p, x, q, k, k); };
  auto J2 = [&](std::size_t i, std::size_t j) {
    return std::pow(angular_j(x, q, std::min(i, j), std::max(i, j)), 2);
  };
  EXPECT_NEAR(set[0](x, q), I(0) - p.lambda * J2(2, 0), 1e-14);
  EXPECT_NEAR(set[1](x, q), I(1) - p.lambda * (J2(0, 1) + J2(1, 2)), 1e-14);
  EXPECT_NEAR(set[2](x, q), I(2), 1e-14);
}

TEST(Fundamental, SizesAndRank) {
  EXPECT_EQ(fundamental_set(make(1, 1, 1)).size(), 1u);
  EXPECT_EQ(fundamental_set(make(1, 1, 2)).size(), 3u);
  EXPECT_EQ(fundamental_set(make(1, 1, 3)).size(), 5u);
  std::mt19937_64 rng(16);
  for (std::size_t n : {2u, 3u}) {
    const Params p = make(0.6, 1, n);
    const auto set = fundamental_set(p);
    for (int k = 0; k < 100; ++k) {
      auto s = oracle::random_phase(rng, p);
      EXPECT_EQ(jacobian_rank(p, set, s.x, s.w), 2 * n - 1);
    }
  }
  // a dependent family loses rank
  const Params p = make(0.6, 1, 2);
  auto set = fundamental_set(p);
  set.push_back(hamiltonian_observable(p));
  EXPECT_EQ(jacobian_rank(p, set, Vec{0.3, 0.2}, Vec{0.5, -0.7}), 3u);
}
