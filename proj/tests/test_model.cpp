#include <gtest/gtest.h>

#include <cmath>

#include "qho/model.hpp"

using namespace qho;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no qho::Error thrown";
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST(Params, HarmonicLimitIsValid) {
  const Params p = validate_params(0, 1, 2);
  EXPECT_EQ(p.dim, 2u);
  EXPECT_FALSE(p.domain_radius().finite());
}

TEST(Params, RejectsBadArguments) {
  EXPECT_EQ(code_of([] { validate_params(1, 0, 2); }), ErrorCode::NonPositiveAlpha);
  EXPECT_EQ(code_of([] { validate_params(1, -2, 2); }), ErrorCode::NonPositiveAlpha);
  EXPECT_EQ(code_of([] { validate_params(1, 1, 0); }), ErrorCode::NonPositiveDim);
  EXPECT_EQ(code_of([] { validate_params(NAN, 1, 2); }), ErrorCode::InvalidParams);
}

TEST(Params, NegativeLambdaHasFiniteDisc) {
  const Params p = validate_params(-1, 1, 3);
  ASSERT_TRUE(p.domain_radius().finite());
  EXPECT_DOUBLE_EQ(p.domain_radius().value, 1.0);
  EXPECT_DOUBLE_EQ(validate_params(-4, 1, 1).domain_radius().value, 0.5);
}

TEST(Domain, Membership) {
  const Params neg = validate_params(-1, 1, 2);
  EXPECT_TRUE(in_domain(neg, Vec{0.5, 0.5}));
  EXPECT_FALSE(in_domain(neg, Vec{1, 0}));
  EXPECT_FALSE(in_domain(neg, Vec{0.8, 0.8}));
  EXPECT_TRUE(in_domain(validate_params(2, 1, 2), Vec{10, 10}));
  EXPECT_TRUE(in_domain(validate_params(0, 1, 2), Vec{1e6, -1e6}));
}

TEST(Domain, RequireThrowsTyped) {
  const Params neg = validate_params(-1, 1, 2);
  EXPECT_EQ(code_of([&] { require_in_domain(neg, Vec{1, 0}); }), ErrorCode::OutOfDomain);
  EXPECT_EQ(code_of([&] { require_in_domain(neg, Vec{0.1}); }), ErrorCode::DimensionMismatch);
  EXPECT_NO_THROW(require_in_domain(neg, Vec{0.1, 0.2}));
}

TEST(Params, JsonRoundTrip) {
  const Params p = validate_params(-0.25, 1.5, 3);
  nlohmann::json j = p;
  EXPECT_EQ(j.at("lambda").get<double>(), -0.25);
  EXPECT_EQ(j.at("dim").get<int>(), 3);
  const Params q = params_from_json(j);
  EXPECT_EQ(q.lambda, p.lambda);
  EXPECT_EQ(q.alpha, p.alpha);
  EXPECT_EQ(q.dim, p.dim);
  EXPECT_THROW(params_from_json(nlohmann::json{{"lambda", 1}, {"alpha", 0}, {"dim", 2}}), Error);
}
