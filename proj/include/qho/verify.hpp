#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace qho {

enum class Relation { LessEqual, LessThan, GreaterThan };

struct Measurement {
  std::string label;
  double measured = 0.0;
  double bound = 0.0;
  Relation relation = Relation::LessEqual;

  bool pass() const;
};

struct CriterionResult {
  int id = 0;
  std::string claim;
  std::vector<Measurement> measurements;
  std::string error;  // set when a library call threw

  bool pass() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240607;
  // Overrides the per-criterion random case counts when set.
  std::optional<std::size_t> cases;
  std::set<int> only;  // empty = all twelve
  // Harness self-test: tightens every bound of this criterion to zero.
  std::optional<int> inject_fault;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> criteria;

  bool pass() const;
};

VerifyReport run_verify(const VerifyOptions& opts);

struct Params;
struct Trajectory;
/// Trajectory replay: stored invariant columns agree with values recomputed
/// from the stored states (relative 1e-12) and every column drifts <= drift_tol.
CriterionResult replay_check(const Params& params, const Trajectory& traj, double drift_tol);

nlohmann::json to_json(const VerifyReport& report);
// One line per criterion: "PASS  3  <claim>  | label = value (<= bound); ..."
void print_summary(std::ostream& out, const VerifyReport& report);

}  // namespace qho
