#pragma once

#include <array>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "qho/invariants.hpp"
#include "qho/model.hpp"

namespace qho {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double t0 = 0.0;
  double t1 = 1.0;  // t1 < t0 integrates backwards
  std::size_t max_steps = 5'000'000;
};

void validate(const IntegratorConfig& cfg);

// Continuous extension of one accepted Dormand-Prince step, packed over the
// 2n phase coordinates (x first, then p).
struct DenseSegment {
  double t_start = 0.0;
  double h = 0.0;
  std::array<Vec, 5> coeff;

  double t_end() const { return t_start + h; }
  double value(std::size_t component, double t) const;
};

struct Trajectory {
  std::size_t dim = 0;
  Vec times;
  std::vector<State> states;  // momentum picture
  std::vector<InvariantId> tracked;
  std::vector<Vec> invariant_track;  // invariant_track[k][step]
  Vec drift;                         // drift[k]
  std::vector<DenseSegment> dense;   // dense[i] spans times[i] .. times[i+1]

  /// State at any t inside the run, from the 4th-order continuous extension.
  State at(double t) const;
};

/// Raised when a lambda < 0 trajectory reaches the guard band of the disc.
class DomainEscapeError : public Error {
 public:
  DomainEscapeError(double last_time, const std::string& detail)
      : Error(ErrorCode::DomainEscape, detail), last_time_(last_time) {}
  double last_valid_time() const noexcept { return last_time_; }

 private:
  double last_time_;
};

/// Adaptive Dormand-Prince 5(4) on the canonical equations. Records every
/// accepted step. Velocity-picture initial states are converted first.
Trajectory integrate(const Params& params, const State& initial, const IntegratorConfig& config,
                     const std::vector<InvariantId>& track = {});

// Drift of one invariant series: max |v - v0| / |v0|, absolute when |v0| < 1e-8.
double series_drift(ConstVec values);

/// Mean of successive same-direction zero crossings of x_coordinate.
double estimate_period(const Trajectory& traj, std::size_t coordinate);

struct DriftRow {
  std::string name;
  double initial = 0.0;
  double drift = 0.0;
};
std::vector<DriftRow> drift_report(const Trajectory& traj);

nlohmann::json drift_json(const Trajectory& traj);
// [{"id", "t", "value"}] for every tracked invariant at every accepted step.
nlohmann::json invariant_json(const Trajectory& traj);

/// Header `t,x1..xn,p1..pn,<ids>`, 17 significant digits.
void write_csv(std::ostream& out, const Trajectory& traj);
/// Reads the write_csv format back; no dense output, drift recomputed.
Trajectory read_csv(std::istream& in);
std::string format_double(double v);

}  // namespace qho
