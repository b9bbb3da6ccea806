#include "qho/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "qho/dynamics.hpp"

namespace qho {

namespace {

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes c_i never appear
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// PI controller (Hairer's dopri5 defaults)
constexpr double kSafe = 0.9, kBeta = 0.04, kFacMin = 0.2, kFacMax = 10.0;

struct Rhs {
  const Params& params;
  std::size_t n;

  // y = (x, p) packed; returns false outside the guarded domain
  bool operator()(const Vec& y, Vec& dy) const {
    ConstVec x(y.data(), n), p(y.data() + n, n);
    if (params.lambda < 0.0 && !(norm2(x) < 1.0 / -params.lambda - params.boundary_margin))
      return false;
    hamilton_field_into(params, x, p, std::span<double>(dy.data(), n),
                        std::span<double>(dy.data() + n, n));
    for (double d : dy)
      if (!std::isfinite(d)) return false;
    return true;
  }
};

State unpack(const Vec& y, std::size_t n) {
  return {Vec(y.begin(), y.begin() + n), Vec(y.begin() + n, y.end()), Picture::Momentum};
}

double error_norm(const Vec& y0, const Vec& y1, const Vec& err, double rtol, double atol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    acc += (err[i] / sk) * (err[i] / sk);
  }
  return std::sqrt(acc / y0.size());
}

double initial_step(const Rhs& f, const Vec& y0, const Vec& f0, double rtol, double atol,
                    double dir, double hmax) {
  const std::size_t m = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);
  Vec y1(m), f1(m);
  for (;;) {
    for (std::size_t i = 0; i < m; ++i) y1[i] = y0[i] + dir * h * f0[i];
    if (f(y1, f1)) break;
    h *= 0.5;
    if (h < 1e-14) return h;
  }
  double der2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2 / m) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf / m));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100.0 * h, h1, hmax});
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  auto tol_ok = [](double t) { return t > 0.0 && t <= 1e-2; };
  if (!tol_ok(cfg.rel_tol) || !tol_ok(cfg.abs_tol))
    throw Error(ErrorCode::InvalidConfig, "rel_tol and abs_tol must lie in (0, 1e-2]");
  if (!(cfg.max_step > 0.0)) throw Error(ErrorCode::InvalidConfig, "max_step must be positive");
  if (!std::isfinite(cfg.t0) || !std::isfinite(cfg.t1) || cfg.t0 == cfg.t1)
    throw Error(ErrorCode::InvalidConfig, "t_span must be a finite, non-empty interval");
}

double DenseSegment::value(std::size_t k, double t) const {
  const double th = (t - t_start) / h;
  const double th1 = 1.0 - th;
  return coeff[0][k] +
         th * (coeff[1][k] + th1 * (coeff[2][k] + th * (coeff[3][k] + th1 * coeff[4][k])));
}

State Trajectory::at(double t) const {
  if (times.empty()) throw Error(ErrorCode::InvalidConfig, "empty trajectory");
  const bool fwd = times.size() < 2 || times.back() > times.front();
  const double lo = fwd ? times.front() : times.back();
  const double hi = fwd ? times.back() : times.front();
  if (t < lo || t > hi) throw Error(ErrorCode::InvalidConfig, "time outside the integrated span");
  if (dense.empty()) return states.front();
  // segments are ordered along the direction of integration
  auto it = std::partition_point(dense.begin(), dense.end(), [&](const DenseSegment& s) {
    return fwd ? s.t_end() < t : s.t_end() > t;
  });
  if (it == dense.end()) --it;
  State out{Vec(dim), Vec(dim), Picture::Momentum};
  for (std::size_t k = 0; k < dim; ++k) {
    out.x[k] = it->value(k, t);
    out.second[k] = it->value(dim + k, t);
  }
  return out;
}

double series_drift(ConstVec values) {
  if (values.empty()) return 0.0;
  const double v0 = values[0];
  const double scale = std::abs(v0) < 1e-8 ? 1.0 : std::abs(v0);
  double worst = 0.0;
  for (double v : values) worst = std::max(worst, std::abs(v - v0));
  return worst / scale;
}

Trajectory integrate(const Params& params, const State& initial, const IntegratorConfig& config,
                     const std::vector<InvariantId>& track) {
  validate(config);
  const std::size_t n = params.dim;
  require_dim(params, initial.x, "position");
  require_dim(params, initial.second, initial.picture == Picture::Momentum ? "momentum"
                                                                            : "velocity");
  require_in_domain(params, initial.x);
  for (const auto& id : track)
    if (id.kind == InvariantKind::ComplexK)
      throw Error(ErrorCode::InvalidConfig, "K_i rotates in time; track ReKiKj / ImKiKj instead");

  const State s0 = to_momentum_picture(params, initial);
  const std::size_t m = 2 * n;
  const Rhs f{params, n};

  Trajectory traj;
  traj.dim = n;
  traj.tracked = track;
  traj.invariant_track.assign(track.size(), {});

  auto record = [&](double t, const State& s) {
    traj.times.push_back(t);
    for (std::size_t k = 0; k < track.size(); ++k)
      traj.invariant_track[k].push_back(evaluate_real(params, track[k], s));
    traj.states.push_back(s);
  };

  Vec y(m);
  std::copy(s0.x.begin(), s0.x.end(), y.begin());
  std::copy(s0.second.begin(), s0.second.end(), y.begin() + n);

  const double dir = config.t1 > config.t0 ? 1.0 : -1.0;
  const double span = std::abs(config.t1 - config.t0);
  const double hmax = std::min(config.max_step, span);
  const double rtol = config.rel_tol, atol = config.abs_tol;

  Vec k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ys(m), y1(m), err(m);
  if (!f(y, k1)) throw DomainEscapeError(config.t0, "initial state at the domain boundary");

  double t = config.t0;
  record(t, s0);
  double h = initial_step(f, y, k1, rtol, atol, dir, hmax);
  double facold = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  const double expo1 = 0.2 - kBeta * 0.75;
  while (dir * (config.t1 - t) > 0.0) {
    if (++steps > config.max_steps)
      throw Error(ErrorCode::StepUnderflow, "step budget exhausted at t = " + std::to_string(t));
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
      throw Error(ErrorCode::StepUnderflow, "step size underflow at t = " + std::to_string(t));
    bool final_step = false;
    if (h >= std::abs(config.t1 - t)) {
      h = std::abs(config.t1 - t);
      final_step = true;
    }
    const double hs = dir * h;

    auto stage = [&](Vec& out, std::initializer_list<std::pair<double, const Vec*>> terms) {
      for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (const auto& [a, k] : terms) acc += a * (*k)[i];
        ys[i] = y[i] + hs * acc;
      }
      return f(ys, out);
    };
    bool ok = stage(k2, {{a21, &k1}}) && stage(k3, {{a31, &k1}, {a32, &k2}}) &&
              stage(k4, {{a41, &k1}, {a42, &k2}, {a43, &k3}}) &&
              stage(k5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}) &&
              stage(k6, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    if (ok) {
      for (std::size_t i = 0; i < m; ++i)
        y1[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      ok = f(y1, k7);
    }
    if (!ok) {
      // a stage left the disc: shrink until the step fits or the guard band is reached
      h *= 0.25;
      last_rejected = true;
      if (h < 1e-12 * std::max(1.0, std::abs(t)))
        throw DomainEscapeError(t, "trajectory reached the lambda < 0 boundary after t = " +
                                       std::to_string(t));
      continue;
    }
    for (std::size_t i = 0; i < m; ++i)
      err[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double en = error_norm(y, y1, err, rtol, atol);

    const double fac11 = std::pow(std::max(en, 1e-300), expo1);
    if (en <= 1.0) {
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::clamp(fac / kSafe, 1.0 / kFacMax, 1.0 / kFacMin);
      double hnew = h / fac;
      facold = std::max(en, 1e-4);

      DenseSegment seg;
      seg.t_start = t;
      seg.h = hs;
      for (auto& c : seg.coeff) c.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = hs * k1[i] - ydiff;
        seg.coeff[0][i] = y[i];
        seg.coeff[1][i] = ydiff;
        seg.coeff[2][i] = bspl;
        seg.coeff[3][i] = ydiff - hs * k7[i] - bspl;
        seg.coeff[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                d6 * k6[i] + d7 * k7[i]);
      }
      traj.dense.push_back(std::move(seg));

      t = final_step ? config.t1 : t + hs;
      y.swap(y1);
      k1.swap(k7);  // FSAL
      record(t, unpack(y, n));

      hnew = std::min(hnew, hmax);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = hnew;
    } else {
      h /= std::min(1.0 / kFacMin, fac11 / kSafe);
      last_rejected = true;
    }
  }

  traj.drift.reserve(track.size());
  for (const auto& series : traj.invariant_track) traj.drift.push_back(series_drift(series));
  return traj;
}

double estimate_period(const Trajectory& traj, std::size_t coordinate) {
  if (coordinate >= traj.dim)
    throw Error(ErrorCode::IndexError, "coordinate " + std::to_string(coordinate));
  const auto& ts = traj.times;
  std::vector<double> up, down;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = traj.states[i].x[coordinate];
    const double b = traj.states[i + 1].x[coordinate];
    if ((a < 0.0) == (b < 0.0)) continue;
    // linear guess refined on the step's continuous extension
    double lo = ts[i], hi = ts[i + 1];
    double tz = lo + (hi - lo) * a / (a - b);
    if (i < traj.dense.size()) {
      const auto& seg = traj.dense[i];
      double flo = a;
      for (int it = 0; it < 60; ++it) {
        const double fm = seg.value(coordinate, tz);
        if (fm == 0.0) break;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = tz;
          flo = fm;
        } else {
          hi = tz;
        }
        tz = 0.5 * (lo + hi);
        if (std::abs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(1.0, std::abs(tz)))
          break;
      }
    }
    (a < b ? up : down).push_back(tz);
  }
  if (up.size() + down.size() < 3)
    throw Error(ErrorCode::NotOscillatory,
                std::to_string(up.size() + down.size()) + " zero crossings of x" +
                    std::to_string(coordinate + 1));
  double total = 0.0;
  std::size_t intervals = 0;
  for (const auto* c : {&up, &down}) {
    if (c->size() < 2) continue;
    total += std::abs(c->back() - c->front());
    intervals += c->size() - 1;
  }
  return total / static_cast<double>(intervals);
}

std::vector<DriftRow> drift_report(const Trajectory& traj) {
  std::vector<DriftRow> rows;
  for (std::size_t k = 0; k < traj.tracked.size(); ++k) {
    const auto& series = traj.invariant_track[k];
    rows.push_back({traj.tracked[k].name(), series.empty() ? 0.0 : series.front(),
                    series_drift(series)});
  }
  return rows;
}

nlohmann::json drift_json(const Trajectory& traj) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : drift_report(traj))
    rows.push_back({{"invariant", r.name}, {"initial", r.initial}, {"drift", r.drift}});
  return {{"t0", traj.times.empty() ? 0.0 : traj.times.front()},
          {"t1", traj.times.empty() ? 0.0 : traj.times.back()},
          {"steps", traj.dense.size()},
          {"invariants", rows}};
}

nlohmann::json invariant_json(const Trajectory& traj) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < traj.tracked.size(); ++k)
    for (std::size_t s = 0; s < traj.times.size(); ++s)
      rows.push_back({{"id", traj.tracked[k].name()},
                      {"t", traj.times[s]},
                      {"value", traj.invariant_track[k][s]}});
  return rows;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (std::size_t k = 0; k < traj.dim; ++k) out << ",x" << k + 1;
  for (std::size_t k = 0; k < traj.dim; ++k) out << ",p" << k + 1;
  for (const auto& id : traj.tracked) out << ',' << id.name();
  out << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]);
    for (double v : traj.states[i].x) out << ',' << format_double(v);
    for (double v : traj.states[i].second) out << ',' << format_double(v);
    for (const auto& series : traj.invariant_track) out << ',' << format_double(series[i]);
    out << '\n';
  }
}

Trajectory read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidConfig, "empty trajectory CSV");
  const auto header = split(line);
  if (header.empty() || header[0] != "t")
    throw Error(ErrorCode::InvalidConfig, "trajectory CSV must start with a 't' column");
  std::size_t n = 0;
  while (1 + n < header.size() && header[1 + n] == "x" + std::to_string(n + 1)) ++n;
  if (n == 0 || header.size() < 1 + 2 * n)
    throw Error(ErrorCode::InvalidConfig, "trajectory CSV header lacks x/p columns");
  for (std::size_t k = 0; k < n; ++k)
    if (header[1 + n + k] != "p" + std::to_string(k + 1))
      throw Error(ErrorCode::InvalidConfig, "expected column p" + std::to_string(k + 1));

  Trajectory traj;
  traj.dim = n;
  for (std::size_t c = 1 + 2 * n; c < header.size(); ++c)
    traj.tracked.push_back(InvariantId::parse(header[c]));
  traj.invariant_track.assign(traj.tracked.size(), {});

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw Error(ErrorCode::InvalidConfig, "row " + std::to_string(row) + " has " +
                                                std::to_string(cells.size()) + " cells");
    Vec v(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::size_t used = 0;
      try {
        v[c] = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[c].size())
        throw Error(ErrorCode::InvalidConfig, "row " + std::to_string(row) + ": bad number '" +
                                                  cells[c] + "'");
    }
    traj.times.push_back(v[0]);
    traj.states.push_back({Vec(v.begin() + 1, v.begin() + 1 + n),
                           Vec(v.begin() + 1 + n, v.begin() + 1 + 2 * n), Picture::Momentum});
    for (std::size_t k = 0; k < traj.tracked.size(); ++k)
      traj.invariant_track[k].push_back(v[1 + 2 * n + k]);
  }
  for (const auto& series : traj.invariant_track) traj.drift.push_back(series_drift(series));
  return traj;
}

}  // namespace qho
