#include "qho/profile.hpp"

#include <cmath>
#include <ostream>

#include "qho/geometry.hpp"
#include "qho/integrate.hpp"

namespace qho {

ProfileKind profile_kind_from_string(std::string_view s) {
  if (s == "v1d") return ProfileKind::V1D;
  if (s == "v2d-radial") return ProfileKind::V2DRadial;
  if (s == "curved") return ProfileKind::Curved;
  throw Error(ErrorCode::InvalidConfig, "unknown profile kind '" + std::string(s) + "'");
}

std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::V1D: return "v1d";
    case ProfileKind::V2DRadial: return "v2d-radial";
    case ProfileKind::Curved: return "curved";
  }
  return "?";
}

ProfileTable profile(const ProfileSpec& spec) {
  if (!(spec.strength > 0.0))
    throw Error(ErrorCode::NonPositiveAlpha, "profile strength must be positive");
  Vec coords = spec.points;
  if (coords.empty()) {
    if (spec.count < 2) throw Error(ErrorCode::InvalidConfig, "grid needs at least 2 points");
    const double step = (spec.to - spec.from) / static_cast<double>(spec.count - 1);
    for (std::size_t i = 0; i < spec.count; ++i) coords.push_back(spec.from + step * i);
  }

  ProfileTable out;
  const double k2 = spec.strength * spec.strength;
  for (double u : coords) {
    try {
      double value = 0.0;
      if (spec.kind == ProfileKind::Curved) {
        value = curved_potential(spec.curvature, spec.strength, u);
      } else {
        if (spec.kind == ProfileKind::V2DRadial && u < 0.0)
          throw Error(ErrorCode::OutOfDomain, "negative radius");
        const double s = 1.0 + spec.curvature * u * u;
        if (!(s > 0.0)) throw Error(ErrorCode::OutOfDomain, "1 + lambda u^2 <= 0");
        value = 0.5 * k2 * u * u / s;
      }
      out.rows.push_back({u, value});
    } catch (const Error& e) {
      out.warnings.push_back("omitted " + format_double(u) + ": " + e.what());
    }
  }
  return out;
}

void write_profile_csv(std::ostream& out, const ProfileTable& table) {
  out << "coord,value\n";
  for (const auto& r : table.rows) out << format_double(r.coord) << ',' << format_double(r.value) << '\n';
}

}  // namespace qho
