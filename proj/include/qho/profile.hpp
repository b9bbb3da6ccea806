#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qho/model.hpp"

namespace qho {

// Potential profiles behind the figures:
//   v1d, v2d-radial: (1/2) alpha^2 u^2 / (1 + lambda u^2)
//   curved:          (1/2) omega0^2 Tan_kappa(rho)^2
enum class ProfileKind { V1D, V2DRadial, Curved };

ProfileKind profile_kind_from_string(std::string_view s);
std::string_view to_string(ProfileKind k);

struct ProfileSpec {
  ProfileKind kind = ProfileKind::V1D;
  double curvature = 0.0;  // lambda for v1d / v2d-radial, kappa for curved
  double strength = 1.0;   // alpha or omega0
  double from = 0.0;
  double to = 1.0;
  std::size_t count = 101;
  Vec points;  // when non-empty, replaces the uniform grid
};

struct ProfileRow {
  double coord = 0.0;
  double value = 0.0;
};

struct ProfileTable {
  std::vector<ProfileRow> rows;
  std::vector<std::string> warnings;  // one per omitted coordinate
};

// Coordinates on a pole or outside the lambda < 0 disc are omitted with a warning.
ProfileTable profile(const ProfileSpec& spec);

void write_profile_csv(std::ostream& out, const ProfileTable& table);

}  // namespace qho
