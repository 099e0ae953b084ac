#pragma once

#include <array>
#include <string>

#include "plab/rational.hpp"

namespace plab {

// Line in R^3 with exact rational base point and direction, plus a floating
// shadow of the direction for geometric tolerancing. Equality is equality of
// point sets, decided through a canonical form (foot of the perpendicular
// from the origin, primitive integer direction with sign-normalized leading
// entry).
struct Line3 {
  std::array<Rational, 3> base;
  std::array<Rational, 3> dir;

  Line3() = default;
  Line3(std::array<Rational, 3> b, std::array<Rational, 3> d);

  std::array<Rational, 3> point_at(const Rational& t) const;
  std::array<double, 3> unit_dir() const;
  std::array<double, 3> base_d() const;

  // Same point set.
  bool same_line(const Line3& o) const;

  Line3 canonical() const;

  std::string to_csv_row() const;  // "bx,by,bz,dx,dy,dz" rational fields
  static Line3 from_csv_fields(const std::vector<std::string>& fields);
};

}  // namespace plab
