#pragma once

#include <string>
#include <vector>

#include "plab/rational.hpp"

namespace plab {

// Finite point set in R^n with exact rational coordinates.
struct PointSet {
  int n_vars = 0;
  std::vector<RatPoint> points;

  size_t size() const { return points.size(); }
  const RatPoint& operator[](size_t i) const { return points[i]; }

  static PointSet read_csv(const std::string& path);
  void write_csv(const std::string& path) const;
};

}  // namespace plab
