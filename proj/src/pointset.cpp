#include "plab/pointset.hpp"

#include <stdexcept>

#include "plab/io.hpp"

namespace plab {

PointSet PointSet::read_csv(const std::string& path) {
  auto rows = plab::read_csv(path);
  PointSet ps;
  for (const auto& row : rows) {
    if (row.empty()) continue;
    RatPoint p;
    p.reserve(row.size());
    for (const auto& f : row) p.push_back(rational_from_string(f));
    if (ps.n_vars == 0) ps.n_vars = static_cast<int>(p.size());
    if (static_cast<int>(p.size()) != ps.n_vars) {
      throw std::runtime_error("inconsistent point arity in " + path);
    }
    ps.points.push_back(std::move(p));
  }
  return ps;
}

void PointSet::write_csv(const std::string& path) const {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(points.size());
  for (const auto& p : points) {
    std::vector<std::string> row;
    row.reserve(p.size());
    for (const auto& c : p) row.push_back(rational_to_string(c));
    rows.push_back(std::move(row));
  }
  plab::write_csv(path, {}, rows);
}

}  // namespace plab
