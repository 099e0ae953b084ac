#include "plab/line3.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace plab {

Line3::Line3(std::array<Rational, 3> b, std::array<Rational, 3> d)
    : base(std::move(b)), dir(std::move(d)) {
  if (dir[0] == 0 && dir[1] == 0 && dir[2] == 0) {
    throw std::invalid_argument("line direction must be nonzero");
  }
}

std::array<Rational, 3> Line3::point_at(const Rational& t) const {
  return {base[0] + t * dir[0], base[1] + t * dir[1], base[2] + t * dir[2]};
}

std::array<double, 3> Line3::unit_dir() const {
  double d0 = dir[0].get_d(), d1 = dir[1].get_d(), d2 = dir[2].get_d();
  double n = std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
  return {d0 / n, d1 / n, d2 / n};
}

std::array<double, 3> Line3::base_d() const {
  return {base[0].get_d(), base[1].get_d(), base[2].get_d()};
}

Line3 Line3::canonical() const {
  // Scale the direction to a primitive integer vector whose first nonzero
  // entry is positive, then move the base to the foot of the perpendicular
  // from the origin. Two lines are equal as point sets iff these agree.
  mpz_class lcm = 1;
  for (int i = 0; i < 3; ++i) {
    mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), dir[i].get_den().get_mpz_t());
  }
  std::array<mpz_class, 3> d;
  for (int i = 0; i < 3; ++i) {
    d[i] = dir[i].get_num() * (lcm / dir[i].get_den());
  }
  mpz_class g = 0;
  for (int i = 0; i < 3; ++i) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d[i].get_mpz_t());
  }
  int lead_sign = 0;
  for (int i = 0; i < 3 && lead_sign == 0; ++i) lead_sign = sgn(d[i]);
  if (lead_sign < 0) g = -g;
  std::array<Rational, 3> dprim;
  for (int i = 0; i < 3; ++i) dprim[i] = Rational(d[i] / g);
  Rational dd = dprim[0] * dprim[0] + dprim[1] * dprim[1] + dprim[2] * dprim[2];
  Rational bd = base[0] * dprim[0] + base[1] * dprim[1] + base[2] * dprim[2];
  Rational t = bd / dd;
  std::array<Rational, 3> foot = {base[0] - t * dprim[0],
                                  base[1] - t * dprim[1],
                                  base[2] - t * dprim[2]};
  Line3 c;
  c.base = foot;
  c.dir = dprim;
  return c;
}

bool Line3::same_line(const Line3& o) const {
  Line3 a = canonical();
  Line3 b = o.canonical();
  return a.base == b.base && a.dir == b.dir;
}

std::string Line3::to_csv_row() const {
  std::ostringstream os;
  os << rational_to_string(base[0]) << "," << rational_to_string(base[1])
     << "," << rational_to_string(base[2]) << ","
     << rational_to_string(dir[0]) << "," << rational_to_string(dir[1]) << ","
     << rational_to_string(dir[2]);
  return os.str();
}

Line3 Line3::from_csv_fields(const std::vector<std::string>& fields) {
  if (fields.size() != 6) {
    throw std::invalid_argument("line row needs 6 rational fields");
  }
  std::array<Rational, 3> b = {rational_from_string(fields[0]),
                               rational_from_string(fields[1]),
                               rational_from_string(fields[2])};
  std::array<Rational, 3> d = {rational_from_string(fields[3]),
                               rational_from_string(fields[4]),
                               rational_from_string(fields[5])};
  return Line3(std::move(b), std::move(d));
}

}  // namespace plab
