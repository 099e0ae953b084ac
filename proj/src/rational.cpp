#include "plab/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace plab {

Rational rational_from_string(const std::string& s) {
  std::string t;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  }
  if (t.empty()) throw std::invalid_argument("empty rational literal");
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    mpq_class q;
    if (q.set_str(t, 10) != 0) {
      throw std::invalid_argument("bad rational literal: " + s);
    }
    q.canonicalize();
    return q;
  }
  auto dot = t.find('.');
  if (dot == std::string::npos) {
    mpq_class q;
    if (q.set_str(t, 10) != 0) {
      throw std::invalid_argument("bad rational literal: " + s);
    }
    q.canonicalize();
    return q;
  }
  std::string digits = t.substr(0, dot) + t.substr(dot + 1);
  size_t frac_len = t.size() - dot - 1;
  if (digits.empty() || digits == "-" || digits == "+") {
    throw std::invalid_argument("bad rational literal: " + s);
  }
  mpz_class num;
  if (num.set_str(digits, 10) != 0) {
    throw std::invalid_argument("bad rational literal: " + s);
  }
  mpz_class den = 1;
  for (size_t i = 0; i < frac_len; ++i) den *= 10;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rational dyadic_from_double(double x, int bits) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite coefficient");
  double scaled = std::ldexp(x, bits);
  // Round-half-away keeps the map deterministic across platforms.
  double rounded = std::floor(scaled + 0.5);
  mpz_class num;
  // Exact conversion: rounded is an integer representable in a double.
  mpz_set_d(num.get_mpz_t(), rounded);
  mpz_class den = 1;
  den <<= bits;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::vector<double> to_double_vec(const RatPoint& p) {
  std::vector<double> out(p.size());
  for (size_t i = 0; i < p.size(); ++i) out[i] = p[i].get_d();
  return out;
}

}  // namespace plab
