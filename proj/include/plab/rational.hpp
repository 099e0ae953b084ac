#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace plab {

// Exact rational scalar used for all coefficient arithmetic that must not
// lose sign information (Sturm chains, sign vectors, line intersections).
using Rational = mpq_class;

using RatPoint = std::vector<Rational>;

inline int sign_of(const Rational& r) { return sgn(r); }

inline double to_double(const Rational& r) { return r.get_d(); }

// mpq_class(num, den) keeps the pair as given; comparisons assume canonical
// form, so reduce explicitly whenever num and den may share a factor.
inline Rational make_rational(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Parses "p/q", plain integers, and decimal literals ("-0.125") exactly.
Rational rational_from_string(const std::string& s);

// Canonical "p/q" (or "p" when q == 1); parses back bit-exactly.
std::string rational_to_string(const Rational& r);

// Nearest rational with denominator 2^bits. Used to snap optimizer output
// onto coefficients whose signs can then be evaluated exactly.
Rational dyadic_from_double(double x, int bits = 24);

std::vector<double> to_double_vec(const RatPoint& p);

}  // namespace plab
