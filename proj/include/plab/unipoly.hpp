#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "plab/rational.hpp"

namespace plab {

struct ZeroPolynomial : std::runtime_error {
  ZeroPolynomial() : std::runtime_error("zero polynomial has no root count") {}
};

// Dense univariate polynomial over Q, coefficients ascending by degree.
// Trailing zero coefficients are stripped; the zero polynomial has an empty
// coefficient vector.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs);

  static UniPoly constant(const Rational& c);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Rational& leading() const { return coeffs_.back(); }
  const Rational& coeff(int k) const;

  Rational eval(const Rational& t) const;
  double eval(double t) const;

  UniPoly derivative() const;
  UniPoly operator+(const UniPoly& o) const;
  UniPoly operator-(const UniPoly& o) const;
  UniPoly operator*(const UniPoly& o) const;
  UniPoly operator*(const Rational& c) const;
  bool operator==(const UniPoly& o) const { return coeffs_ == o.coeffs_; }

  // Remainder of this / d (exact rational division).
  UniPoly remainder(const UniPoly& d) const;

  // Divides out the content and normalizes the leading coefficient to +-1
  // scale-free form (sign preserved). Keeps Sturm chains small.
  UniPoly primitive_part() const;

  UniPoly gcd(const UniPoly& o) const;
  UniPoly squarefree_part() const;

  // Every real root lies in (-bound, bound).
  Rational cauchy_root_bound() const;

  // Number of distinct real roots in the half-open interval (a, b]:
  // a root exactly at a is excluded, one at b is included.
  // Throws ZeroPolynomial for the zero polynomial.
  int count_real_roots(const Rational& a, const Rational& b) const;

  // Distinct real roots in (a, b], isolated into disjoint intervals
  // (lo, hi] with lo < hi, sorted ascending; each contains exactly one root.
  std::vector<std::pair<Rational, Rational>> isolate_roots(
      const Rational& a, const Rational& b) const;

 private:
  std::vector<Rational> coeffs_;
  void strip();
};

// Sturm chain of p (canonical: p, p', then negated remainders).
std::vector<UniPoly> sturm_chain(const UniPoly& p);

// Sign changes in the chain evaluated at t, zeros skipped.
int sign_changes_at(const std::vector<UniPoly>& chain, const Rational& t);

}  // namespace plab
