#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "plab/rational.hpp"

namespace plab {

class UniPoly;
struct Line3;

// Exponent vector; length equals the ambient variable count.
using Monomial = std::vector<int>;

inline int total_degree(const Monomial& m) {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

// Graded lexicographic order: lower total degree first; within a degree,
// lexicographically larger exponent vector first (x1^2 before x1 x2).
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return a > b;
  }
};

// All monomials in n variables of total degree <= max_degree, in graded-lex
// order. Length is binomial(max_degree + n, n).
std::vector<Monomial> monomials_up_to(int n_vars, int max_degree);

long long binomial(int n, int k);

// Sparse multivariate polynomial over Q. Terms with zero coefficient are
// never stored; the term map is ordered graded-lex so serialization and
// iteration are canonical.
class MultiPoly {
 public:
  MultiPoly() : n_vars_(0) {}
  explicit MultiPoly(int n_vars) : n_vars_(n_vars) {}

  static MultiPoly constant(int n_vars, const Rational& c);
  static MultiPoly variable(int n_vars, int index);

  int n_vars() const { return n_vars_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // -1 for the zero polynomial
  size_t term_count() const { return terms_.size(); }

  const std::map<Monomial, Rational, GradedLexLess>& terms() const {
    return terms_;
  }

  void set_term(const Monomial& m, const Rational& c);
  void add_term(const Monomial& m, const Rational& c);

  MultiPoly operator+(const MultiPoly& o) const;
  MultiPoly operator-(const MultiPoly& o) const;
  MultiPoly operator*(const MultiPoly& o) const;
  MultiPoly operator*(const Rational& c) const;
  MultiPoly operator-() const;
  bool operator==(const MultiPoly& o) const {
    return n_vars_ == o.n_vars_ && terms_ == o.terms_;
  }

  Rational eval(const RatPoint& x) const;
  double eval(std::span<const double> x) const;

  // Partial derivative with respect to variable `index`.
  MultiPoly derivative(int index) const;
  std::vector<MultiPoly> gradient() const;

  // Terms of top total degree only (the homogeneous leading part).
  MultiPoly homogeneous_part() const;

  // Substitutes x = base + t * dir and expands into a polynomial in t.
  UniPoly restrict_to_line(const Line3& line) const;

  // Text form: "c * x1^a x2^b" terms joined by " + ", graded-lex order,
  // exponent-1 factors written without the caret, zero exponents omitted.
  std::string to_text() const;
  static MultiPoly from_text(const std::string& text);

 private:
  int n_vars_;
  std::map<Monomial, Rational, GradedLexLess> terms_;
};

// Veronese lift of a point: values of all monomials of degree <= max_degree
// at x, in the same graded-lex order as monomials_up_to.
std::vector<Rational> veronese_lift(const RatPoint& x, int max_degree);
std::vector<double> veronese_lift(std::span<const double> x, int max_degree);

// Flattened double-precision evaluator for hot loops; built once from a
// MultiPoly and reused across many points.
struct CompiledPoly {
  int n_vars = 0;
  std::vector<double> coeffs;
  std::vector<std::array<int, 4>> exps;

  explicit CompiledPoly(const MultiPoly& p);
  CompiledPoly() = default;
  double eval(const double* x) const;
  void grad(const double* x, double* g) const;
};

}  // namespace plab
