#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "plab/line3.hpp"
#include "plab/multipoly.hpp"
#include "plab/rng.hpp"
#include "plab/unipoly.hpp"

using namespace plab;

namespace {

// Independent root-count oracle: sign-change bisection on double samples,
// refined to width 1e-9. Counts sign crossings in (a, b]; used only on
// polynomials whose roots are simple and comfortably separated.
int bisection_root_count(const UniPoly& p, double a, double b) {
  const int kCoarse = 4096;
  int count = 0;
  double prev_t = a;
  double prev_v = p.eval(a);
  for (int i = 1; i <= kCoarse; ++i) {
    double t = a + (b - a) * i / kCoarse;
    double v = p.eval(t);
    if (prev_v == 0.0) {
      // Sample landed on a root: counted when the interval is entered from
      // the left sample, skip the duplicate zero.
      prev_v = v;
      prev_t = t;
      continue;
    }
    if (v == 0.0 || prev_v * v < 0.0) {
      double lo = prev_t, hi = t;
      while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        double mv = p.eval(mid);
        if (mv == 0.0) break;
        if (p.eval(lo) * mv < 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      ++count;
    }
    prev_t = t;
    prev_v = v;
  }
  return count;
}

UniPoly poly_from_roots(const std::vector<Rational>& roots) {
  UniPoly p = UniPoly::constant(Rational(1));
  for (const auto& r : roots) p = p * UniPoly({-r, Rational(1)});
  return p;
}

}  // namespace

TEST_CASE("monomial order is graded-lex") {
  auto mons = monomials_up_to(2, 2);
  REQUIRE(mons.size() == 6);  // binomial(4, 2)
  CHECK(mons[0] == Monomial{0, 0});
  CHECK(mons[1] == Monomial{1, 0});
  CHECK(mons[2] == Monomial{0, 1});
  CHECK(mons[3] == Monomial{2, 0});
  CHECK(mons[4] == Monomial{1, 1});
  CHECK(mons[5] == Monomial{0, 2});
  for (int n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 5; ++d) {
      CHECK(static_cast<long long>(monomials_up_to(n, d).size()) ==
            binomial(d + n, n));
    }
  }
}

TEST_CASE("veronese lift matches the worked examples") {
  {
    auto v = veronese_lift(RatPoint{Rational(2)}, 2);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1);
    CHECK(v[1] == 2);
    CHECK(v[2] == 4);
  }
  {
    auto v = veronese_lift(RatPoint{Rational(3), Rational(5)}, 1);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 1);
    CHECK(v[1] == 3);
    CHECK(v[2] == 5);
  }
  // Length check across dimensions.
  for (int n = 1; n <= 3; ++n) {
    RatPoint x(n, Rational(1, 2));
    for (int d = 1; d <= 4; ++d) {
      CHECK(static_cast<long long>(veronese_lift(x, d).size()) ==
            binomial(d + n, n));
    }
  }
}

TEST_CASE("multipoly eval exact vs double") {
  // p = 3/2 x1^2 x2 - x2^3 + 7
  MultiPoly p(2);
  p.set_term({2, 1}, Rational(3, 2));
  p.set_term({0, 3}, Rational(-1));
  p.set_term({0, 0}, Rational(7));
  RatPoint x = {Rational(1, 3), Rational(-2)};
  Rational exact = p.eval(x);
  // 3/2 * 1/9 * (-2) - (-8) + 7 = -1/3 + 15
  CHECK(exact == Rational(44, 3));
  double xd[2] = {x[0].get_d(), x[1].get_d()};
  CHECK(std::abs(p.eval(std::span<const double>(xd, 2)) - exact.get_d()) <
        1e-12 * 16);
  CHECK(p.degree() == 3);
}

TEST_CASE("zero terms are never stored") {
  MultiPoly p(2);
  p.set_term({1, 0}, Rational(2));
  p.add_term({1, 0}, Rational(-2));
  CHECK(p.is_zero());
  CHECK(p.term_count() == 0);
  MultiPoly q(2);
  q.set_term({0, 1}, Rational(5));
  MultiPoly r = q - q;
  CHECK(r.is_zero());
}

TEST_CASE("gradient of x1^2 + x2^2 - 1") {
  MultiPoly p(2);
  p.set_term({2, 0}, Rational(1));
  p.set_term({0, 2}, Rational(1));
  p.set_term({0, 0}, Rational(-1));
  auto g = p.gradient();
  REQUIRE(g.size() == 2);
  MultiPoly gx(2), gy(2);
  gx.set_term({1, 0}, Rational(2));
  gy.set_term({0, 1}, Rational(2));
  CHECK(g[0] == gx);
  CHECK(g[1] == gy);
}

TEST_CASE("text round trip is bit exact") {
  MultiPoly p(3);
  p.set_term({2, 0, 1}, Rational(-3, 2));
  p.set_term({0, 1, 0}, Rational(7, 5));
  p.set_term({0, 0, 0}, Rational(4));
  std::string text = p.to_text();
  MultiPoly q = MultiPoly::from_text(text);
  CHECK(q == p);
  CHECK(q.to_text() == text);
  // A few deterministic random polynomials round trip too.
  CounterRng rng(20260819);
  for (int trial = 0; trial < 20; ++trial) {
    MultiPoly r(3);
    auto mons = monomials_up_to(3, 3);
    for (size_t m = 0; m < mons.size(); ++m) {
      uint64_t idx = trial * 100 + m;
      if (rng.uniform(idx, 0) < 0.4) {
        long num = static_cast<long>(rng.uniform(idx, 1, -50, 50));
        long den = 1 + static_cast<long>(rng.uniform(idx, 2, 0, 9));
        r.add_term(mons[m], make_rational(num, den));
      }
    }
    MultiPoly back = MultiPoly::from_text(r.to_text());
    CHECK(back == r);
  }
  CHECK(MultiPoly::from_text("0").is_zero());
}

TEST_CASE("restriction to a line: worked example") {
  // p = x1^2 + x2^2 + x3^2 - 1 restricted to x = t * (1,0,0) is t^2 - 1.
  MultiPoly p(3);
  p.set_term({2, 0, 0}, Rational(1));
  p.set_term({0, 2, 0}, Rational(1));
  p.set_term({0, 0, 2}, Rational(1));
  p.set_term({0, 0, 0}, Rational(-1));
  Line3 axis({Rational(0), Rational(0), Rational(0)},
             {Rational(1), Rational(0), Rational(0)});
  UniPoly u = p.restrict_to_line(axis);
  REQUIRE(u.degree() == 2);
  CHECK(u.coeff(0) == Rational(-1));
  CHECK(u.coeff(1) == Rational(0));
  CHECK(u.coeff(2) == Rational(1));
  CHECK(u.count_real_roots(Rational(-2), Rational(2)) == 2);

  // Restriction commutes with evaluation at rational parameters.
  Line3 skew({Rational(1, 2), Rational(-1), Rational(3)},
             {Rational(2), Rational(1, 3), Rational(-1)});
  UniPoly v = p.restrict_to_line(skew);
  for (int k = -3; k <= 3; ++k) {
    Rational t(k, 2);
    CHECK(v.eval(t) == p.eval(RatPoint{skew.point_at(t)[0],
                                       skew.point_at(t)[1],
                                       skew.point_at(t)[2]}));
  }
}

TEST_CASE("sturm count on (a, b] endpoint conventions") {
  // roots at 0 and 1
  UniPoly p = poly_from_roots({Rational(0), Rational(1)});
  CHECK(p.count_real_roots(Rational(0), Rational(1)) == 1);   // 0 excluded
  CHECK(p.count_real_roots(Rational(-1), Rational(1)) == 2);  // 1 included
  CHECK(p.count_real_roots(Rational(-1), Rational(0)) == 1);
  CHECK(p.count_real_roots(Rational(1), Rational(2)) == 0);
  // multiple roots count once
  UniPoly sq = p * p;
  CHECK(sq.count_real_roots(Rational(-1), Rational(1)) == 2);
  // zero polynomial throws
  UniPoly z;
  CHECK_THROWS_AS(z.count_real_roots(Rational(0), Rational(1)),
                  ZeroPolynomial);
}

TEST_CASE("sturm vs bisection oracle on random cubics and quartics") {
  CounterRng rng(7);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 100; ++trial) {
    int deg = 3 + (trial % 2);
    // Integer roots in [-8, 8], distinct, so the oracle's bisection cannot
    // miss or double-count.
    std::vector<Rational> roots;
    for (int k = 0; k < deg; ++k) {
      long r = static_cast<long>(rng.uniform(trial * 8 + k, 0, -8, 9));
      bool dup = false;
      for (const auto& q : roots) dup = dup || q == r;
      if (!dup) roots.emplace_back(r);
    }
    if (static_cast<int>(roots.size()) != deg) continue;
    UniPoly p = poly_from_roots(roots);
    // Random scale keeps it from being monic-only.
    p = p * Rational(1 + static_cast<long>(rng.uniform(trial, 7, 0, 6)), 3);
    double a = -10.25, b = 10.25;
    int oracle = bisection_root_count(p, a, b);
    int sturm = p.count_real_roots(Rational(-41, 4), Rational(41, 4));
    CHECK(sturm == oracle);
    CHECK(sturm <= p.degree());
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("root isolation returns disjoint intervals with one root each") {
  UniPoly p = poly_from_roots(
      {Rational(-3), Rational(-1, 2), Rational(0), Rational(2), Rational(7, 3)});
  auto iso = p.isolate_roots(Rational(-10), Rational(10));
  REQUIRE(iso.size() == 5);
  for (size_t i = 0; i < iso.size(); ++i) {
    CHECK(iso[i].first < iso[i].second);
    CHECK(p.count_real_roots(iso[i].first, iso[i].second) == 1);
    if (i > 0) CHECK(iso[i - 1].second <= iso[i].first);
  }
}

TEST_CASE("line canonical form identifies equal point sets") {
  Line3 a({Rational(0), Rational(0), Rational(0)},
          {Rational(1), Rational(2), Rational(3)});
  Line3 b({Rational(2), Rational(4), Rational(6)},
          {Rational(-1, 2), Rational(-1), Rational(-3, 2)});
  CHECK(a.same_line(b));
  Line3 c({Rational(0), Rational(1), Rational(0)},
          {Rational(1), Rational(2), Rational(3)});
  CHECK(!a.same_line(c));
  // CSV round trip
  auto row = a.to_csv_row();
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : row) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  Line3 back = Line3::from_csv_fields(fields);
  CHECK(back.same_line(a));
}

TEST_CASE("rational parsing handles fractions, integers, decimals") {
  CHECK(rational_from_string("3/4") == Rational(3, 4));
  CHECK(rational_from_string("-7") == Rational(-7));
  CHECK(rational_from_string("0.25") == Rational(1, 4));
  CHECK(rational_from_string("-1.5") == Rational(-3, 2));
  CHECK(rational_to_string(Rational(-3, 2)) == "-3/2");
  CHECK(rational_to_string(Rational(5)) == "5");
  // dyadic snap is exact on representable values
  CHECK(dyadic_from_double(0.5, 4) == Rational(1, 2));
  CHECK(dyadic_from_double(-0.375, 4) == Rational(-3, 8));
}
