#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "plab/partition.hpp"
#include "plab/rng.hpp"

using namespace plab;

namespace {

// Test-local census: exact signs straight from MultiPoly::eval, so the
// library's count_signs is cross-checked rather than trusted.
struct Census {
  long pos = 0, neg = 0, zero = 0;
};

Census census_of(const MultiPoly& p, const PointSet& s) {
  Census c;
  for (const auto& x : s.points) {
    int sg = sign_of(p.eval(x));
    if (sg > 0) {
      ++c.pos;
    } else if (sg < 0) {
      ++c.neg;
    } else {
      ++c.zero;
    }
  }
  return c;
}

bool balanced(const MultiPoly& p, const PointSet& s, double tol) {
  auto c = census_of(p, s);
  return std::abs(static_cast<double>(c.pos - c.neg)) <=
         tol * static_cast<double>(s.size()) + static_cast<double>(c.zero);
}

// Oracle for collinear inputs: best imbalance achievable by axis-aligned
// cuts x_k = theta, scanning thresholds between consecutive coordinates.
long best_axis_cut_imbalance(const PointSet& s) {
  long best = static_cast<long>(s.size());
  for (int axis = 0; axis < s.n_vars; ++axis) {
    std::vector<Rational> coords;
    for (const auto& x : s.points) coords.push_back(x[axis]);
    std::sort(coords.begin(), coords.end());
    for (size_t cut = 0; cut + 1 < coords.size(); ++cut) {
      if (coords[cut] == coords[cut + 1]) continue;
      Rational theta = (coords[cut] + coords[cut + 1]) / 2;
      long lo = 0, hi = 0;
      for (const auto& x : s.points) {
        if (x[axis] < theta) {
          ++lo;
        } else {
          ++hi;
        }
      }
      best = std::min(best, std::abs(lo - hi));
    }
  }
  return best;
}

PointSet random_square_points(size_t count, uint64_t seed) {
  PointSet s;
  s.n_vars = 2;
  CounterRng rng(seed);
  for (size_t i = 0; i < count; ++i) {
    RatPoint x;
    x.push_back(dyadic_from_double(rng.uniform(i, 0), 24));
    x.push_back(dyadic_from_double(rng.uniform(i, 1), 24));
    s.points.push_back(std::move(x));
  }
  return s;
}

}  // namespace

TEST_CASE("ham sandwich on the symmetric four point set") {
  PointSet s;
  s.n_vars = 2;
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) s.points.push_back({Rational(a), Rational(b)});
  }
  HamSandwichOptions o;
  o.seed = 7;
  MultiPoly p = ham_sandwich_poly({s}, 1, o);
  REQUIRE(!p.is_zero());
  CHECK(p.degree() <= 1);
  auto c = census_of(p, s);
  CHECK(std::abs(static_cast<double>(c.pos - c.neg)) <=
        o.tol * 4 + static_cast<double>(c.zero));
  CHECK(c.pos + c.neg + c.zero == 4);
}

TEST_CASE("ham sandwich bisects two sets simultaneously") {
  PointSet a, b;
  a.n_vars = b.n_vars = 2;
  a.points = {{Rational(0), Rational(0)}, {Rational(0), Rational(1)}};
  b.points = {{Rational(1), Rational(0)}, {Rational(1), Rational(1)}};
  HamSandwichOptions o;
  o.seed = 11;
  MultiPoly p = ham_sandwich_poly({a, b}, 1, o);
  // Enumeration oracle: both sets balanced under exact signs.
  for (const auto* s : {&a, &b}) {
    auto c = census_of(p, *s);
    CHECK(std::abs(c.pos - c.neg) <= c.zero);
  }
}

TEST_CASE("ham sandwich on collinear points matches the axis cut oracle") {
  // 2m points on the x1-axis; a vertical line through the median gap has
  // zero imbalance, so a valid cut exists and the search must find one.
  const int m = 12;
  PointSet s;
  s.n_vars = 2;
  for (int i = 0; i < 2 * m; ++i) {
    s.points.push_back({Rational(i * i + 1, 7), Rational(0)});
  }
  CHECK(best_axis_cut_imbalance(s) == 0);
  HamSandwichOptions o;
  o.seed = 3;
  MultiPoly p = ham_sandwich_poly({s}, 1, o);
  auto c = census_of(p, s);
  CHECK(std::abs(static_cast<double>(c.pos - c.neg)) <=
        o.tol * 2 * m + static_cast<double>(c.zero));
}

TEST_CASE("ham sandwich input validation") {
  CHECK_THROWS_AS(ham_sandwich_poly({}, 1), EmptyInput);
  PointSet s;
  s.n_vars = 2;
  s.points = {{Rational(0), Rational(0)}};
  // Degree 1 in the plane supports two sets at most.
  CHECK_THROWS_AS(ham_sandwich_poly({s, s, s}, 1), std::invalid_argument);
  HamSandwichOptions o;
  o.tol = 0.7;
  CHECK_THROWS_AS(ham_sandwich_poly({s}, 1, o), std::invalid_argument);
}

TEST_CASE("round degree schedule matches the counting bound") {
  // Minimal d with binomial(d+2,2)-1 >= 2^(i-1), frozen for n = 2.
  std::vector<long> sets = {1, 2, 4, 8, 16, 32};
  std::vector<int> expect = {1, 1, 2, 3, 5, 7};
  for (size_t i = 0; i < sets.size(); ++i) {
    CHECK(min_degree_for_sets(2, sets[i]) == expect[i]);
  }
  int total = 0;
  for (int d : expect) total += d;
  CHECK(total <= 4 * 8);
}

TEST_CASE("partition of a single point is a single cell with empty wall") {
  PointSet s;
  s.n_vars = 2;
  s.points = {{Rational(1, 3), Rational(2, 5)}};
  auto tree = partition_points(s, 8, 0.05, 5);
  CHECK(tree.executed_levels() == 0);
  REQUIRE(tree.cells.size() == 1);
  CHECK(tree.cells.count({}) == 1);
  CHECK(cell_counts(tree).wall == 0);
  CHECK(tree.product_poly.degree() == 0);
}

TEST_CASE("partition of 1024 random points at degree 8") {
  PointSet X = random_square_points(1024, 20260819);
  auto tree = partition_points(X, 8, 0.05, 1);
  const int j = tree.executed_levels();
  CHECK(j == 6);  // floor(2*log2(8)), no early stop at this density

  // Reassignment oracle: recompute each sign vector from the level
  // polynomials with exact arithmetic and compare with the cell key.
  size_t seen = 0;
  size_t nonwall_cells = 0;
  double bound = std::pow(0.55, j) * 1024.0;
  for (const auto& [key, idxs] : tree.cells) {
    REQUIRE(key.size() == static_cast<size_t>(j));
    for (size_t i : idxs) {
      CHECK(tree.sign_vector_of(X.points[i]) == key);
    }
    seen += idxs.size();
    if (!is_wall_key(key)) {
      ++nonwall_cells;
      CHECK(static_cast<double>(idxs.size()) <= bound);
    }
  }
  CHECK(seen == 1024);
  CHECK(nonwall_cells <= (1u << j));

  // Degree accounting: schedule prefix and the product identity.
  std::vector<int> expect = {1, 1, 2, 3, 5, 7};
  int sum = 0;
  for (int i = 0; i < j; ++i) {
    CHECK(tree.levels[i].degree() <= expect[i]);
    sum += tree.levels[i].degree();
  }
  CHECK(tree.product_poly.degree() == sum);
  CHECK(sum <= 4 * 8);
}

TEST_CASE("cell counts on 1000 points with three rounds") {
  PointSet X = random_square_points(1000, 77);
  auto tree = partition_points(X, 3, 0.05, 2);  // floor(2*log2(3)) = 3
  REQUIRE(tree.executed_levels() == 3);
  auto cc = cell_counts(tree);
  CHECK(cc.total == 1000);
  size_t nonwall = 0;
  for (const auto& [key, cnt] : cc.per_cell) {
    if (is_wall_key(key)) continue;
    ++nonwall;
    CHECK(cnt <= 170);
  }
  CHECK(nonwall <= 8);
  size_t wall_sum = 0;
  for (const auto& [key, cnt] : cc.per_cell) {
    if (is_wall_key(key)) wall_sum += cnt;
  }
  CHECK(cc.wall == wall_sum);
}

TEST_CASE("identical seeds reproduce the tree bit for bit") {
  PointSet X = random_square_points(256, 9);
  auto t1 = partition_points(X, 4, 0.05, 123);
  auto t2 = partition_points(X, 4, 0.05, 123);
  REQUIRE(t1.levels.size() == t2.levels.size());
  for (size_t i = 0; i < t1.levels.size(); ++i) {
    CHECK(t1.levels[i].to_text() == t2.levels[i].to_text());
  }
  CHECK(t1.cells == t2.cells);
}

TEST_CASE("tree json round trip") {
  PointSet X = random_square_points(64, 4);
  auto tree = partition_points(X, 2, 0.05, 6);
  auto back = PartitionTree::from_json(tree.to_json());
  CHECK(back.n_vars == tree.n_vars);
  CHECK(back.n_points == tree.n_points);
  CHECK(back.cells == tree.cells);
  REQUIRE(back.levels.size() == tree.levels.size());
  for (size_t i = 0; i < tree.levels.size(); ++i) {
    CHECK(back.levels[i] == tree.levels[i]);
  }
  CHECK(back.product_poly == tree.product_poly);
}

TEST_CASE("sign vector text form") {
  SignVector sv = {1, -1, 0, 1};
  CHECK(sign_vector_to_string(sv) == "+-0+");
  CHECK(sign_vector_from_string("+-0+") == sv);
  CHECK(sign_vector_to_string({}) == "");
  CHECK(is_wall_key({1, 0, -1}));
  CHECK(!is_wall_key({1, 1, -1}));
}

TEST_CASE("perturbation removes the singular line of x1 squared") {
  MultiPoly p(2);
  p.set_term({2, 0}, Rational(1));  // gradient vanishes along x1 = 0
  MultiPoly q = perturb_nonsingular(p, {}, 0.05, 42);
  CHECK(!(q == p));

  // Gradient sampling oracle, exact arithmetic at dyadic sample points.
  CompiledPoly cq(q);
  auto grads = q.gradient();
  CounterRng rng(777);
  int landed = 0;
  for (int trial = 0; trial < 4000 && landed < 200; ++trial) {
    std::vector<double> x = {rng.uniform(trial, 0, -2.0, 2.0),
                             rng.uniform(trial, 1, -2.0, 2.0)};
    std::vector<double> g(2);
    for (int it = 0; it < 30; ++it) {
      double v = cq.eval(x.data());
      if (std::abs(v) < 1e-6) break;
      cq.grad(x.data(), g.data());
      double g2 = g[0] * g[0] + g[1] * g[1];
      if (g2 < 1e-300) break;
      x[0] -= v * g[0] / g2;
      x[1] -= v * g[1] / g2;
    }
    if (std::abs(cq.eval(x.data())) >= 1e-6) continue;
    ++landed;
    RatPoint xr = {dyadic_from_double(x[0], 30), dyadic_from_double(x[1], 30)};
    bool nonzero = false;
    for (const auto& gi : grads) {
      if (sign_of(gi.eval(xr)) != 0) nonzero = true;
    }
    CHECK(nonzero);
  }
  CHECK(landed > 0);
}

TEST_CASE("perturbation applies jitter even when p is already nonsingular") {
  MultiPoly p(2);
  p.set_term({1, 0}, Rational(1));  // p = x1, gradient never vanishes
  MultiPoly q = perturb_nonsingular(p, {}, 0.05, 8);
  CHECK(!(q == p));
  CHECK(q.degree() >= 1);
}

TEST_CASE("perturbation rejects the zero polynomial") {
  MultiPoly z(2);
  CHECK_THROWS_AS(perturb_nonsingular(z, {}, 0.05), std::invalid_argument);
}

TEST_CASE("perturbation keeps sets balanced within twice the tolerance") {
  PointSet X = random_square_points(400, 15);
  HamSandwichOptions o;
  o.seed = 19;
  MultiPoly p = ham_sandwich_poly({X}, 2, o);
  MultiPoly q = perturb_nonsingular(p, {X}, o.tol, 21);
  auto c = census_of(q, X);
  CHECK(std::abs(static_cast<double>(c.pos - c.neg)) <=
        2.0 * o.tol * 400.0 + static_cast<double>(c.zero));
}
