#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "plab/multipoly.hpp"
#include "plab/pointset.hpp"

namespace plab {

struct EmptyInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The bisection search ran out of budget without meeting its balance
// target; callers may retry with a different seed.
struct SearchFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One entry per partition level, each in {-1, 0, +1}. A zero at any level
// marks the point as lying on the wall (the zero set of that level).
using SignVector = std::vector<int>;

std::string sign_vector_to_string(const SignVector& sv);
SignVector sign_vector_from_string(const std::string& s);

inline bool is_wall_key(const SignVector& sv) {
  for (int s : sv)
    if (s == 0) return true;
  return false;
}

struct SignCounts {
  long pos = 0;
  long neg = 0;
  long zero = 0;
};

// Exact sign census of p over a point set (rational arithmetic throughout).
SignCounts count_signs(const MultiPoly& p, const PointSet& set);

struct HamSandwichOptions {
  double tol = 0.05;
  uint64_t seed = 0;
  // Restart r draws from CounterRng(seed, stream_base + r), so nested
  // callers can hand each invocation a disjoint stream range.
  uint64_t stream_base = 0;
  int restarts = 32;
  int iterations = 10000;
  // Free coefficients are snapped to denominators 2^snap_bits; for sets
  // too small to pass by parity alone, the remaining coefficients are
  // solved exactly so the set's median point sits on the zero set.
  int snap_bits = 32;
};

// Simultaneous near-bisection: returns a nonzero p with deg(p) <= degree
// such that every set satisfies |#{p>0} - #{p<0}| <= tol*|set| + #{p=0},
// verified with exact rational signs. Search: Veronese-lift the points,
// then drive the max-over-sets hinge-smoothed imbalance down over the
// coefficient sphere by multi-start projected descent, where the step is a
// least-squares correction pinning each set's median value to zero (plain
// subgradient as fallback). The finish solves a rational linear system so
// median points lie exactly on Z(p). Lowest restart index that passes the
// exact verification wins.
MultiPoly ham_sandwich_poly(const std::vector<PointSet>& sets, int degree,
                            const HamSandwichOptions& opt = {});

struct PartitionTree {
  int n_vars = 0;
  size_t n_points = 0;
  double tol = 0.05;
  std::vector<MultiPoly> levels;
  std::map<SignVector, std::vector<size_t>> cells;
  MultiPoly product_poly;

  int executed_levels() const { return static_cast<int>(levels.size()); }

  // Recomputes the sign vector of an arbitrary point against all levels.
  SignVector sign_vector_of(const RatPoint& x) const;

  std::string to_json() const;
  static PartitionTree from_json(const std::string& text);
};

// Iterated bisection: j = floor(n*log2(D)) rounds; round i splits every
// current nonzero-sign cell with one polynomial of the minimal degree d_i
// with binomial(d_i+n,n)-1 >= 2^(i-1). Points hitting sign 0 at any level
// stay on the wall and are not subdivided further. Cells that reach one
// point stop splitting, so degenerate inputs terminate early.
PartitionTree partition_points(const PointSet& X, int degree,
                               double tol = 0.05, uint64_t seed = 0);

struct CellCounts {
  std::map<SignVector, size_t> per_cell;
  size_t wall = 0;   // total over keys containing a zero
  size_t total = 0;  // equals tree.n_points
};

CellCounts cell_counts(const PartitionTree& tree);

// Coefficient jitter of relative size about 1e-6 over all monomials up to
// deg(p), then two checks: every set stays balanced within 2*tol, and the
// gradient is nonzero (exact arithmetic) at up to 10^3 points Newton-walked
// into the band {|p| < eps}. Retries the jitter up to 16 times.
MultiPoly perturb_nonsingular(const MultiPoly& p,
                              const std::vector<PointSet>& sets, double tol,
                              uint64_t seed = 0);

// Minimal d with binomial(d + n, n) - 1 >= k.
int min_degree_for_sets(int n_vars, long n_sets);

}  // namespace plab
