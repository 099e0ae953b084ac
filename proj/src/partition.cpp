#include "plab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdlib>
#include <json.hpp>

#include "plab/rng.hpp"

namespace plab {

std::string sign_vector_to_string(const SignVector& sv) {
  std::string s;
  s.reserve(sv.size());
  for (int v : sv) s.push_back(v > 0 ? '+' : (v < 0 ? '-' : '0'));
  return s;
}

SignVector sign_vector_from_string(const std::string& s) {
  SignVector sv;
  sv.reserve(s.size());
  for (char c : s) {
    if (c == '+') {
      sv.push_back(1);
    } else if (c == '-') {
      sv.push_back(-1);
    } else if (c == '0') {
      sv.push_back(0);
    } else {
      throw std::invalid_argument("bad sign vector character");
    }
  }
  return sv;
}

SignCounts count_signs(const MultiPoly& p, const PointSet& set) {
  SignCounts c;
  for (const auto& x : set.points) {
    int s = sign_of(p.eval(x));
    if (s > 0) {
      ++c.pos;
    } else if (s < 0) {
      ++c.neg;
    } else {
      ++c.zero;
    }
  }
  return c;
}

int min_degree_for_sets(int n_vars, long n_sets) {
  int d = 1;
  while (binomial(d + n_vars, n_vars) - 1 < n_sets) ++d;
  return d;
}

namespace {

// Flattened view of all points of all sets: unit-normalized double lifts
// for the search loop, exact lifts (built lazily) for verification. The
// lift basis is the tensor Chebyshev family on a dyadic box around the
// data, indexed by the same graded-lex exponent list as the monomials.
// Raw monomials of degree five and up are so strongly correlated on a
// box that every coefficient move shakes every cell at once; in this
// basis distant cells decouple and small linear solves act locally.
struct LiftedSets {
  int n_vars = 0;
  int dim = 0;
  std::vector<std::pair<size_t, size_t>> spans;  // [begin, end) per set
  std::vector<double> lift;                      // flat, spans * dim
  std::vector<std::vector<Rational>> exact;      // per flat point, lazy
  const std::vector<PointSet>* sets = nullptr;
  int degree = 0;
  std::vector<Monomial> mons;            // exponent list, graded-lex
  std::vector<Rational> lo, hi;          // dyadic box, one pair per axis

  void ensure_exact() {
    if (!exact.empty()) return;
    exact.reserve(spans.empty() ? 0 : spans.back().second);
    std::vector<std::vector<Rational>> tax(n_vars);
    for (const auto& s : *sets) {
      for (const auto& x : s.points) {
        for (int k = 0; k < n_vars; ++k) {
          Rational u = (Rational(2) * x[k] - lo[k] - hi[k]) / (hi[k] - lo[k]);
          auto& tk = tax[k];
          tk.assign(degree + 1, Rational(1));
          if (degree >= 1) tk[1] = u;
          for (int j = 2; j <= degree; ++j)
            tk[j] = Rational(2) * u * tk[j - 1] - tk[j - 2];
        }
        std::vector<Rational> row(dim, Rational(1));
        for (int j = 0; j < dim; ++j)
          for (int k = 0; k < n_vars; ++k)
            if (mons[j][k] > 0) row[j] *= tax[k][mons[j][k]];
        exact.push_back(std::move(row));
      }
    }
  }

  // The basis members as polynomials in the original coordinates, used to
  // assemble the returned polynomial from a coefficient vector.
  std::vector<MultiPoly> basis_polys() const {
    std::vector<std::vector<MultiPoly>> tax(n_vars);
    for (int k = 0; k < n_vars; ++k) {
      Rational span = hi[k] - lo[k];
      MultiPoly u = MultiPoly::variable(n_vars, k) * (Rational(2) / span) +
                    MultiPoly::constant(n_vars, -(lo[k] + hi[k]) / span);
      auto& tk = tax[k];
      tk.push_back(MultiPoly::constant(n_vars, Rational(1)));
      if (degree >= 1) tk.push_back(u);
      for (int j = 2; j <= degree; ++j)
        tk.push_back(u * tk[j - 1] * Rational(2) - tk[j - 2]);
    }
    std::vector<MultiPoly> out;
    out.reserve(mons.size());
    for (const auto& mo : mons) {
      MultiPoly b = MultiPoly::constant(n_vars, Rational(1));
      for (int k = 0; k < n_vars; ++k)
        if (mo[k] > 0) b = b * tax[k][mo[k]];
      out.push_back(std::move(b));
    }
    return out;
  }
};

LiftedSets build_lifts(const std::vector<PointSet>& sets, int degree) {
  LiftedSets L;
  L.sets = &sets;
  L.degree = degree;
  L.n_vars = sets[0].n_vars;
  L.dim = static_cast<int>(binomial(degree + L.n_vars, L.n_vars));
  L.mons = monomials_up_to(L.n_vars, degree);

  // Dyadic box strictly containing the data, snapped to 1/256 steps so the
  // exact side stays cheap.
  std::vector<double> lod(L.n_vars, std::numeric_limits<double>::infinity());
  std::vector<double> hid(L.n_vars, -std::numeric_limits<double>::infinity());
  for (const auto& s : sets) {
    for (const auto& x : s.points) {
      auto xd = to_double_vec(x);
      for (int k = 0; k < L.n_vars; ++k) {
        lod[k] = std::min(lod[k], xd[k]);
        hid[k] = std::max(hid[k], xd[k]);
      }
    }
  }
  for (int k = 0; k < L.n_vars; ++k) {
    double left = std::floor(lod[k] * 256.0) - 1.0;
    double right = std::ceil(hid[k] * 256.0) + 1.0;
    L.lo.push_back(Rational(mpz_class(left), mpz_class(256)));
    L.hi.push_back(Rational(mpz_class(right), mpz_class(256)));
  }

  std::vector<std::vector<double>> tax(L.n_vars,
                                       std::vector<double>(degree + 1, 1.0));
  std::vector<double> v(L.dim);
  size_t at = 0;
  for (const auto& s : sets) {
    L.spans.push_back({at, at + s.size()});
    for (const auto& x : s.points) {
      auto xd = to_double_vec(x);
      for (int k = 0; k < L.n_vars; ++k) {
        double lk = to_double(L.lo[k]), hk = to_double(L.hi[k]);
        double u = (2.0 * xd[k] - lk - hk) / (hk - lk);
        auto& tk = tax[k];
        if (degree >= 1) tk[1] = u;
        for (int j = 2; j <= degree; ++j)
          tk[j] = 2.0 * u * tk[j - 1] - tk[j - 2];
      }
      double norm = 0.0;
      for (int j = 0; j < L.dim; ++j) {
        double t = 1.0;
        for (int k = 0; k < L.n_vars; ++k)
          if (L.mons[j][k] > 0) t *= tax[k][L.mons[j][k]];
        v[j] = t;
        norm += t * t;
      }
      norm = std::sqrt(norm);
      // The basis contains the constant 1, so norm >= 1.
      for (int j = 0; j < L.dim; ++j) L.lift.push_back(v[j] / norm);
    }
    at += s.size();
  }
  return L;
}

bool verify_exact(const LiftedSets& L, const std::vector<Rational>& coeffs,
                  double tol_mult, double tol);

// Index (into the flat point array) of the lower median of each set, taken
// by current value; one entry per set, SIZE_MAX for an empty set. Driving
// all median values to zero balances every set to within one point.
std::vector<size_t> median_points(const LiftedSets& L,
                                  const std::vector<double>& value) {
  std::vector<size_t> med(L.spans.size(), SIZE_MAX);
  std::vector<size_t> scratch;
  for (size_t s = 0; s < L.spans.size(); ++s) {
    auto [b, e] = L.spans[s];
    if (e == b) continue;
    scratch.clear();
    for (size_t i = b; i < e; ++i) scratch.push_back(i);
    size_t mid = (scratch.size() - 1) / 2;
    std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end(),
                     [&](size_t x, size_t y) { return value[x] < value[y]; });
    med[s] = scratch[mid];
  }
  return med;
}

// Exact finish. With no interpolation constraints the coefficients are
// snapped to dyadics (a snap this small cannot cross the sign safety
// margin). With constraints, the `needy` flat indices become rows of an
// exact reduced echelon form, full pivoted; the free coefficients are
// taken bit for bit from the doubles and the pivot ones solved over Q.
// Keeping the frees exact matters: the pivot correction is then
// proportional to the tiny constraint residual of the double solution
// instead of snap noise blown up by the elimination multipliers.
bool finalize_exact(LiftedSets& L, const std::vector<double>& c,
                    std::vector<size_t> needy, int snap_bits, double tol,
                    std::vector<Rational>* out) {
  const int dim = L.dim;
  std::sort(needy.begin(), needy.end());
  needy.erase(std::unique(needy.begin(), needy.end()), needy.end());

  std::vector<Rational> coeffs(dim, Rational(0));
  std::vector<bool> is_pivot(dim, false);
  std::vector<std::vector<Rational>> rows;
  std::vector<int> pivot_col;

  if (!needy.empty()) {
    L.ensure_exact();
    rows.reserve(needy.size());
    for (size_t i : needy) rows.push_back(L.exact[i]);

    // Scale each row to unit leading magnitude (a power of two, so the
    // scaling is exact and cheap). Raw monomial rows span many orders of
    // magnitude and would otherwise drive the elimination growth, which
    // multiplies straight into the pivot coefficient corrections.
    for (auto& row : rows) {
      double big = 0.0;
      for (const auto& v : row) big = std::max(big, std::abs(to_double(v)));
      if (big <= 0.0) continue;
      int ex = 0;
      std::frexp(big, &ex);
      if (ex == 0) continue;
      Rational scale;
      if (ex > 0) {
        scale = Rational(mpz_class(1), mpz_class(1) << ex);
      } else {
        scale = Rational(mpz_class(1) << (-ex), mpz_class(1));
      }
      for (auto& v : row) v *= scale;
    }

    // Reduced echelon form, full pivoting by double magnitude.
    size_t row_at = 0;
    std::vector<bool> col_used(dim, false);
    while (row_at < rows.size()) {
      size_t best_r = SIZE_MAX;
      int best_c = -1;
      double mag = 0.0;
      for (size_t r = row_at; r < rows.size(); ++r) {
        for (int col = 0; col < dim; ++col) {
          if (col_used[col] || sgn(rows[r][col]) == 0) continue;
          double a = std::abs(to_double(rows[r][col]));
          if (a > mag) {
            mag = a;
            best_r = r;
            best_c = col;
          }
        }
      }
      if (best_r == SIZE_MAX) break;  // remaining rows are zero
      std::swap(rows[row_at], rows[best_r]);
      Rational inv = rows[row_at][best_c];
      for (int j = 0; j < dim; ++j) rows[row_at][j] /= inv;
      for (size_t r = 0; r < rows.size(); ++r) {
        if (r == row_at || sgn(rows[r][best_c]) == 0) continue;
        Rational f = rows[r][best_c];
        for (int j = 0; j < dim; ++j) rows[r][j] -= f * rows[row_at][j];
      }
      col_used[best_c] = true;
      pivot_col.push_back(best_c);
      ++row_at;
    }
    for (int col : pivot_col) is_pivot[col] = true;
  }

  for (int j = 0; j < dim; ++j) {
    if (!is_pivot[j]) {
      coeffs[j] = needy.empty() ? dyadic_from_double(c[j], snap_bits)
                                : Rational(c[j]);
    }
  }
  for (size_t r = 0; r < pivot_col.size(); ++r) {
    Rational v = 0;
    for (int j = 0; j < dim; ++j) {
      if (!is_pivot[j] && sgn(rows[r][j]) != 0) v += rows[r][j] * coeffs[j];
    }
    coeffs[pivot_col[r]] = -v;
  }
  L.ensure_exact();

  bool nonzero = false;
  for (const auto& v : coeffs) {
    if (sgn(v) != 0) nonzero = true;
  }
  if (!nonzero) {
    if (std::getenv("PLAB_HS_TRACE")) std::fprintf(stderr, "fin: zero poly\n");
    return false;
  }
  if (!verify_exact(L, coeffs, 1.0, tol)) {
    if (std::getenv("PLAB_HS_TRACE")) {
      for (size_t s = 0; s < L.spans.size(); ++s) {
        auto [b, e] = L.spans[s];
        long pos = 0, neg = 0, zero = 0;
        for (size_t i = b; i < e; ++i) {
          Rational v = 0;
          for (int k = 0; k < L.dim; ++k)
            if (sgn(coeffs[k]) != 0) v += coeffs[k] * L.exact[i][k];
          int sg = sign_of(v);
          if (sg > 0) ++pos; else if (sg < 0) ++neg; else ++zero;
        }
        double sz = static_cast<double>(e - b);
        if (std::abs(static_cast<double>(pos - neg)) > tol * sz + zero &&
            std::getenv("PLAB_HS_TRACE2") != nullptr) {
          std::fprintf(stderr,
                       "fin: set %zu size %.0f pos %ld neg %ld zero %ld\n", s,
                       sz, pos, neg, zero);
        }
      }
    }
    return false;
  }
  *out = std::move(coeffs);
  return true;
}

// Dense solve with partial pivoting (KKT systems of order <= ~70).
bool solve_dense(std::vector<double>& a, std::vector<double>& b, int k) {
  for (int i = 0; i < k; ++i) {
    int piv = i;
    double mag = std::abs(a[i * k + i]);
    for (int r = i + 1; r < k; ++r) {
      double m = std::abs(a[r * k + i]);
      if (m > mag) {
        mag = m;
        piv = r;
      }
    }
    if (mag < 1e-300) return false;
    if (piv != i) {
      for (int j = 0; j < k; ++j) std::swap(a[i * k + j], a[piv * k + j]);
      std::swap(b[i], b[piv]);
    }
    for (int r = i + 1; r < k; ++r) {
      double f = a[r * k + i] / a[i * k + i];
      if (f == 0.0) continue;
      for (int j = i; j < k; ++j) a[r * k + j] -= f * a[i * k + j];
      b[r] -= f * b[i];
    }
  }
  for (int i = k - 1; i >= 0; --i) {
    double v = b[i];
    for (int j = i + 1; j < k; ++j) v -= a[i * k + j] * b[j];
    b[i] = v / a[i * k + i];
  }
  return true;
}

// Exact pass/fail of the bisection target for snapped coefficients.
bool verify_exact(const LiftedSets& L, const std::vector<Rational>& coeffs,
                  double tol_mult, double tol) {
  for (size_t s = 0; s < L.spans.size(); ++s) {
    auto [b, e] = L.spans[s];
    long pos = 0, neg = 0, zero = 0;
    for (size_t i = b; i < e; ++i) {
      Rational v = 0;
      for (int k = 0; k < L.dim; ++k) {
        if (sgn(coeffs[k]) != 0) v += coeffs[k] * L.exact[i][k];
      }
      int sg = sign_of(v);
      if (sg > 0) {
        ++pos;
      } else if (sg < 0) {
        ++neg;
      } else {
        ++zero;
      }
    }
    double size = static_cast<double>(e - b);
    if (std::abs(static_cast<double>(pos - neg)) >
        tol_mult * tol * size + static_cast<double>(zero)) {
      return false;
    }
  }
  return true;
}

MultiPoly poly_from_coeffs(const LiftedSets& L,
                           const std::vector<Rational>& coeffs) {
  auto basis = L.basis_polys();
  MultiPoly p(L.n_vars);
  for (size_t i = 0; i < basis.size(); ++i) {
    if (sgn(coeffs[i]) != 0) p = p + basis[i] * coeffs[i];
  }
  return p;
}

}  // namespace

MultiPoly ham_sandwich_poly(const std::vector<PointSet>& sets, int degree,
                            const HamSandwichOptions& opt) {
  if (sets.empty()) throw EmptyInput("ham_sandwich_poly: no sets");
  int n = sets[0].n_vars;
  for (const auto& s : sets) {
    if (s.n_vars != n)
      throw std::invalid_argument("ham_sandwich_poly: mixed dimensions");
  }
  if (degree < 1) throw std::invalid_argument("ham_sandwich_poly: degree < 1");
  if (!(opt.tol > 0.0 && opt.tol < 0.5))
    throw std::invalid_argument("ham_sandwich_poly: tol outside (0, 1/2)");
  long capacity = binomial(degree + n, n) - 1;
  if (static_cast<long>(sets.size()) > capacity)
    throw std::invalid_argument("ham_sandwich_poly: too many sets for degree");

  LiftedSets L = build_lifts(sets, degree);
  const int dim = L.dim;
  const size_t n_points = L.lift.size() / static_cast<size_t>(dim);
  const size_t n_sets = L.spans.size();
  const int iters = opt.iterations;
  const bool trace = std::getenv("PLAB_HS_TRACE") != nullptr;

  // Values live on unit-normalized lift rows against a unit coefficient
  // vector. Snapping the coefficients to snap_bits dyadics moves any value
  // by at most sqrt(dim) * 2^-(snap_bits+1), well under a nanounit at the
  // defaults, so once every counted point clears kFloor in floats the
  // exact census of the snapped polynomial matches the float one. The
  // search aims for the roomier kGoal and settles for kFloor when the
  // widening stalls.
  const double kGoal = 1e-6;
  const double kFloor = 1e-8;

  // Balance allowance per set: the largest integer under tol*size + zeros
  // with the parity of the counted points. An odd set smaller than 1/tol
  // cannot meet the bound with signs alone, so it donates its rank middle
  // to the zero set; that pin keeps its identity for the whole restart,
  // turning the constraint into a plain linear one.
  std::vector<int> need_pin(n_sets, 0);
  std::vector<long> allow(n_sets, 0);
  for (size_t s = 0; s < n_sets; ++s) {
    auto [b, e] = L.spans[s];
    long m = static_cast<long>(e - b);
    if (m == 0) continue;
    if (m % 2 == 1 && opt.tol * static_cast<double>(m) < 1.0) need_pin[s] = 1;
    long z = need_pin[s];
    long a = static_cast<long>(std::floor(opt.tol * static_cast<double>(m))) + z;
    if ((a - (m - z)) % 2 != 0) --a;
    allow[s] = a;
  }

  std::vector<double> value(n_points, 0.0), val_try(n_points, 0.0);
  std::vector<char> pinned(n_points, 0);
  std::vector<long> sdiff(n_sets, 0), sdiff_try(n_sets, 0);
  std::vector<uint32_t> set_of(n_points, 0);
  for (size_t s = 0; s < n_sets; ++s) {
    auto [b, e] = L.spans[s];
    for (size_t i = b; i < e; ++i) set_of[i] = static_cast<uint32_t>(s);
  }

  auto sweep = [&](const std::vector<double>& cc, std::vector<double>& val) {
    for (size_t i = 0; i < n_points; ++i) {
      const double* row = L.lift.data() + i * dim;
      double v = 0.0;
      for (int k = 0; k < dim; ++k) v += cc[k] * row[k];
      val[i] = v;
    }
  };

  // Integer infeasibility f: census excess over the allowance, summed over
  // sets. f == 0 is the whole goal; the smallest counted |value| only has
  // to beat the snap noise at the very end.
  struct Census {
    long f = 0;
    double mmin = 1e300;
  };
  auto census = [&](const std::vector<double>& val, std::vector<long>& sd) {
    Census out;
    for (size_t s = 0; s < n_sets; ++s) {
      auto [b, e] = L.spans[s];
      long pos = 0, neg = 0;
      for (size_t i = b; i < e; ++i) {
        if (pinned[i]) continue;
        if (val[i] > 0.0) {
          ++pos;
        } else {
          ++neg;
        }
        double a = std::abs(val[i]);
        if (a < out.mmin) out.mmin = a;
      }
      sd[s] = pos - neg;
      long ex = std::labs(pos - neg) - allow[s];
      if (ex > 0) out.f += ex;
    }
    if (out.mmin > 1e299) out.mmin = 0.0;
    return out;
  };

  std::vector<std::pair<double, size_t>> cand;

  for (int r = 0; r < opt.restarts; ++r) {
    CounterRng rng(opt.seed, opt.stream_base + static_cast<uint64_t>(r));
    uint64_t draw = 0;
    std::vector<double> c(dim);
    for (int k = 0; k < dim; ++k) c[k] = rng.normal(draw++, 0);
    std::vector<double> c_try(dim);

    auto renorm = [&](std::vector<double>& v) {
      double nn = 0.0;
      for (double t : v) nn += t * t;
      if (nn < 1e-300) return false;
      nn = std::sqrt(nn);
      for (double& t : v) t /= nn;
      return true;
    };
    if (!renorm(c)) continue;
    sweep(c, value);

    // Pick the pins off the first sweep's ranks, then build an orthonormal
    // basis of their rows; every later move is projected onto the
    // complement, so pinned values stay at zero throughout the restart.
    std::fill(pinned.begin(), pinned.end(), 0);
    std::vector<size_t> pin_idx;
    {
      auto med = median_points(L, value);
      for (size_t s = 0; s < n_sets; ++s) {
        if (need_pin[s] && med[s] != SIZE_MAX) {
          pin_idx.push_back(med[s]);
          pinned[med[s]] = 1;
        }
      }
    }
    std::vector<std::vector<double>> qb;
    for (size_t i : pin_idx) {
      std::vector<double> q(L.lift.begin() + static_cast<long>(i) * dim,
                            L.lift.begin() + static_cast<long>(i + 1) * dim);
      for (int rep = 0; rep < 2; ++rep) {
        for (const auto& u : qb) {
          double d = 0.0;
          for (int k = 0; k < dim; ++k) d += q[k] * u[k];
          for (int k = 0; k < dim; ++k) q[k] -= d * u[k];
        }
      }
      double nq = 0.0;
      for (double v : q) nq += v * v;
      if (nq > 1e-16) {
        nq = std::sqrt(nq);
        for (double& v : q) v /= nq;
        qb.push_back(std::move(q));
      }
    }
    auto project = [&](std::vector<double>& v) {
      for (const auto& u : qb) {
        double d = 0.0;
        for (int k = 0; k < dim; ++k) d += v[k] * u[k];
        for (int k = 0; k < dim; ++k) v[k] -= d * u[k];
      }
    };
    project(c);
    if (!renorm(c)) continue;
    sweep(c, value);
    Census cur = census(value, sdiff);
    long f0 = cur.f;

    // Least-norm coefficient move sending value[idx[a]] to tgt[a] jointly,
    // inside the pin complement; writes c_try on success.
    auto joint_move = [&](const std::vector<size_t>& idx,
                          const std::vector<double>& tgt, double ridge) {
      size_t kw = idx.size();
      if (kw == 0) return false;
      std::vector<double> rows(kw * static_cast<size_t>(dim));
      std::vector<double> rhs(kw);
      for (size_t a = 0; a < kw; ++a) {
        std::vector<double> rp(
            L.lift.begin() + static_cast<long>(idx[a]) * dim,
            L.lift.begin() + static_cast<long>(idx[a] + 1) * dim);
        project(rp);
        std::copy(rp.begin(), rp.end(),
                  rows.begin() + a * static_cast<size_t>(dim));
        rhs[a] = tgt[a] - value[idx[a]];
      }
      // Near-parallel rows, typical for points of one small cell, collapse
      // onto their first representative. The dropped points ride along with
      // it anyway, and keeping them only poisons the conditioning.
      {
        std::vector<size_t> keep;
        std::vector<double> q;
        std::vector<double> w(static_cast<size_t>(dim));
        for (size_t a = 0; a < kw; ++a) {
          const double* ra = rows.data() + a * static_cast<size_t>(dim);
          std::copy(ra, ra + dim, w.begin());
          for (size_t b2 = 0; b2 < keep.size(); ++b2) {
            const double* qb = q.data() + b2 * static_cast<size_t>(dim);
            double d = 0.0;
            for (int k = 0; k < dim; ++k) d += w[k] * qb[k];
            for (int k = 0; k < dim; ++k) w[k] -= d * qb[k];
          }
          double nn = 0.0;
          for (int k = 0; k < dim; ++k) nn += w[k] * w[k];
          if (nn <= 1e-4) continue;
          double inv = 1.0 / std::sqrt(nn);
          for (int k = 0; k < dim; ++k) q.push_back(w[k] * inv);
          keep.push_back(a);
        }
        if (keep.size() < kw) {
          for (size_t a = 0; a < keep.size(); ++a) {
            if (keep[a] == a) continue;
            std::copy(rows.begin() + static_cast<long>(keep[a] * dim),
                      rows.begin() + static_cast<long>((keep[a] + 1) * dim),
                      rows.begin() + static_cast<long>(a * dim));
            rhs[a] = rhs[keep[a]];
          }
          kw = keep.size();
          rhs.resize(kw);
        }
      }
      std::vector<double> gram(kw * kw, 0.0);
      for (size_t a = 0; a < kw; ++a) {
        for (size_t b2 = a; b2 < kw; ++b2) {
          double d = 0.0;
          const double* ra = rows.data() + a * static_cast<size_t>(dim);
          const double* rb = rows.data() + b2 * static_cast<size_t>(dim);
          for (int k = 0; k < dim; ++k) d += ra[k] * rb[k];
          gram[a * kw + b2] = gram[b2 * kw + a] = d;
        }
        gram[a * kw + a] += ridge;
      }
      if (!solve_dense(gram, rhs, static_cast<int>(kw))) return false;
      // Trust cap: a near-square system can demand a wild move; a scaled
      // down version of it still descends and keeps the step local.
      double dn = 0.0;
      for (int k = 0; k < dim; ++k) {
        double d = 0.0;
        for (size_t a = 0; a < kw; ++a)
          d += rhs[a] * rows[a * static_cast<size_t>(dim) + k];
        c_try[k] = d;
        dn += d * d;
      }
      double cap = dn > 0.25 ? 0.5 / std::sqrt(dn) : 1.0;
      for (int k = 0; k < dim; ++k) c_try[k] = c[k] + cap * c_try[k];
      return true;
    };

    // Rank middle of a set over its counted points, with its value.
    auto set_middle = [&](size_t s) {
      auto [b, e] = L.spans[s];
      cand.clear();
      for (size_t i = b; i < e; ++i) {
        if (!pinned[i]) cand.push_back({value[i], i});
      }
      std::pair<double, size_t> out{0.0, SIZE_MAX};
      if (cand.empty()) return out;
      size_t mid = (cand.size() - 1) / 2;
      std::nth_element(cand.begin(), cand.begin() + static_cast<long>(mid),
                       cand.end());
      out = {cand[mid].first, cand[mid].second};
      return out;
    };

    auto attempt_exact = [&]() {
      std::vector<Rational> coeffs;
      if (!finalize_exact(L, c, pin_idx, opt.snap_bits, opt.tol, &coeffs))
        return MultiPoly(n);
      return poly_from_coeffs(L, coeffs);
    };

    // Endgame for small leftovers: a set whose excess is 2k can be closed
    // by pinning its k cheapest majority points onto the zero set, which
    // removes them from the count and widens the allowance by one each.
    // The exact interpolation shifts the other values by about the pinned
    // values' own size, so this is tried when those are tiny; the exact
    // verify inside finalize is the sole judge of success.
    auto pin_finish = [&]() {
      std::vector<size_t> needy = pin_idx;
      for (size_t s = 0; s < n_sets; ++s) {
        long ex = std::labs(sdiff[s]) - allow[s];
        if (ex <= 0) continue;
        auto [b, e] = L.spans[s];
        long m = static_cast<long>(e - b);
        double major = sdiff[s] > 0 ? 1.0 : -1.0;
        long k = static_cast<long>(
            std::ceil((static_cast<double>(std::labs(sdiff[s])) -
                       opt.tol * static_cast<double>(m)) /
                          2.0 -
                      1e-12));
        if (k <= 0) continue;
        if (k > 2) return MultiPoly(n);
        cand.clear();
        for (size_t i = b; i < e; ++i) {
          if (pinned[i]) continue;
          if ((value[i] > 0.0) == (major > 0.0))
            cand.push_back({std::abs(value[i]), i});
        }
        if (static_cast<long>(cand.size()) < k) return MultiPoly(n);
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        for (long a = 0; a < k; ++a) needy.push_back(cand[a].second);
      }
      if (needy.size() + 2 > static_cast<size_t>(dim)) return MultiPoly(n);
      std::vector<Rational> coeffs;
      if (!finalize_exact(L, c, needy, opt.snap_bits, opt.tol, &coeffs))
        return MultiPoly(n);
      return poly_from_coeffs(L, coeffs);
    };

    auto try_accept = [&](bool margin_mode, bool force = false) {
      project(c_try);
      if (!renorm(c_try)) return false;
      sweep(c_try, val_try);
      Census a2 = census(val_try, sdiff_try);
      bool take;
      if (force) {
        take = true;
      } else if (margin_mode) {
        take = a2.f < cur.f || (a2.f == cur.f && a2.mmin > cur.mmin);
      } else {
        take = a2.f <= cur.f;
      }
      if (take) {
        c.swap(c_try);
        value.swap(val_try);
        sdiff.swap(sdiff_try);
        cur = a2;
      }
      return take;
    };

    // Push every value inside the trust band out to its own side, holding
    // the points just past the band in place, accepted when the census
    // keeps and the thinnest margin grows. Runs between census moves too:
    // it keeps the walk off the cell boundaries, so sign flips stay the
    // clean two-count moves they are meant to be.
    auto widen_move = [&]() {
      cand.clear();
      for (size_t i = 0; i < n_points; ++i) {
        if (!pinned[i] && std::abs(value[i]) < kGoal)
          cand.push_back({std::abs(value[i]), i});
      }
      if (cand.empty()) return false;
      std::sort(cand.begin(), cand.end());
      size_t kw = std::min<size_t>(cand.size(), 20);
      std::vector<size_t> idx(kw);
      std::vector<double> tgt(kw);
      for (size_t a = 0; a < kw; ++a) {
        idx[a] = cand[a].second;
        double side = value[idx[a]] >= 0.0 ? 1.0 : -1.0;
        tgt[a] = side * 1.5 * kGoal;
      }
      if (kw + 4 < static_cast<size_t>(dim)) {
        std::vector<std::pair<double, size_t>> near;
        for (size_t i = 0; i < n_points; ++i) {
          double a = std::abs(value[i]);
          if (!pinned[i] && a >= kGoal && a < 4.0 * kGoal)
            near.push_back({a, i});
        }
        size_t room = static_cast<size_t>(dim) - 4 - kw;
        size_t kg = std::min(room, near.size());
        std::partial_sort(near.begin(), near.begin() + static_cast<long>(kg),
                          near.end());
        for (size_t a = 0; a < kg; ++a) {
          idx.push_back(near[a].second);
          tgt.push_back(value[near[a].second]);
        }
      }
      if (joint_move(idx, tgt, 1e-10) && try_accept(true)) return true;
      idx.resize(1);
      tgt.resize(1);
      return joint_move(idx, tgt, 1e-10) && try_accept(true);
    };

    int exact_fails = 0;
    int stall = 0;
    int t = 0;
    long best_f = cur.f;
    int t_best = 0;
    int rejects = 0;
    int pin_tries = 0;
    int gn_left = 64;
    std::vector<double> c_best = c;
    auto note = [&]() {
      rejects = 0;
      if (cur.f < best_f) {
        best_f = cur.f;
        t_best = t;
        c_best = c;
      }
    };
    const bool trace2 = std::getenv("PLAB_HS_TRACE2") != nullptr;
    for (t = 0; t < iters; ++t) {
      if (trace2 && t % 2500 == 2499) {
        long nbad = 0, wex = 0;
        for (size_t s = 0; s < n_sets; ++s) {
          long ex = std::labs(sdiff[s]) - allow[s];
          if (ex > 0) ++nbad;
          if (ex > wex) wex = ex;
        }
        std::fprintf(stderr, "  t %d f %ld nbad %ld wex %ld mmin %.2e\n", t,
                     cur.f, nbad, wex, cur.mmin);
      }
      if (cur.f == 0) {
        // Feasible in floats: widen the thin values, then finish exactly.
        cand.clear();
        for (size_t i = 0; i < n_points; ++i) {
          if (!pinned[i] && std::abs(value[i]) < kGoal)
            cand.push_back({std::abs(value[i]), i});
        }
        if (cand.empty() || (stall > 32 && cur.mmin >= kFloor)) {
          MultiPoly p = attempt_exact();
          if (!p.is_zero()) {
            if (trace)
              std::fprintf(
                  stderr,
                  "hs restart %d: done t %d f0 %ld mmin %.2e pins %zu\n", r, t,
                  f0, cur.mmin, pin_idx.size());
            return p;
          }
          if (++exact_fails > 4) break;
          for (int k = 0; k < dim; ++k) c[k] += 3e-7 * rng.normal(draw++, 1);
          project(c);
          if (!renorm(c)) break;
          sweep(c, value);
          cur = census(value, sdiff);
          stall = 0;
          continue;
        }
        bool moved = widen_move();
        if (!moved) {
          ++stall;
          if (stall > 64) {
            for (int k = 0; k < dim; ++k) c[k] += 1e-6 * rng.normal(draw++, 2);
            project(c);
            if (!renorm(c)) break;
            sweep(c, value);
            cur = census(value, sdiff);
            stall = 0;
          }
        }
        continue;
      }

      int wmask = cur.f <= 30 ? 3 : 7;
      if ((t & wmask) == wmask && widen_move()) {
        note();
        continue;
      }

      // Small stale leftovers: try to close them exactly with endgame pins.
      if (cur.f <= 12 && t - t_best > 250 && pin_tries < 24) {
        ++pin_tries;
        t_best = t;
        MultiPoly p = pin_finish();
        if (!p.is_zero()) {
          if (trace)
            std::fprintf(
                stderr,
                "hs restart %d: pinned out t %d f %ld mmin %.2e pins %zu\n", r,
                t, cur.f, cur.mmin, pin_idx.size());
          return p;
        }
      }

      // A frozen walk gets a reheat, then falls back to the best state
      // seen so far with a nudge so fresh draws explore from there.
      if (rejects > 400) {
        c = c_best;
        for (int k = 0; k < dim; ++k) c[k] += 1e-5 * rng.normal(draw++, 9);
        project(c);
        if (!renorm(c)) break;
        sweep(c, value);
        cur = census(value, sdiff);
        t_best = t;
        rejects = 0;
        gn_left = 12;
        continue;
      }

      // Census phase. The workhorse is a joint median move: send every
      // unbalanced set's rank middle just across to its minority side
      // while holding the middles of the balanced sets in place. Small
      // cells have near-parallel rows and follow their middles, so one
      // accepted move takes out most of the excess without wrecking the
      // sets already in balance. Parity leftovers are trimmed by flipping
      // one cheap majority point of one bad set; a small random step keeps
      // the walk ergodic, all judged on the integer excess under a cooling
      // Metropolis rule.
      long worst_ex = 0;
      std::vector<size_t> bad;
      for (size_t s = 0; s < n_sets; ++s) {
        long ex = std::labs(sdiff[s]) - allow[s];
        if (ex > 0) {
          bad.push_back(s);
          if (ex > worst_ex) worst_ex = ex;
        }
      }
      std::vector<char> set_bad(n_sets, 0);
      for (size_t s : bad) set_bad[s] = 1;
      // Hold rows for the most fragile bystanders: counted points nearest
      // zero, excluding anything the move itself wants to displace.
      auto add_guards = [&](std::vector<size_t>& idx, std::vector<double>& tgt,
                            bool skip_bad_sets, size_t skip_pt) {
        if (idx.size() + 4 >= static_cast<size_t>(dim)) return;
        std::vector<char> taken(n_points, 0);
        for (size_t i : idx) taken[i] = 1;
        std::vector<std::pair<double, size_t>> near;
        for (size_t i = 0; i < n_points; ++i) {
          if (pinned[i] || taken[i] || i == skip_pt) continue;
          if (skip_bad_sets && set_bad[set_of[i]]) continue;
          near.push_back({std::abs(value[i]), i});
        }
        size_t room = static_cast<size_t>(dim) - 4 - idx.size();
        size_t kg = std::min(room, near.size());
        std::partial_sort(near.begin(), near.begin() + static_cast<long>(kg),
                          near.end());
        for (size_t a = 0; a < kg; ++a) {
          idx.push_back(near[a].second);
          tgt.push_back(value[near[a].second]);
        }
      };
      double u_mv = rng.uniform(draw++, 3);
      bool gn_init = gn_left > 0 && worst_ex > 4;
      if (gn_init) --gn_left;
      if (worst_ex > 4 && (gn_init || u_mv > 0.2)) {
        std::vector<size_t> idx;
        std::vector<double> tgt;
        for (size_t s = 0; s < n_sets; ++s) {
          auto [vm, im] = set_middle(s);
          if (im == SIZE_MAX) continue;
          idx.push_back(im);
          if (std::labs(sdiff[s]) > allow[s]) {
            double major = sdiff[s] > 0 ? 1.0 : -1.0;
            tgt.push_back(-major * 1e-4 * (0.5 + rng.uniform(draw++, 8)));
          } else {
            tgt.push_back(vm);
          }
        }
        add_guards(idx, tgt, true, SIZE_MAX);
        if (idx.size() < static_cast<size_t>(dim) &&
            joint_move(idx, tgt, gn_init ? 1e-6 : 3e-4)) {
          if (try_accept(false, gn_init)) {
            note();
            continue;
          }
        }
      }
      bool have_move = false;
      if (u_mv > 0.1) {
        size_t s = bad[rng.uniform_int(draw++, 4,
                                       static_cast<uint32_t>(bad.size()))];
        auto [b, e] = L.spans[s];
        double major = sdiff[s] > 0 ? 1.0 : -1.0;
        long ex = std::labs(sdiff[s]) - allow[s];
        cand.clear();
        for (size_t i = b; i < e; ++i) {
          if (pinned[i]) continue;
          if ((value[i] > 0.0) == (major > 0.0))
            cand.push_back({std::abs(value[i]), i});
        }
        if (!cand.empty()) {
          // Flip the set's whole parity deficit in one joint move when it
          // fits; single flips at a cold temperature just trade excess
          // back and forth between sets.
          size_t want = static_cast<size_t>((ex + 1) / 2);
          size_t g = std::min({cand.size(), want, static_cast<size_t>(6)});
          if (g == 0) g = 1;
          size_t kp = std::min(cand.size(), g + 2);
          std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(kp),
                            cand.end());
          size_t off =
              rng.uniform_int(draw++, 5, static_cast<uint32_t>(kp - g + 1));
          std::vector<size_t> idx;
          std::vector<double> tgt;
          for (size_t a = off; a < off + g; ++a) {
            idx.push_back(cand[a].second);
            tgt.push_back(-major * (3.0 * cand[a].first + 20.0 * kGoal));
          }
          add_guards(idx, tgt, false, SIZE_MAX);
          have_move = joint_move(idx, tgt, 1e-8);
        }
      }
      if (!have_move) {
        double smc = 2e-3 * std::pow(0.01, static_cast<double>(t) /
                                               static_cast<double>(iters));
        for (int k = 0; k < dim; ++k)
          c_try[k] = c[k] + smc * rng.normal(draw++, 6);
      }
      project(c_try);
      if (!renorm(c_try)) continue;
      sweep(c_try, val_try);
      Census a2 = census(val_try, sdiff_try);
      long df = a2.f - cur.f;
      bool take = df <= 0;
      if (!take && a2.f <= best_f + 40) {
        double temp = 1.5 * std::pow(0.08, static_cast<double>(t) /
                                               static_cast<double>(iters));
        if (rejects > 200) temp = std::max(temp, 0.8);
        take =
            rng.uniform(draw++, 7) < std::exp(-static_cast<double>(df) / temp);
      }
      if (take) {
        c.swap(c_try);
        value.swap(val_try);
        sdiff.swap(sdiff_try);
        cur = a2;
        note();
      } else {
        ++rejects;
      }
    }
    if (trace) {
      std::fprintf(stderr,
                   "hs restart %d: f0 %ld end f %ld mmin %.2e t %d pins %zu\n",
                   r, f0, cur.f, cur.mmin, t, pin_idx.size());
      if (trace2) {
        for (size_t s = 0; s < n_sets; ++s) {
          long ex = std::labs(sdiff[s]) - allow[s];
          if (ex > 0)
            std::fprintf(stderr, "  set %zu sz %zu sdiff %ld allow %ld\n", s,
                         L.spans[s].second - L.spans[s].first, sdiff[s],
                         allow[s]);
        }
      }
    }
  }
  throw SearchFailed("ham_sandwich_poly: no restart met the balance target");
}

SignVector PartitionTree::sign_vector_of(const RatPoint& x) const {
  SignVector sv;
  sv.reserve(levels.size());
  for (const auto& p : levels) sv.push_back(sign_of(p.eval(x)));
  return sv;
}

PartitionTree partition_points(const PointSet& X, int degree, double tol,
                               uint64_t seed) {
  if (X.size() == 0) throw EmptyInput("partition_points: empty point set");
  if (degree < 1) throw std::invalid_argument("partition_points: degree < 1");
  const int n = X.n_vars;

  // j = floor(n * log2(degree)) computed in integers: 2^j <= degree^n.
  long long mass = 1;
  for (int k = 0; k < n; ++k) mass *= degree;
  int j_target = 0;
  while (j_target < 62 && (1LL << (j_target + 1)) <= mass) ++j_target;

  PartitionTree tree;
  tree.n_vars = n;
  tree.n_points = X.size();
  tree.tol = tol;
  std::vector<size_t> all(X.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  tree.cells[{}] = std::move(all);

  for (int round = 1; round <= j_target; ++round) {
    std::vector<PointSet> sets;
    std::vector<const SignVector*> set_keys;
    for (const auto& [key, idxs] : tree.cells) {
      if (is_wall_key(key) || idxs.size() < 2) continue;
      PointSet s;
      s.n_vars = n;
      s.points.reserve(idxs.size());
      for (size_t i : idxs) s.points.push_back(X.points[i]);
      sets.push_back(std::move(s));
      set_keys.push_back(&key);
    }
    if (sets.empty()) break;  // nothing left big enough to split

    long nominal = 1L << (round - 1);
    int d_i = min_degree_for_sets(n, nominal);
    HamSandwichOptions o;
    o.tol = tol;
    o.seed = seed;
    o.stream_base = 64ull * static_cast<uint64_t>(round);
    MultiPoly p = ham_sandwich_poly(sets, d_i, o);

    std::map<SignVector, std::vector<size_t>> next;
    std::map<SignVector, std::array<long, 3>> census;  // pos/neg split per key
    for (const auto& [key, idxs] : tree.cells) {
      for (size_t i : idxs) {
        int s = sign_of(p.eval(X.points[i]));
        SignVector nk = key;
        nk.push_back(s);
        next[nk].push_back(i);
        auto& c = census[key];
        c[s > 0 ? 0 : (s < 0 ? 1 : 2)] += 1;
      }
    }
    // Per-round balance check on every split cell.
    for (const auto* kp : set_keys) {
      const auto& c = census[*kp];
      double parent = static_cast<double>(c[0] + c[1] + c[2]);
      double bound = (0.5 + tol) * parent + 1e-9;
      if (static_cast<double>(c[0]) > bound ||
          static_cast<double>(c[1]) > bound) {
        throw std::logic_error("partition_points: child exceeded balance");
      }
    }
    tree.levels.push_back(std::move(p));
    tree.cells = std::move(next);
  }

  MultiPoly prod = MultiPoly::constant(n, 1);
  int deg_sum = 0;
  for (const auto& p : tree.levels) {
    prod = prod * p;
    deg_sum += p.degree();
  }
  tree.product_poly = std::move(prod);
  if (tree.product_poly.degree() != deg_sum) {
    throw std::logic_error("partition_points: product degree mismatch");
  }
  if (n <= 3 && deg_sum > 4 * degree) {
    throw std::logic_error("partition_points: degree budget exceeded");
  }
  return tree;
}

CellCounts cell_counts(const PartitionTree& tree) {
  CellCounts cc;
  for (const auto& [key, idxs] : tree.cells) {
    cc.per_cell[key] = idxs.size();
    cc.total += idxs.size();
    if (is_wall_key(key)) cc.wall += idxs.size();
  }
  return cc;
}

MultiPoly perturb_nonsingular(const MultiPoly& p,
                              const std::vector<PointSet>& sets, double tol,
                              uint64_t seed) {
  if (p.is_zero()) throw std::invalid_argument("perturb_nonsingular: p = 0");
  const int n = p.n_vars();
  const int deg = p.degree();
  const double eps_jit = 1e-6;
  auto mons = monomials_up_to(n, deg);

  double scale = 0.0;
  for (const auto& [m, c] : p.terms())
    scale = std::max(scale, std::abs(to_double(c)));

  // Sampling box: cover the data if we have any, else a default window.
  double box = 2.0;
  for (const auto& s : sets) {
    for (const auto& x : s.points) {
      for (const auto& xi : x) box = std::max(box, std::abs(to_double(xi)) + 1.0);
    }
  }

  for (int attempt = 0; attempt < 16; ++attempt) {
    CounterRng rng(seed, static_cast<uint64_t>(attempt));
    MultiPoly q = p;
    for (size_t mi = 0; mi < mons.size(); ++mi) {
      double u = rng.uniform(mi, 0, -1.0, 1.0);
      q.add_term(mons[mi], dyadic_from_double(eps_jit * scale * u, 40));
    }
    if (q.is_zero()) continue;

    bool balanced = true;
    for (const auto& s : sets) {
      auto c = count_signs(q, s);
      if (std::abs(static_cast<double>(c.pos - c.neg)) >
          2.0 * tol * static_cast<double>(s.size()) +
              static_cast<double>(c.zero)) {
        balanced = false;
        break;
      }
    }
    if (!balanced) continue;

    // Walk random starts toward the zero set; every landed sample must
    // have a nonvanishing gradient, checked in exact arithmetic.
    CompiledPoly cp(q);
    auto grads = q.gradient();
    const int want = 1000, max_trials = 20000;
    int found = 0;
    bool ok = true;
    std::vector<double> x(n), g(n);
    for (int trial = 0; trial < max_trials && found < want && ok; ++trial) {
      for (int k = 0; k < n; ++k) {
        x[k] = rng.uniform(100000 + static_cast<uint64_t>(trial),
                           static_cast<uint32_t>(1 + k), -box, box);
      }
      for (int it = 0; it < 25; ++it) {
        double v = cp.eval(x.data());
        if (std::abs(v) < eps_jit) break;
        cp.grad(x.data(), g.data());
        double g2 = 0.0;
        for (int k = 0; k < n; ++k) g2 += g[k] * g[k];
        if (g2 < 1e-300) break;
        for (int k = 0; k < n; ++k) x[k] -= v * g[k] / g2;
      }
      if (std::abs(cp.eval(x.data())) >= eps_jit) continue;
      RatPoint xr;
      xr.reserve(n);
      for (int k = 0; k < n; ++k) xr.push_back(dyadic_from_double(x[k], 30));
      bool nonzero = false;
      for (const auto& gi : grads) {
        if (sign_of(gi.eval(xr)) != 0) {
          nonzero = true;
          break;
        }
      }
      if (!nonzero) {
        ok = false;  // singular sample: re-jitter
      } else {
        ++found;
      }
    }
    if (ok) return q;
  }
  throw SearchFailed("perturb_nonsingular: 16 jitter attempts failed");
}

std::string PartitionTree::to_json() const {
  nlohmann::json j;
  j["n_vars"] = n_vars;
  j["n_points"] = n_points;
  j["tol"] = tol;
  auto levels_j = nlohmann::json::array();
  for (const auto& p : levels) levels_j.push_back(p.to_text());
  j["levels"] = std::move(levels_j);
  j["product_poly"] = product_poly.to_text();
  nlohmann::json cells_j = nlohmann::json::object();
  for (const auto& [key, idxs] : cells) {
    cells_j[sign_vector_to_string(key)] = idxs;
  }
  j["cells"] = std::move(cells_j);
  return j.dump(2);
}

PartitionTree PartitionTree::from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  PartitionTree t;
  t.n_vars = j.at("n_vars").get<int>();
  t.n_points = j.at("n_points").get<size_t>();
  t.tol = j.at("tol").get<double>();
  for (const auto& s : j.at("levels")) {
    t.levels.push_back(MultiPoly::from_text(s.get<std::string>()));
  }
  t.product_poly = MultiPoly::from_text(j.at("product_poly").get<std::string>());
  for (const auto& [k, v] : j.at("cells").items()) {
    t.cells[sign_vector_from_string(k)] = v.get<std::vector<size_t>>();
  }
  return t;
}

}  // namespace plab
