#include "plab/unipoly.hpp"

#include <algorithm>

namespace plab {

UniPoly::UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  strip();
}

UniPoly UniPoly::constant(const Rational& c) {
  UniPoly p;
  if (c != 0) p.coeffs_ = {c};
  return p;
}

void UniPoly::strip() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

const Rational& UniPoly::coeff(int k) const {
  static const Rational zero(0);
  if (k < 0 || k > degree()) return zero;
  return coeffs_[k];
}

Rational UniPoly::eval(const Rational& t) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * t + *it;
  }
  return acc;
}

double UniPoly::eval(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * t + it->get_d();
  }
  return acc;
}

UniPoly UniPoly::derivative() const {
  if (coeffs_.size() <= 1) return UniPoly();
  std::vector<Rational> d(coeffs_.size() - 1);
  for (size_t k = 1; k < coeffs_.size(); ++k) {
    d[k - 1] = coeffs_[k] * static_cast<long>(k);
  }
  return UniPoly(std::move(d));
}

UniPoly UniPoly::operator+(const UniPoly& o) const {
  std::vector<Rational> r(std::max(coeffs_.size(), o.coeffs_.size()), 0);
  for (size_t i = 0; i < coeffs_.size(); ++i) r[i] += coeffs_[i];
  for (size_t i = 0; i < o.coeffs_.size(); ++i) r[i] += o.coeffs_[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator-(const UniPoly& o) const {
  std::vector<Rational> r(std::max(coeffs_.size(), o.coeffs_.size()), 0);
  for (size_t i = 0; i < coeffs_.size(); ++i) r[i] += coeffs_[i];
  for (size_t i = 0; i < o.coeffs_.size(); ++i) r[i] -= o.coeffs_[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator*(const UniPoly& o) const {
  if (is_zero() || o.is_zero()) return UniPoly();
  std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1, 0);
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    for (size_t j = 0; j < o.coeffs_.size(); ++j) {
      r[i + j] += coeffs_[i] * o.coeffs_[j];
    }
  }
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator*(const Rational& c) const {
  if (c == 0) return UniPoly();
  std::vector<Rational> r = coeffs_;
  for (auto& v : r) v *= c;
  return UniPoly(std::move(r));
}

UniPoly UniPoly::remainder(const UniPoly& d) const {
  if (d.is_zero()) throw ZeroPolynomial();
  std::vector<Rational> r = coeffs_;
  int dd = d.degree();
  const Rational& lead = d.coeffs_.back();
  for (int k = static_cast<int>(r.size()) - 1; k >= dd; --k) {
    if (r[k] == 0) continue;
    Rational f = r[k] / lead;
    r[k] = 0;
    for (int j = 0; j < dd; ++j) {
      r[k - dd + j] -= f * d.coeffs_[j];
    }
  }
  return UniPoly(std::move(r));
}

UniPoly UniPoly::primitive_part() const {
  if (is_zero()) return UniPoly();
  // Divide by gcd of numerators times lcm of denominators, normalized so the
  // leading coefficient is positive.
  mpz_class num_gcd = 0;
  mpz_class den_lcm = 1;
  for (const auto& c : coeffs_) {
    if (c == 0) continue;
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(),
            c.get_num().get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(),
            c.get_den().get_mpz_t());
  }
  Rational scale(den_lcm, num_gcd);
  scale.canonicalize();
  if (coeffs_.back() < 0) scale = -scale;
  return *this * scale;
}

UniPoly UniPoly::gcd(const UniPoly& o) const {
  UniPoly a = primitive_part();
  UniPoly b = o.primitive_part();
  while (!b.is_zero()) {
    UniPoly r = a.remainder(b).primitive_part();
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

UniPoly UniPoly::squarefree_part() const {
  if (is_zero()) return UniPoly();
  if (degree() == 0) return UniPoly::constant(Rational(1));
  UniPoly g = gcd(derivative());
  if (g.degree() == 0) return primitive_part();
  // Exact division: (this * 1/lead(g)) / g has zero remainder.
  UniPoly p = primitive_part();
  std::vector<Rational> q(p.degree() - g.degree() + 1, 0);
  std::vector<Rational> r = p.coeffs_;
  int dg = g.degree();
  const Rational& lead = g.coeffs_.back();
  for (int k = static_cast<int>(r.size()) - 1; k >= dg; --k) {
    if (r[k] == 0) continue;
    Rational f = r[k] / lead;
    q[k - dg] = f;
    for (int j = 0; j <= dg; ++j) r[k - dg + j] -= f * g.coeffs_[j];
  }
  return UniPoly(std::move(q)).primitive_part();
}

Rational UniPoly::cauchy_root_bound() const {
  if (is_zero()) throw ZeroPolynomial();
  Rational m = 0;
  const Rational& lead = coeffs_.back();
  for (size_t i = 0; i + 1 < coeffs_.size(); ++i) {
    Rational v = abs(coeffs_[i] / lead);
    if (v > m) m = v;
  }
  return m + 1;
}

std::vector<UniPoly> sturm_chain(const UniPoly& p) {
  std::vector<UniPoly> chain;
  chain.push_back(p.primitive_part());
  UniPoly d = p.derivative();
  if (d.is_zero()) return chain;
  chain.push_back(d.primitive_part());
  while (true) {
    const UniPoly& a = chain[chain.size() - 2];
    const UniPoly& b = chain[chain.size() - 1];
    UniPoly r = a.remainder(b);
    if (r.is_zero()) break;
    chain.push_back((r * Rational(-1)).primitive_part());
    if (chain.back().degree() == 0) break;
  }
  return chain;
}

int sign_changes_at(const std::vector<UniPoly>& chain, const Rational& t) {
  int changes = 0;
  int prev = 0;
  for (const auto& q : chain) {
    int s = sign_of(q.eval(t));
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++changes;
    prev = s;
  }
  return changes;
}

namespace {

// Root count of a squarefree polynomial u on (a, b] where u(a) != 0 and
// u(b) != 0, via Sturm's theorem (so actually the open-interval count).
int sturm_count_clean(const std::vector<UniPoly>& chain, const Rational& a,
                      const Rational& b) {
  return sign_changes_at(chain, a) - sign_changes_at(chain, b);
}

}  // namespace

int UniPoly::count_real_roots(const Rational& a, const Rational& b) const {
  if (is_zero()) throw ZeroPolynomial();
  if (!(a < b)) return 0;
  if (degree() == 0) return 0;
  UniPoly u = squarefree_part();
  if (u.degree() == 0) return 0;
  bool root_at_b = false;
  // Divide out roots that sit exactly on an endpoint so Sturm's hypothesis
  // holds; the half-open convention excludes a and includes b.
  auto divide_root = [](UniPoly& q, const Rational& r) {
    // q := q / (x - r), exact since q(r) == 0.
    std::vector<Rational> c = q.coeffs();
    std::vector<Rational> out(c.size() - 1, 0);
    Rational carry = 0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
      carry = c[k] + carry * r;
      out[k - 1] = carry;
    }
    q = UniPoly(std::move(out));
  };
  while (!u.is_zero() && u.degree() >= 1 && u.eval(a) == 0) divide_root(u, a);
  if (!u.is_zero() && u.degree() >= 1 && u.eval(b) == 0) {
    root_at_b = true;
    divide_root(u, b);
  }
  if (u.degree() < 1) return root_at_b ? 1 : 0;
  auto chain = sturm_chain(u);
  return sturm_count_clean(chain, a, b) + (root_at_b ? 1 : 0);
}

std::vector<std::pair<Rational, Rational>> UniPoly::isolate_roots(
    const Rational& a, const Rational& b) const {
  std::vector<std::pair<Rational, Rational>> out;
  if (is_zero()) throw ZeroPolynomial();
  if (!(a < b) || degree() < 1) return out;
  UniPoly u = squarefree_part();
  if (u.degree() < 1) return out;
  struct Seg {
    Rational lo, hi;
    int count;
  };
  auto count_in = [&u](const Rational& lo, const Rational& hi) {
    return u.count_real_roots(lo, hi);
  };
  std::vector<Seg> work;
  int total = count_in(a, b);
  if (total > 0) work.push_back({a, b, total});
  while (!work.empty()) {
    Seg s = work.back();
    work.pop_back();
    if (s.count == 1) {
      out.emplace_back(s.lo, s.hi);
      continue;
    }
    Rational mid = (s.lo + s.hi) / 2;
    int left = count_in(s.lo, mid);
    int right = s.count - left;
    if (left > 0) work.push_back({s.lo, mid, left});
    if (right > 0) work.push_back({mid, s.hi, right});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

}  // namespace plab
