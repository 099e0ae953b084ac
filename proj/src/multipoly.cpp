#include "plab/multipoly.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "plab/line3.hpp"
#include "plab/unipoly.hpp"

namespace plab {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

namespace {

void enumerate_monomials(int n_vars, int degree, int pos, Monomial& cur,
                         std::vector<Monomial>& out) {
  if (pos == n_vars) {
    if (degree == 0) out.push_back(cur);
    return;
  }
  // Largest exponent on the earliest variable first matches graded-lex.
  for (int e = degree; e >= 0; --e) {
    cur[pos] = e;
    enumerate_monomials(n_vars, degree - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<Monomial> monomials_up_to(int n_vars, int max_degree) {
  if (n_vars < 1) throw std::invalid_argument("need at least one variable");
  if (max_degree < 0) throw std::invalid_argument("negative degree");
  std::vector<Monomial> out;
  out.reserve(static_cast<size_t>(binomial(max_degree + n_vars, n_vars)));
  Monomial cur(n_vars, 0);
  for (int d = 0; d <= max_degree; ++d) {
    enumerate_monomials(n_vars, d, 0, cur, out);
  }
  return out;
}

MultiPoly MultiPoly::constant(int n_vars, const Rational& c) {
  MultiPoly p(n_vars);
  p.set_term(Monomial(n_vars, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(int n_vars, int index) {
  if (index < 0 || index >= n_vars) throw std::out_of_range("variable index");
  MultiPoly p(n_vars);
  Monomial m(n_vars, 0);
  m[index] = 1;
  p.set_term(m, Rational(1));
  return p;
}

int MultiPoly::degree() const {
  if (terms_.empty()) return -1;
  // Last key in graded-lex order has the top total degree.
  return total_degree(terms_.rbegin()->first);
}

void MultiPoly::set_term(const Monomial& m, const Rational& c) {
  if (static_cast<int>(m.size()) != n_vars_) {
    throw std::invalid_argument("monomial arity mismatch");
  }
  if (c == 0) {
    terms_.erase(m);
  } else {
    terms_[m] = c;
  }
}

void MultiPoly::add_term(const Monomial& m, const Rational& c) {
  if (static_cast<int>(m.size()) != n_vars_) {
    throw std::invalid_argument("monomial arity mismatch");
  }
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (c != 0) terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
  if (n_vars_ != o.n_vars_) throw std::invalid_argument("arity mismatch");
  MultiPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

MultiPoly MultiPoly::operator-(const MultiPoly& o) const {
  if (n_vars_ != o.n_vars_) throw std::invalid_argument("arity mismatch");
  MultiPoly r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
  return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
  if (n_vars_ != o.n_vars_) throw std::invalid_argument("arity mismatch");
  MultiPoly r(n_vars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m(n_vars_);
      for (int i = 0; i < n_vars_; ++i) m[i] = ma[i] + mb[i];
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

MultiPoly MultiPoly::operator*(const Rational& c) const {
  MultiPoly r(n_vars_);
  if (c == 0) return r;
  for (const auto& [m, v] : terms_) r.terms_[m] = v * c;
  return r;
}

MultiPoly MultiPoly::operator-() const { return *this * Rational(-1); }

Rational MultiPoly::eval(const RatPoint& x) const {
  if (static_cast<int>(x.size()) != n_vars_) {
    throw std::invalid_argument("point arity mismatch");
  }
  Rational acc = 0;
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (int i = 0; i < n_vars_; ++i) {
      for (int e = 0; e < m[i]; ++e) t *= x[i];
    }
    acc += t;
  }
  return acc;
}

double MultiPoly::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_vars_) {
    throw std::invalid_argument("point arity mismatch");
  }
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d();
    for (int i = 0; i < n_vars_; ++i) {
      for (int e = 0; e < m[i]; ++e) t *= x[i];
    }
    acc += t;
  }
  return acc;
}

MultiPoly MultiPoly::derivative(int index) const {
  if (index < 0 || index >= n_vars_) throw std::out_of_range("variable index");
  MultiPoly r(n_vars_);
  for (const auto& [m, c] : terms_) {
    if (m[index] == 0) continue;
    Monomial d = m;
    d[index] -= 1;
    r.add_term(d, c * m[index]);
  }
  return r;
}

std::vector<MultiPoly> MultiPoly::gradient() const {
  std::vector<MultiPoly> g;
  g.reserve(n_vars_);
  for (int i = 0; i < n_vars_; ++i) g.push_back(derivative(i));
  return g;
}

MultiPoly MultiPoly::homogeneous_part() const {
  MultiPoly r(n_vars_);
  int d = degree();
  if (d < 0) return r;
  for (const auto& [m, c] : terms_) {
    if (total_degree(m) == d) r.set_term(m, c);
  }
  return r;
}

UniPoly MultiPoly::restrict_to_line(const Line3& line) const {
  if (n_vars_ != 3) {
    throw std::invalid_argument("line restriction needs a 3-variable poly");
  }
  // Per-variable powers of (base_i + t * dir_i), built once up to the
  // maximum exponent that appears.
  int max_e[3] = {0, 0, 0};
  for (const auto& [m, c] : terms_) {
    for (int i = 0; i < 3; ++i) max_e[i] = std::max(max_e[i], m[i]);
  }
  std::vector<std::vector<UniPoly>> pow(3);
  for (int i = 0; i < 3; ++i) {
    pow[i].resize(max_e[i] + 1);
    pow[i][0] = UniPoly::constant(Rational(1));
    UniPoly lin({line.base[i], line.dir[i]});
    for (int e = 1; e <= max_e[i]; ++e) pow[i][e] = pow[i][e - 1] * lin;
  }
  UniPoly acc;
  for (const auto& [m, c] : terms_) {
    UniPoly t = UniPoly::constant(c);
    for (int i = 0; i < 3; ++i) {
      if (m[i] > 0) t = t * pow[i][m[i]];
    }
    acc = acc + t;
  }
  return acc;
}

std::string MultiPoly::to_text() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << rational_to_string(c);
    if (total_degree(m) > 0) {
      os << " *";
      for (int i = 0; i < n_vars_; ++i) {
        if (m[i] == 0) continue;
        os << " x" << (i + 1);
        if (m[i] > 1) os << "^" << m[i];
      }
    }
  }
  return os.str();
}

MultiPoly MultiPoly::from_text(const std::string& text) {
  // Grammar: term (" + " term)*, term = coeff (" * " factors)?, factors =
  // "xK" | "xK^E" separated by spaces.
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(' ');
    size_t e = s.find_last_not_of(' ');
    if (b == std::string::npos) return std::string();
    return s.substr(b, e - b + 1);
  };
  std::string t = trim(text);
  if (t.empty()) throw std::invalid_argument("empty polynomial text");
  // Split on " + " (coefficients carry their own sign).
  std::vector<std::string> parts;
  size_t pos = 0;
  while (true) {
    size_t next = t.find(" + ", pos);
    if (next == std::string::npos) {
      parts.push_back(t.substr(pos));
      break;
    }
    parts.push_back(t.substr(pos, next - pos));
    pos = next + 3;
  }
  int n_vars = 0;
  struct RawTerm {
    Rational c;
    std::vector<std::pair<int, int>> factors;  // (variable index, exponent)
  };
  std::vector<RawTerm> raw;
  for (const auto& part : parts) {
    std::string p = trim(part);
    if (p == "0") continue;
    RawTerm rt;
    size_t star = p.find(" * ");
    std::string coeff_str = star == std::string::npos ? p : p.substr(0, star);
    rt.c = rational_from_string(coeff_str);
    if (star != std::string::npos) {
      std::istringstream fs(p.substr(star + 3));
      std::string tok;
      while (fs >> tok) {
        if (tok[0] != 'x') throw std::invalid_argument("bad factor: " + tok);
        size_t caret = tok.find('^');
        int var = std::stoi(tok.substr(1, caret == std::string::npos
                                              ? std::string::npos
                                              : caret - 1));
        int exp = caret == std::string::npos
                      ? 1
                      : std::stoi(tok.substr(caret + 1));
        if (var < 1 || exp < 1) throw std::invalid_argument("bad factor");
        rt.factors.emplace_back(var - 1, exp);
        n_vars = std::max(n_vars, var);
      }
    }
    raw.push_back(std::move(rt));
  }
  if (n_vars == 0) n_vars = 1;
  MultiPoly out(n_vars);
  for (const auto& rt : raw) {
    Monomial m(n_vars, 0);
    for (auto [v, e] : rt.factors) m[v] += e;
    out.add_term(m, rt.c);
  }
  return out;
}

std::vector<Rational> veronese_lift(const RatPoint& x, int max_degree) {
  auto mons = monomials_up_to(static_cast<int>(x.size()), max_degree);
  std::vector<Rational> out;
  out.reserve(mons.size());
  for (const auto& m : mons) {
    Rational v = 1;
    for (size_t i = 0; i < x.size(); ++i) {
      for (int e = 0; e < m[i]; ++e) v *= x[i];
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> veronese_lift(std::span<const double> x, int max_degree) {
  auto mons = monomials_up_to(static_cast<int>(x.size()), max_degree);
  std::vector<double> out;
  out.reserve(mons.size());
  for (const auto& m : mons) {
    double v = 1.0;
    for (size_t i = 0; i < x.size(); ++i) {
      for (int e = 0; e < m[i]; ++e) v *= x[i];
    }
    out.push_back(v);
  }
  return out;
}

CompiledPoly::CompiledPoly(const MultiPoly& p) : n_vars(p.n_vars()) {
  if (n_vars > 4) throw std::invalid_argument("CompiledPoly supports <= 4 vars");
  for (const auto& [m, c] : p.terms()) {
    coeffs.push_back(c.get_d());
    std::array<int, 4> e = {0, 0, 0, 0};
    for (int i = 0; i < n_vars; ++i) e[i] = m[i];
    exps.push_back(e);
  }
}

double CompiledPoly::eval(const double* x) const {
  double acc = 0.0;
  for (size_t t = 0; t < coeffs.size(); ++t) {
    double v = coeffs[t];
    const auto& e = exps[t];
    for (int i = 0; i < n_vars; ++i) {
      for (int k = 0; k < e[i]; ++k) v *= x[i];
    }
    acc += v;
  }
  return acc;
}

void CompiledPoly::grad(const double* x, double* g) const {
  for (int i = 0; i < n_vars; ++i) g[i] = 0.0;
  for (size_t t = 0; t < coeffs.size(); ++t) {
    const auto& e = exps[t];
    for (int i = 0; i < n_vars; ++i) {
      if (e[i] == 0) continue;
      double v = coeffs[t] * e[i];
      for (int j = 0; j < n_vars; ++j) {
        int p = e[j] - (j == i ? 1 : 0);
        for (int k = 0; k < p; ++k) v *= x[j];
      }
      g[i] += v;
    }
  }
}

}  // namespace plab
