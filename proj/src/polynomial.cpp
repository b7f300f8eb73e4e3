#include "grres/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace grres {

std::string var_name(Var v, const IndexTable& tab) {
  switch (var_kind(v)) {
    case kPl: return "x[" + tab.str(var_a(v)) + "]";
    case kRho: return "x[(" + tab.str(var_a(v)) + "," + tab.str(var_b(v)) + ")]";
    case kEps: return "eps[" + tab.str(var_a(v)) + "]";
    case kDelta: return "delta[(" + tab.str(var_a(v)) + "," + tab.str(var_b(v)) + ")]";
  }
  return "?";
}

int Monomial::degree() const {
  int d = 0;
  for (auto& [v, e] : f) d += e;
  return d;
}

int Monomial::exponent(Var v) const {
  auto it = std::lower_bound(f.begin(), f.end(), std::make_pair(v, 0));
  return (it != f.end() && it->first == v) ? it->second : 0;
}

Monomial Monomial::of(Var v, int e) {
  Monomial m;
  if (e > 0) m.f.push_back({v, e});
  return m;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  size_t i = 0, j = 0;
  while (i < f.size() || j < o.f.size()) {
    if (j == o.f.size() || (i < f.size() && f[i].first < o.f[j].first)) r.f.push_back(f[i++]);
    else if (i == f.size() || o.f[j].first < f[i].first) r.f.push_back(o.f[j++]);
    else {
      r.f.push_back({f[i].first, f[i].second + o.f[j].second});
      ++i, ++j;
    }
  }
  return r;
}

bool Monomial::divisible_by(const Monomial& o) const {
  for (auto& [v, e] : o.f)
    if (exponent(v) < e) return false;
  return true;
}

Monomial Monomial::divided(const Monomial& o) const {
  Monomial r;
  for (auto& [v, e] : f) {
    int k = e - o.exponent(v);
    if (k < 0) throw Error("not-divisible", "monomial division");
    if (k) r.f.push_back({v, k});
  }
  return r;
}

bool Monomial::coprime(const Monomial& o) const {
  for (auto& [v, e] : f)
    if (o.exponent(v)) return false;
  return true;
}

Monomial monomial_gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (auto& [v, e] : a.f) {
    int k = std::min(e, b.exponent(v));
    if (k) r.f.push_back({v, k});
  }
  return r;
}

std::string Monomial::str(const IndexTable& tab) const {
  if (f.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < f.size(); ++i) {
    if (i) s += "*";
    s += var_name(f[i].first, tab);
    if (f[i].second > 1) s += "^" + std::to_string(f[i].second);
  }
  return s;
}

mpq_class Polynomial::norm(const mpq_class& c) const {
  if (!p_) return c;
  mpz_class num = c.get_num(), den = c.get_den(), P = p_;
  mpz_class r;
  if (den != 1) {
    mpz_class inv;
    if (!mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), P.get_mpz_t()))
      throw Error("incompatible-fields", "denominator divisible by p");
    num *= inv;
  }
  mpz_mod(r.get_mpz_t(), num.get_mpz_t(), P.get_mpz_t());
  return mpq_class(r);
}

void Polynomial::check_field(const Polynomial& o) const {
  if (p_ != o.p_) throw Error("incompatible-fields", "field tags differ");
}

Polynomial Polynomial::constant(const mpq_class& c, long p) {
  Polynomial r(p);
  r.add_term(Monomial{}, c);
  return r;
}

Polynomial Polynomial::var(Var v, long p) { return mono(Monomial::of(v), 1, p); }

Polynomial Polynomial::mono(const Monomial& m, const mpq_class& c, long p) {
  Polynomial r(p);
  r.add_term(m, c);
  return r;
}

bool Polynomial::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }

mpq_class Polynomial::constant_term() const {
  auto it = t_.find(Monomial{});
  return it == t_.end() ? mpq_class(0) : it->second;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (auto& [m, c] : t_) d = std::max(d, m.degree());
  return d;
}

int Polynomial::degree_in(Var v) const {
  int d = 0;
  for (auto& [m, c] : t_) d = std::max(d, m.exponent(v));
  return d;
}

std::vector<Var> Polynomial::variables() const {
  std::vector<Var> vs;
  for (auto& [m, c] : t_)
    for (auto& [v, e] : m.f) vs.push_back(v);
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

void Polynomial::add_term(const Monomial& m, const mpq_class& c0) {
  mpq_class c = norm(c0);
  if (c == 0) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
    return;
  }
  it->second = norm(it->second + c);
  if (it->second == 0) t_.erase(it);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  check_field(o);
  Polynomial r = *this;
  for (auto& [m, c] : o.t_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator-() const {
  Polynomial r(p_);
  for (auto& [m, c] : t_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  check_field(o);
  Polynomial r(p_);
  for (auto& [m1, c1] : t_)
    for (auto& [m2, c2] : o.t_) r.add_term(m1 * m2, c1 * c2);
  return r;
}

Polynomial Polynomial::scaled(const mpq_class& c) const { return *this * constant(c, p_); }

Polynomial Polynomial::mod(long p) const {
  Polynomial r(p);
  for (auto& [m, c] : t_) r.add_term(m, c);
  return r;
}

Polynomial pow(const Polynomial& f, int e) {
  Polynomial r = Polynomial::constant(1, f.field());
  for (int i = 0; i < e; ++i) r = r * f;
  return r;
}

Polynomial Polynomial::substitute(const std::map<Var, Polynomial>& s) const {
  Polynomial r(p_);
  for (auto& [m, c] : t_) {
    Polynomial term = constant(c, p_);
    Monomial keep;
    for (auto& [v, e] : m.f) {
      auto it = s.find(v);
      if (it == s.end()) {
        keep.f.push_back({v, e});
      } else {
        check_field(it->second);
        term = term * pow(it->second, e);
      }
    }
    r = r + term * mono(keep, 1, p_);
  }
  return r;
}

Polynomial Polynomial::derivative(Var v) const {
  Polynomial r(p_);
  for (auto& [m, c] : t_) {
    int e = m.exponent(v);
    if (!e) continue;
    r.add_term(m.divided(Monomial::of(v)), c * e);
  }
  return r;
}

mpq_class Polynomial::evaluate(const std::map<Var, mpq_class>& pt) const {
  mpq_class s = 0;
  for (auto& [m, c] : t_) {
    mpq_class t = c;
    for (auto& [v, e] : m.f) {
      auto it = pt.find(v);
      if (it == pt.end()) throw Error("missing-assignment", "variable not assigned");
      for (int i = 0; i < e; ++i) t *= it->second;
    }
    s += t;
  }
  return norm(s);
}

std::string Polynomial::str(const IndexTable& tab) const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [m, c] : t_) {
    mpq_class a = c;
    bool neg = !p_ && a < 0;
    if (neg) a = -a;
    if (first) os << (neg ? "-" : "");
    else os << (neg ? " - " : " + ");
    first = false;
    if (m.is_one()) os << a.get_str();
    else if (a == 1) os << m.str(tab);
    else os << a.get_str() << "*" << m.str(tab);
  }
  return os.str();
}

}  // namespace grres
