#pragma once
#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "grres/indices.hpp"

namespace grres {

// Variable ids pack (kind, a, b) where a, b index the lex-enumerated I_{d,n}.
enum VarKind : uint32_t { kPl = 0, kRho = 1, kEps = 2, kDelta = 3 };
using Var = uint32_t;

inline Var make_var(VarKind k, int a, int b = 0) {
  if (k == kRho || k == kDelta) {
    if (a > b) std::swap(a, b);
  }
  return (uint32_t(k) << 24) | (uint32_t(a) << 12) | uint32_t(b);
}
inline VarKind var_kind(Var v) { return VarKind(v >> 24); }
inline int var_a(Var v) { return int((v >> 12) & 0xfff); }
inline int var_b(Var v) { return int(v & 0xfff); }
inline bool is_pair_var(Var v) { return var_kind(v) == kRho || var_kind(v) == kDelta; }
inline bool is_exceptional_name(Var v) { return var_kind(v) == kEps || var_kind(v) == kDelta; }
// x_w -> eps_w, x_(u,v) -> delta_(u,v); exceptional names are kept.
inline Var exceptional_rename(Var v) {
  if (var_kind(v) == kPl) return make_var(kEps, var_a(v));
  if (var_kind(v) == kRho) return make_var(kDelta, var_a(v), var_b(v));
  return v;
}
// Name stem: the underlying x-name regardless of exceptional renaming.
inline Var var_stem(Var v) {
  if (var_kind(v) == kEps) return make_var(kPl, var_a(v));
  if (var_kind(v) == kDelta) return make_var(kRho, var_a(v), var_b(v));
  return v;
}

std::string var_name(Var v, const IndexTable& tab);

// Sorted by variable, exponents positive.
struct Monomial {
  std::vector<std::pair<Var, int>> f;
  bool operator<(const Monomial& o) const { return f < o.f; }
  bool operator==(const Monomial& o) const { return f == o.f; }
  bool is_one() const { return f.empty(); }
  int degree() const;
  int exponent(Var v) const;
  Monomial operator*(const Monomial& o) const;
  static Monomial of(Var v, int e = 1);
  bool divisible_by(const Monomial& o) const;
  Monomial divided(const Monomial& o) const;
  bool coprime(const Monomial& o) const;
  std::string str(const IndexTable& tab) const;
};
Monomial monomial_gcd(const Monomial& a, const Monomial& b);

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(long p) : p_(p) {}
  static Polynomial constant(const mpq_class& c, long p = 0);
  static Polynomial var(Var v, long p = 0);
  static Polynomial mono(const Monomial& m, const mpq_class& c = 1, long p = 0);

  long field() const { return p_; }
  const std::map<Monomial, mpq_class>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  mpq_class constant_term() const;
  size_t size() const { return t_.size(); }
  int total_degree() const;
  int degree_in(Var v) const;
  std::vector<Var> variables() const;
  bool contains(Var v) const { return degree_in(v) > 0; }

  void add_term(const Monomial& m, const mpq_class& c);
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator-() const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(const mpq_class& c) const;
  bool operator==(const Polynomial& o) const { return p_ == o.p_ && t_ == o.t_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }

  // Reduce coefficients into F_p (p > 0); denominators must be invertible.
  Polynomial mod(long p) const;
  Polynomial substitute(const std::map<Var, Polynomial>& s) const;
  Polynomial derivative(Var v) const;
  mpq_class evaluate(const std::map<Var, mpq_class>& pt) const;
  std::string str(const IndexTable& tab) const;

 private:
  void check_field(const Polynomial& o) const;
  mpq_class norm(const mpq_class& c) const;
  long p_ = 0;
  std::map<Monomial, mpq_class> t_;
};

Polynomial pow(const Polynomial& f, int e);

}  // namespace grres
