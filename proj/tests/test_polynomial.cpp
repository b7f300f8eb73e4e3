#include <random>

#include "doctest.h"
#include "grres/polynomial.hpp"

using namespace grres;

namespace {

Var X(int i) { return make_var(kPl, i); }

Polynomial random_poly(std::mt19937& rng, long p) {
  Polynomial f(p);
  std::uniform_int_distribution<int> nterms(0, 4), var(0, 3), ex(0, 2), coef(-5, 5);
  int t = nterms(rng);
  for (int i = 0; i < t; ++i) {
    Monomial m;
    for (int v = 0; v < 4; ++v) {
      int e = ex(rng);
      if (e && var(rng) < 2) m = m * Monomial::of(X(v), e);
    }
    f.add_term(m, coef(rng));
  }
  return f;
}

}  // namespace

TEST_CASE("arithmetic") {
  auto x = Polynomial::var(X(0)), y = Polynomial::var(X(1)), z = Polynomial::var(X(2));
  auto one = Polynomial::constant(1);
  CHECK((x + one) * (x - one) == pow(x, 2) - one);
  std::map<Var, Polynomial> s{{X(0), Polynomial::constant(0)}};
  CHECK((x * y + z).substitute(s) == z);
  auto two_x = Polynomial::var(X(0), 2).scaled(2);
  CHECK(two_x.is_zero());
  CHECK((x - x).is_zero());
}

TEST_CASE("derivatives") {
  auto x = Polynomial::var(X(0)), y = Polynomial::var(X(1));
  CHECK((x * y).derivative(X(0)) == y);
  CHECK(pow(Polynomial::var(X(0), 2), 2).derivative(X(0)).is_zero());
  // main binomial of the Gr(2,4) model
  Var r = make_var(kRho, 1, 4), x34 = X(5), x13 = X(1), x24 = X(4);
  auto B = Polynomial::var(r) * Polynomial::var(x34) - Polynomial::var(x13) * Polynomial::var(x24);
  CHECK(B.derivative(x34) == Polynomial::var(r));
}

TEST_CASE("evaluation") {
  auto x = Polynomial::var(X(0)), y = Polynomial::var(X(1));
  CHECK((x + y).evaluate({{X(0), 1}, {X(1), 2}}) == 3);
  Var x13 = X(1), x14 = X(2), x23 = X(3), x24 = X(4), x34 = X(5);
  auto F = Polynomial::var(x34) - Polynomial::var(x13) * Polynomial::var(x24) +
           Polynomial::var(x14) * Polynomial::var(x23);
  std::map<Var, mpq_class> zero{{x13, 0}, {x14, 0}, {x23, 0}, {x24, 0}, {x34, 0}};
  CHECK(F.evaluate(zero) == 0);
  zero[x34] = 1;
  CHECK(F.evaluate(zero) == 1);
  CHECK_THROWS_AS(F.evaluate({{x13, 1}}), Error);
}

TEST_CASE("field tags") {
  auto a = Polynomial::var(X(0), 3), b = Polynomial::var(X(0), 5), q = Polynomial::var(X(0));
  CHECK_THROWS_AS(a + b, Error);
  CHECK_THROWS_AS(a * q, Error);
  auto f = Polynomial::constant(mpq_class(1, 2)) * q;
  CHECK(f.mod(3) == Polynomial::var(X(0), 3).scaled(2));  // 1/2 = 2 in F_3
  CHECK_THROWS_AS(f.mod(2), Error);
}

TEST_CASE("ring axioms and evaluation homomorphism") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> val(-3, 3);
  for (long p : {0L, 5L}) {
    for (int it = 0; it < 200; ++it) {
      auto a = random_poly(rng, p), b = random_poly(rng, p), c = random_poly(rng, p);
      CHECK((a * b) * c == a * (b * c));
      CHECK(a * (b + c) == a * b + a * c);
      CHECK(a + b == b + a);
      CHECK(a * b == b * a);
      std::map<Var, mpq_class> pt;
      for (int v = 0; v < 4; ++v) pt[X(v)] = val(rng);
      mpq_class lhs = (a * b + c).evaluate(pt);
      mpq_class rhs = a.evaluate(pt) * b.evaluate(pt) + c.evaluate(pt);
      if (p) {
        lhs -= rhs;
        mpz_class num = lhs.get_num();
        CHECK(num % p == 0);
      } else {
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("monomials") {
  auto m = Monomial::of(X(0), 2) * Monomial::of(X(1));
  CHECK(m.degree() == 3);
  CHECK(m.divisible_by(Monomial::of(X(0))));
  CHECK(m.divided(Monomial::of(X(0))) == Monomial::of(X(0)) * Monomial::of(X(1)));
  CHECK(!m.divisible_by(Monomial::of(X(2))));
  CHECK(monomial_gcd(m, Monomial::of(X(0), 5)) == Monomial::of(X(0), 2));
  CHECK(Monomial::of(X(2)).coprime(m));
}

TEST_CASE("variable names") {
  IndexTable tab(2, 4);
  CHECK(var_name(X(5), tab) == "x[34]");
  CHECK(var_name(make_var(kRho, 1, 4), tab) == "x[(13,24)]");
  CHECK(var_name(exceptional_rename(X(5)), tab) == "eps[34]");
  CHECK(var_stem(make_var(kDelta, 1, 4)) == make_var(kRho, 1, 4));
}
