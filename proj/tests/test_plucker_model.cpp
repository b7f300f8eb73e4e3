#include <set>

#include "doctest.h"
#include "grres/plucker_model.hpp"

using namespace grres;

namespace {

// p_w as x[w] on the full index table; sign/zero conventions applied here independently.
struct Hom {
  IndexTable tab;
  explicit Hom(int d, int n) : tab(d, n) {}
  Polynomial p(Tuple raw) const {
    std::set<int> s(raw.begin(), raw.end());
    if (s.size() != raw.size()) return Polynomial();
    int inv = 0;
    for (size_t i = 0; i < raw.size(); ++i)
      for (size_t j = i + 1; j < raw.size(); ++j)
        if (raw[i] > raw[j]) ++inv;
    Tuple t(s.begin(), s.end());
    return Polynomial::var(make_var(kPl, tab.id(t))).scaled(inv % 2 ? -1 : 1);
  }
  // sum_l (-1)^l p_{h k_l} p_{k minus k_l}
  Polynomial relation(const Tuple& h, const Tuple& k) const {
    Polynomial f;
    for (size_t l = 0; l < k.size(); ++l) {
      Tuple a = h, b;
      a.push_back(k[l]);
      for (size_t j = 0; j < k.size(); ++j)
        if (j != l) b.push_back(k[j]);
      f = f + (p(a) * p(b)).scaled(l % 2 ? -1 : 1);
    }
    return f;
  }
};

Polynomial x(const Model& M, const Tuple& t) { return Polynomial::var(M.pl(t)); }
Polynomial r(const Model& M, const Tuple& a, const Tuple& b) {
  return Polynomial::var(M.rho({M.tab.id(a), M.tab.id(b)}));
}

}  // namespace

TEST_CASE("relations") {
  Hom H(2, 4);
  auto rel = plucker_relation({1}, {2, 3, 4}, 4);
  CHECK(homogeneous_poly(rel, H.tab) == H.p({1, 2}) * H.p({3, 4}) - H.p({1, 3}) * H.p({2, 4}) + H.p({1, 4}) * H.p({2, 3}));

  Hom H3(3, 6);
  auto a = plucker_relation({1, 6}, {3, 4, 5, 6}, 6);
  CHECK(a.terms.size() == 3);
  CHECK(a.rank == 0);
  CHECK(homogeneous_poly(a, H3.tab) == H3.relation({1, 6}, {3, 4, 5, 6}));
  auto b = plucker_relation({1, 2}, {3, 4, 5, 6}, 6);
  CHECK(b.terms.size() == 4);
  CHECK(b.rank == 1);
  CHECK(homogeneous_poly(b, H3.tab) == H3.relation({1, 2}, {3, 4, 5, 6}));
}

TEST_CASE("primary relations and leading variables") {
  Model M = build_model(2, 4, {1, 2});
  REQUIRE(M.blocks.size() == 1);
  CHECK(M.blocks[0].fbar == x(M, {3, 4}) - x(M, {1, 3}) * x(M, {2, 4}) + x(M, {1, 4}) * x(M, {2, 3}));
  CHECK(M.blocks[0].u == Tuple{3, 4});
  CHECK(M.blocks[0].linear == r(M, {1, 2}, {3, 4}) - r(M, {1, 3}, {2, 4}) + r(M, {1, 4}, {2, 3}));

  Hom H(2, 5);
  auto F3 = primary_relation({4, 5}, {1, 2}, 5);
  CHECK(homogeneous_poly(F3, H.tab) == H.p({1, 2}) * H.p({4, 5}) - H.p({1, 4}) * H.p({2, 5}) + H.p({1, 5}) * H.p({2, 4}));

  Model M3 = build_model(3, 6, {1, 2, 3});
  for (auto& b : M3.blocks) {
    // coefficient of the leading variable is +-1
    auto c = b.fbar.derivative(M3.pl(b.u)).constant_term();
    CHECK(abs(c) == 1);
  }
  const Block* b456 = nullptr;
  for (auto& b : M3.blocks)
    if (b.u == Tuple{4, 5, 6}) b456 = &b;
  REQUIRE(b456);
  CHECK(b456->fbar == x(M3, {4, 5, 6}) - x(M3, {1, 2, 4}) * x(M3, {3, 5, 6}) +
                          x(M3, {1, 3, 4}) * x(M3, {2, 5, 6}) - x(M3, {2, 3, 4}) * x(M3, {1, 5, 6}));
  // rank 0 relations come first, then the single rank 1 relation
  REQUIRE(M3.blocks.size() == 10);
  for (int i = 0; i < 9; ++i) CHECK(M3.blocks[i].rel.rank == 0);
  CHECK(M3.blocks[9].rel.rank == 1);
}

TEST_CASE("Gr(2,5) identities over Q") {
  Hom H(2, 5);
  auto F = [&](const Tuple& h, const Tuple& k) { return H.relation(h, k); };
  auto F1 = F({1}, {2, 3, 4}), F2 = F({1}, {2, 3, 5}), F3 = F({1}, {2, 4, 5}), F4 = F({1}, {3, 4, 5}),
       F5 = F({2}, {3, 4, 5});
  CHECK(H.p({4, 5}) * F1 == H.p({3, 4}) * F3 - H.p({2, 4}) * F4 + H.p({1, 4}) * F5);
  CHECK(H.p({4, 5}) * F2 == H.p({3, 5}) * F3 - H.p({2, 5}) * F4 + H.p({1, 5}) * F5);
  Model M = build_model(2, 5, {4, 5});
  std::set<Tuple> us;
  for (auto& b : M.blocks) us.insert(b.u);
  CHECK(us == std::set<Tuple>{{1, 2}, {1, 3}, {2, 3}});
}

TEST_CASE("binomial families") {
  Model M = build_model(2, 4, {1, 2}, 2);
  REQUIRE(M.mains.size() == 2);
  auto B1 = r(M, {1, 3}, {2, 4}) * x(M, {3, 4}) - r(M, {1, 2}, {3, 4}) * x(M, {1, 3}) * x(M, {2, 4});
  auto B2 = r(M, {1, 4}, {2, 3}) * x(M, {3, 4}) - r(M, {1, 2}, {3, 4}) * x(M, {1, 4}) * x(M, {2, 3});
  CHECK(M.mains[0].poly() == B1);
  CHECK(M.mains[1].poly() == B2);
  REQUIRE(M.residuals.size() == 1);
  auto R = r(M, {1, 3}, {2, 4}) * x(M, {1, 4}) * x(M, {2, 3}) - r(M, {1, 4}, {2, 3}) * x(M, {1, 3}) * x(M, {2, 4});
  CHECK((M.residuals[0].poly() == R || M.residuals[0].poly() == -R));
  CHECK(M.quotients.empty());

  Model M5 = build_model(2, 5, {4, 5});
  CHECK(M5.mains.size() == 6);
  CHECK(M5.residuals.size() == 3);
  for (auto& q : M5.quotients) CHECK(rho_image(M5, q.plus) == rho_image(M5, q.minus));

  // main binomials times x_{u_F}: residual identity holds
  for (auto* Mp : {&M, &M5}) {
    const Model& Mx = *Mp;
    for (auto& Rb : Mx.residuals) {
      auto& Bs = Mx.mains[Mx.main_index(Rb.k, Rb.tau)];
      auto& Bt = Mx.mains[Mx.main_index(Rb.k, Rb.t)];
      const Block& b = Mx.blocks[Rb.k - 1];
      auto cof = [&](int tau) { return x(Mx, Mx.tab.at(b.pairs[tau].first)) * x(Mx, Mx.tab.at(b.pairs[tau].second)); };
      CHECK(Polynomial::var(Mx.pl(b.u)) * Rb.poly() == cof(Rb.t) * Bs.poly() - cof(Rb.tau) * Bt.poly());
    }
  }
}

TEST_CASE("quotient binomials by brute force on Gr(2,4)") {
  Model M = build_model(2, 4, {1, 2}, 2);
  // three rho variables with pairwise distinct images; no two distinct monomials of degree <= 2 agree
  std::map<Monomial, int> seen;
  std::vector<Var> rv;
  for (auto& p : M.blocks[0].pairs) rv.push_back(M.rho(p));
  for (size_t i = 0; i < rv.size(); ++i)
    for (size_t j = i; j < rv.size(); ++j) seen[rho_image(M, Monomial::of(rv[i]) * Monomial::of(rv[j]))]++;
  for (auto& [m, c] : seen) CHECK(c == 1);
  CHECK(M.quotients.empty());
}

TEST_CASE("generation through basic variables") {
  struct C {
    int d, n;
    Tuple m;
  };
  for (auto c : {C{2, 4, {1, 2}}, C{2, 5, {4, 5}}, C{2, 6, {5, 6}}, C{3, 6, {1, 2, 3}}}) {
    Model M = build_model(c.d, c.n, c.m, 1);
    auto e = express_in_basic(M);
    for (auto& b : M.blocks) CHECK(b.fbar.substitute(e).is_zero());
    for (auto& [v, f] : e)
      for (Var w : f.variables()) CHECK(is_basic_index(M.tab.at(var_a(w)), M.m));
  }
  Model M = build_model(2, 4, {1, 2}, 1);
  auto e = express_in_basic(M);
  CHECK(e.at(M.pl({3, 4})) == x(M, {1, 3}) * x(M, {2, 4}) - x(M, {1, 4}) * x(M, {2, 3}));
}

TEST_CASE("model dimension") {
  for (auto [d, n, m] : std::vector<std::tuple<int, int, Tuple>>{{2, 4, {1, 2}}, {2, 5, {4, 5}}, {3, 6, {1, 2, 3}}}) {
    Model M = build_model(d, n, m, 1);
    size_t tsum = 0;
    for (auto& b : M.blocks) tsum += b.pairs.size() - 1;
    CHECK(M.mains.size() == tsum);
    CHECK(M.pl_vars().size() == (size_t)binom(n, d) - 1);
  }
  CHECK_THROWS_AS(build_model(2, 4, {1, 5}), Error);
}
