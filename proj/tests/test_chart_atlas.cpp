#include "doctest.h"
#include "grres/blowup_tower.hpp"

using namespace grres;

namespace {

Polynomial P(Var v) { return Polynomial::var(v); }

struct G24 {
  Model M = build_model(2, 4, {1, 2});
  Var x(const Tuple& t) const { return M.pl(t); }
  Var r(const Tuple& a, const Tuple& b) const { return M.rho({M.tab.id(a), M.tab.id(b)}); }
};

Monomial image(const Monomial& m, const std::map<Var, Monomial>& sub) {
  Monomial r;
  for (auto& [v, e] : m.f) {
    auto it = sub.find(v);
    Monomial t = it == sub.end() ? Monomial::of(v) : it->second;
    for (int i = 0; i < e; ++i) r = r * t;
  }
  return r;
}

}  // namespace

TEST_CASE("base charts") {
  G24 g;
  auto A = make_base_atlas(g.M, lambda_o_choices(g.M, "all"));
  CHECK(A.charts.size() == 3);
  CHECK(make_base_atlas(g.M, lambda_o_choices(g.M, "first")).charts.size() == 1);
  Model M5 = build_model(2, 5, {4, 5});
  CHECK(lambda_o_choices(M5, "all").size() == 27);
  CHECK_THROWS_AS(lambda_o_choices(g.M, "explicit:3"), Error);

  const Chart& c = A.charts[0];  // x_(12,34) absorbed
  CHECK(c.var_count() == 5 + 2);
  CHECK(!c.has(g.r({1, 2}, {3, 4})));
  CHECK(c.mains[0].poly() == P(g.r({1, 3}, {2, 4})) * P(g.x({3, 4})) - P(g.x({1, 3})) * P(g.x({2, 4})));
  for (auto& ch : A.charts) CHECK(ch.var_count() == 7);
}

TEST_CASE("blowups of a base chart") {
  G24 g;
  auto A = make_base_atlas(g.M, lambda_o_choices(g.M, "explicit:1"));
  const Chart& c = A.charts[0];  // x_(13,24) absorbed
  Var x34 = g.x({3, 4}), r1234 = g.r({1, 2}, {3, 4});
  REQUIRE(c.has(r1234));

  Chart a = blow_up_chart(c, x34, r1234, 0, 99);
  CHECK(a.eV == std::vector<int>{g.M.tab.id({3, 4})});
  CHECK(a.dV.empty());
  CHECK(a.has(exceptional_rename(x34)));
  CHECK(a.has(r1234));
  CHECK(!a.has(x34));
  CHECK(a.var_count() == c.var_count());

  Chart b = blow_up_chart(c, x34, r1234, 1, 99);
  CHECK(b.dV == std::vector<Pair>{{g.M.tab.id({1, 2}), g.M.tab.id({3, 4})}});
  CHECK(b.has(exceptional_rename(r1234)));
  CHECK(b.has(x34));

  CHECK_THROWS_AS(blow_up_chart(c, x34, g.r({1, 3}, {2, 4}), 0, 99), Error);
}

TEST_CASE("proper transforms") {
  G24 g;
  Var x34 = g.x({3, 4}), x13 = g.x({1, 3}), x24 = g.x({2, 4}), r = g.r({1, 3}, {2, 4});
  ChartBinomial B{Monomial::of(r) * Monomial::of(x34), Monomial::of(x13) * Monomial::of(x24), 0};
  auto t = blowup_map(x34, x13, 0);
  auto Bt = proper_transform_binomial(B, t);
  CHECK(Bt.poly() == P(r) - P(x13) * P(x24));

  // a center disjoint from B leaves it alone
  auto t2 = blowup_map(g.x({1, 4}), g.x({2, 3}), 0);
  CHECK(proper_transform_binomial(B, t2).poly() == B.poly());

  // deg of the exceptional parameter in the minus term drops by one
  ChartBinomial C{Monomial::of(x34), Monomial::of(x13, 3), 0};
  auto Ct = proper_transform_binomial(C, t);
  CHECK(Ct.minus.exponent(t.zeta) == 2);
  CHECK(Ct.plus.exponent(t.zeta) == 0);

  Var a = g.r({1, 2}, {3, 4}), bb = g.r({1, 3}, {2, 4}), cc = g.r({1, 4}, {2, 3});
  ChartLinear L{0, {{1, Monomial::of(a)}, {-1, Monomial::of(bb)}, {1, Monomial::of(cc)}}};
  auto tl = blowup_map(a, x34, 1);
  CHECK(pullback_linear(L, tl).poly() == P(tl.zeta) * P(a) - P(bb) + P(cc));
  CHECK(pullback_linear(L, t).poly() == L.poly());
}

TEST_CASE("tower charts: tables, variable counts, path independence") {
  G24 g;
  TowerOptions o;
  auto R = run_full_tower(g.M, o);
  auto& A = R.atlas;
  for (auto& c : A.charts) {
    CHECK(c.var_count() == 7);
    CHECK(check_tables(A, c).empty());
  }
  for (int id : A.active) {
    auto path = chart_path(A, id);
    REQUIRE(!path.empty());
    const Chart& base = A.charts[path.front()];
    const Chart& leaf = A.charts[id];
    auto sub = ancestor_map(A, path.front(), id);
    for (size_t i = 0; i < base.mains.size(); ++i) {
      Monomial p = image(base.mains[i].plus, sub), m = image(base.mains[i].minus, sub);
      Monomial gc = monomial_gcd(p, m);
      p = p.divided(gc);
      m = m.divided(gc);
      auto want = ChartBinomial{p, m, 0}.poly();
      CHECK(leaf.mains[i].poly() == want);
    }
  }
}
