#include <random>

#include "doctest.h"
#include "grres/gamma.hpp"

using namespace grres;

namespace {

using QMat = std::vector<std::vector<mpq_class>>;

int rank_q(QMat a) {
  int r = 0, rows = (int)a.size(), cols = rows ? (int)a[0].size() : 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c] != 0) piv = i;
    if (piv < 0) continue;
    std::swap(a[r], a[piv]);
    for (int i = 0; i < rows; ++i)
      if (i != r && a[i][c] != 0) {
        mpq_class f = a[i][c] / a[r][c];
        for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      }
    ++r;
  }
  return r;
}

// The d-space spanned by `rows`: dim(F ∩ E_I) for every I, and the vanishing Plücker coordinates.
struct Realization {
  int d, n;
  QMat rows;
  std::map<Tuple, int> dims() const {
    std::map<Tuple, int> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
      QMat a = rows;
      Tuple I;
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1) {
          I.push_back(i + 1);
          std::vector<mpq_class> e(n, 0);
          e[i] = 1;
          a.push_back(e);
        }
      out[I] = d + (int)I.size() - rank_q(a);
    }
    return out;
  }
  mpq_class plucker(const Tuple& u) const {
    QMat a;
    for (auto& r : rows) {
      std::vector<mpq_class> s;
      for (int c : u) s.push_back(r[c - 1]);
      a.push_back(s);
    }
    return rank_q(a) == d ? 1 : 0;  // only vanishing matters
  }
};

}  // namespace

TEST_CASE("matroids") {
  auto U = make_matroid(2, 4, {});
  CHECK(gamma_from_matroid(U, {1, 2}).empty());
  auto M = matroid_from_json(R"({"d":2,"n":4,"dI":{"[1,2]":1}})");
  CHECK(gamma_from_matroid(M, {1, 2}) == std::vector<Tuple>{{3, 4}});

  Realization R{2, 4, {{1, 1, 0, 0}, {0, 1, 1, 1}}};
  auto dims = R.dims();
  CHECK(dims.at({1, 2}) == 1);
  std::vector<Tuple> zero;
  for (auto& u : enumerate_index_set(2, 4))
    if (R.plucker(u) == 0) zero.push_back(u);
  CHECK(zero == std::vector<Tuple>{{3, 4}});
  CHECK(gamma_from_matroid(make_matroid(2, 4, dims), {1, 2}) == zero);

  CHECK_THROWS_AS(matroid_from_json(R"({"d":2,"n":4,"dI":{"[1]":1}})"), Error);
  CHECK_THROWS_AS(matroid_from_json(R"({"d":2,"n":4,"dI":{"[1,5]":1}})"), Error);
  try {
    gamma_from_matroid(M, {3, 4});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code == "chart-incompatible");
  }
}

TEST_CASE("matroid polytope matches vanishing coordinates of realizations") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> e(-1, 1);
  for (auto [d, n] : std::vector<std::pair<int, int>>{{2, 4}, {2, 5}, {3, 5}}) {
    for (int it = 0; it < 40; ++it) {
      Realization R{d, n, {}};
      for (int i = 0; i < d; ++i) {
        std::vector<mpq_class> r(n);
        for (auto& x : r) x = e(rng);
        R.rows.push_back(r);
      }
      if (rank_q(R.rows) < d) continue;
      Tuple m;
      std::vector<Tuple> zero;
      for (auto& u : enumerate_index_set(d, n)) {
        if (R.plucker(u) == 0) zero.push_back(u);
        else if (m.empty()) m = u;
      }
      Matroid M = make_matroid(d, n, R.dims());
      CHECK(gamma_from_matroid(M, m) == zero);
    }
  }
}

TEST_CASE("gamma input and relevance") {
  CHECK(parse_gamma("34,13,34", 2, 4) == std::vector<Tuple>{{1, 3}, {3, 4}});
  CHECK_THROWS_AS(parse_gamma("12,345", 2, 4), Error);
  CHECK(parse_gamma("3,4", 2, 4) == std::vector<Tuple>{{3, 4}});
  Model M = build_model(2, 4, {1, 2});
  auto& b = M.blocks[0];
  CHECK(gamma_relevant(b, {}));
  CHECK(gamma_relevant(b, gamma_vars(M, {{3, 4}})));
  CHECK(!gamma_relevant(b, gamma_vars(M, {{3, 4}, {1, 3}, {1, 4}})));
}

TEST_CASE("generic rank") {
  Var y = make_var(kPl, 0), x = make_var(kPl, 1);
  GammaOptions o;
  CHECK(generic_rank({Polynomial::var(y)}, {y}, {}, {y}, o) == 1);
  CHECK(generic_rank({}, {y}, {}, {y}, o) == 0);
  // the coefficient x vanishes on the variety {x = 0}
  CHECK(generic_rank({Polynomial::var(x) * Polynomial::var(y)}, {y}, {Polynomial::var(x)}, {x, y}, o) == 0);
  CHECK(generic_rank({Polynomial::var(y)}, {y}, {Polynomial::constant(1)}, {y}, o) == -1);
}

TEST_CASE("pipeline on Gr(2,4)") {
  Model M = build_model(2, 4, {1, 2});
  auto T = run_full_tower(M, TowerOptions{});
  GammaOptions o;

  auto E = run_gamma_pipeline(T, {}, o);
  CHECK(E.audit_failures.empty());
  for (int id : E.leaves) {
    auto& g = E.states[id];
    CHECK(g.zero.empty());
    CHECK(g.one.empty());
    CHECK(g.fstar == std::vector<int>{0});
  }
  CHECK(E.expected_dim == 4);

  auto G = run_gamma_pipeline(T, gamma_vars(M, {{3, 4}}), o);
  CHECK(G.audit_failures.empty());
  CHECK(G.expected_dim == 3);
  CHECK(G.birational_checked);
  CHECK(G.birational_ok);
  Var r1234 = M.rho({M.tab.id({1, 2}), M.tab.id({3, 4})});
  for (auto& c : T.atlas.charts) {
    if (c.parent >= 0) continue;
    auto& g = G.states[c.id];
    if (g.empty) continue;
    REQUIRE(g.blocks.size() == 1);
    CHECK(g.blocks[0].relevant);
    // the only pair meeting the set is (12,34)
    if (c.has(r1234)) CHECK(g.blocks[0].lam0 == std::vector<Var>{r1234});
    else CHECK(g.blocks[0].lam0.empty());
    for (Var v : g.zero) CHECK(!g.one.count(v));
  }
  for (int id : G.leaves)
    for (Var v : G.states[id].zero) CHECK(!G.states[id].one.count(v));
}
