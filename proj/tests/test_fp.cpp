#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "grres/fp.hpp"

using namespace grres;

namespace {

// Leibniz determinant mod p.
u64 det(const FpMatrix& a, u64 p) {
  size_t n = a.size();
  std::vector<size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  u64 s = 0;
  do {
    int inv = 0;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inv;
    u64 t = 1;
    for (size_t i = 0; i < n; ++i) t = mulm(t, a[i][perm[i]], p);
    s = inv % 2 ? subm(s, t, p) : addm(s, t, p);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return s;
}

// Largest k with a nonzero k x k minor.
int minor_rank(const FpMatrix& a, u64 p) {
  int r = (int)a.size(), c = r ? (int)a[0].size() : 0;
  for (int k = std::min(r, c); k > 0; --k) {
    std::vector<bool> rs(r), cs(c);
    std::fill(rs.begin(), rs.begin() + k, true);
    do {
      std::fill(cs.begin(), cs.end(), false);
      std::fill(cs.begin(), cs.begin() + k, true);
      do {
        FpMatrix m;
        for (int i = 0; i < r; ++i) {
          if (!rs[i]) continue;
          std::vector<u64> row;
          for (int j = 0; j < c; ++j)
            if (cs[j]) row.push_back(a[i][j]);
          m.push_back(row);
        }
        if (det(m, p)) return k;
      } while (std::prev_permutation(cs.begin(), cs.end()));
    } while (std::prev_permutation(rs.begin(), rs.end()));
  }
  return 0;
}

}  // namespace

TEST_CASE("modular arithmetic") {
  CHECK(powm(2, 10, 1000003) == 1024);
  for (u64 p : {3, 5, 7, 101})
    for (u64 a = 1; a < p; ++a) CHECK(mulm(a, invm(a, p), p) == 1);
  CHECK_THROWS_AS(invm(0, 5), Error);
  CHECK(is_prime(7));
  CHECK(!is_prime(9));
  CHECK(!is_prime(1));
  CHECK(to_fp(mpq_class(1, 2), 5) == 3);
  CHECK(to_fp(mpq_class(-1), 5) == 4);
}

TEST_CASE("rank matches the largest nonzero minor") {
  std::mt19937 rng(11);
  for (u64 p : {2, 3, 5}) {
    std::uniform_int_distribution<u64> e(0, p - 1);
    std::uniform_int_distribution<int> dim(1, 4);
    for (int it = 0; it < 300; ++it) {
      int r = dim(rng), c = dim(rng);
      FpMatrix a(r, std::vector<u64>(c));
      for (auto& row : a)
        for (auto& x : row) x = e(rng) * (rng() % 3 != 0);  // sparse-ish
      CHECK(rank_mod_p(a, p) == minor_rank(a, p));
    }
  }
  CHECK(rank_mod_p({}, 3) == 0);
  CHECK(rank_mod_p({{1, 1}, {2, 2}}, 3) == 1);
  CHECK(rank_mod_p({{1, 1}, {1, 2}}, 3) == 2);
}

TEST_CASE("compiled polynomials") {
  Var x = make_var(kPl, 0), y = make_var(kPl, 1);
  auto f = Polynomial::var(x) * Polynomial::var(y) - Polynomial::constant(2) * Polynomial::var(y) +
           Polynomial::constant(mpq_class(1, 2));
  auto slot = [&](Var v) { return v == x ? 0 : 1; };
  auto g = FpPoly::compile(f, 7, slot);
  for (u64 a = 0; a < 7; ++a)
    for (u64 b = 0; b < 7; ++b) {
      mpq_class q = f.evaluate({{x, (long)a}, {y, (long)b}});
      CHECK(g.eval({a, b}) == to_fp(q, 7));
    }
  auto u = g.univariate({3, 0}, 1);  // f = (3 - 2) y + 1/2
  REQUIRE(u.size() >= 2);
  CHECK(u[0] == to_fp(mpq_class(1, 2), 7));
  CHECK(u[1] == 1);
}
