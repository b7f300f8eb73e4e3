#include <set>

#include "doctest.h"
#include "grres/points.hpp"

using namespace grres;

namespace {

Var X(int i) { return make_var(kPl, i); }
Polynomial P(int i) { return Polynomial::var(X(i)); }

size_t brute_count(const std::vector<Polynomial>& eqs, int nv, u64 p) {
  size_t total = 1, count = 0;
  for (int i = 0; i < nv; ++i) total *= p;
  for (size_t code = 0; code < total; ++code) {
    std::map<Var, mpq_class> pt;
    size_t c = code;
    for (int i = 0; i < nv; ++i) {
      pt[X(i)] = (long)(c % p);
      c /= p;
    }
    bool ok = true;
    for (auto& f : eqs) {
      mpz_class num = f.evaluate(pt).get_num();
      if (num % (long)p != 0) ok = false;
    }
    count += ok;
  }
  return count;
}

}  // namespace

TEST_CASE("small systems") {
  auto s = enumerate_points({P(0)}, {X(0)}, 3);
  CHECK(s.pts.size() == 1);
  CHECK(s.exhaustive);
  CHECK(enumerate_points({Polynomial::constant(1)}, {X(0)}, 3).pts.empty());
  // x13 x24 - x14 x23 over F_3
  auto cone = P(0) * P(3) - P(1) * P(2);
  auto c = enumerate_points({cone}, {X(0), X(1), X(2), X(3)}, 3);
  CHECK(c.pts.size() == 33);
  CHECK(brute_count({cone}, 4, 3) == 33);
}

TEST_CASE("exhaustive counts agree with brute force") {
  std::vector<std::vector<Polynomial>> systems = {
      {P(0) * P(1) - P(2), P(2) * P(3) - Polynomial::constant(1)},
      {P(0) * P(0) + P(1) * P(1) - Polynomial::constant(1)},
      {P(0) - P(1) * P(2) + P(3) * P(4), P(1) * P(4) - P(0) * P(2)},
  };
  std::vector<int> nvs = {4, 2, 5};
  for (size_t i = 0; i < systems.size(); ++i)
    for (u64 p : {3, 5}) {
      std::vector<Var> vs;
      for (int v = 0; v < nvs[i]; ++v) vs.push_back(X(v));
      auto s = enumerate_points(systems[i], vs, p);
      CHECK(s.pts.size() == brute_count(systems[i], nvs[i], p));
      std::set<std::vector<u64>> uniq(s.pts.begin(), s.pts.end());
      CHECK(uniq.size() == s.pts.size());
    }
}

TEST_CASE("fixed values and sampling") {
  auto cone = P(0) * P(3) - P(1) * P(2);
  std::vector<Var> vs{X(0), X(1), X(2), X(3)};
  auto s = enumerate_points({cone}, vs, 3, {{X(0), 0}});
  for (auto& z : s.pts) CHECK(z[0] == 0);
  CHECK(s.pts.size() == 15);  // x14 x23 = 0 with x24 free: 5 * 3

  PointSearchOptions o;
  o.exhaustive_threshold = 1;
  o.sample_budget = 50;
  o.seed = 3;
  auto a = enumerate_points({cone}, vs, 5, {}, o);
  auto b = enumerate_points({cone}, vs, 5, {}, o);
  CHECK(!a.exhaustive);
  CHECK(a.pts == b.pts);
  for (auto& z : a.pts) CHECK((z[0] * z[3] + 5 * 5 - z[1] * z[2]) % 5 == 0);
}

TEST_CASE("point block storage") {
  PointBlock b;
  b.width = 3;
  b.push({1, 2, 3});
  b.push({4, 5, 6});
  CHECK(b.size() == 2);
  CHECK(b.at(1, 2) == 6);
  CHECK(b.row(0) == std::vector<u64>{1, 2, 3});
}
