#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "grres/indices.hpp"

using namespace grres;

namespace {

// Bitmask enumeration, sorted lex afterwards.
std::vector<Tuple> subsets_by_mask(int d, int n) {
  std::vector<Tuple> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(mask) != d) continue;
    Tuple t;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) t.push_back(i + 1);
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int inversion_sign(const Tuple& t) {
  int inv = 0;
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j)
      if (t[i] > t[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

}  // namespace

TEST_CASE("index sets") {
  CHECK(enumerate_index_set(2, 4) == std::vector<Tuple>{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  CHECK(enumerate_index_set(1, 3) == std::vector<Tuple>{{1}, {2}, {3}});
  auto s36 = enumerate_index_set(3, 6);
  CHECK(s36.size() == 20);
  CHECK(std::find(s36.begin(), s36.end(), Tuple{1, 6, 3}) == s36.end());
  for (int n = 2; n <= 7; ++n)
    for (int d = 1; d < n; ++d) CHECK(enumerate_index_set(d, n) == subsets_by_mask(d, n));
}

TEST_CASE("normalize") {
  auto a = normalize_index({1, 6, 3});
  CHECK(!a.zero);
  CHECK(a.t == Tuple{1, 3, 6});
  CHECK(a.sign == -1);
  CHECK(normalize_index({2, 2, 5}).zero);
  auto b = normalize_index({1, 2, 3});
  CHECK(b.sign == 1);

  for (int d = 1; d <= 4; ++d) {
    Tuple t(d);
    std::iota(t.begin(), t.end(), 3);
    do {
      auto r = normalize_index(t);
      CHECK(r.sign == inversion_sign(t));
    } while (std::next_permutation(t.begin(), t.end()));
  }
}

TEST_CASE("orders") {
  CHECK(compare_lex({1, 3}, {2, 3}) < 0);
  CHECK(compare_invlex({1, 4}, {2, 3}) > 0);
  CHECK(compare_lex({1, 2, 6}, {1, 3, 4}) < 0);
  Tuple m{1, 2, 3};
  CHECK(compare_wp({1, 4, 5}, {2, 4, 5}, m) < 0);
  CHECK(compare_wp({1, 4, 5}, {4, 5, 6}, m) < 0);
  CHECK(compare_wp({1, 2, 4}, {1, 2, 5}, m) < 0);
  CHECK(compare_wp({4, 5, 6}, {1, 4, 5}, m) > 0);
  CHECK_THROWS_AS(compare_wp(m, {1, 4, 5}, m), Error);
}

TEST_CASE("m-rank and classes") {
  CHECK(m_rank({1, 4, 5}, {1, 2, 3}) == 0);
  CHECK(m_rank({4, 5, 6}, {1, 2, 3}) == 1);
  CHECK(m_rank({3, 4}, {1, 2}) == 0);
  CHECK(is_basic_index({1, 3}, {1, 2}));
  CHECK(!is_primary_index({1, 3}, {1, 2}));
  CHECK(is_primary_index({3, 4}, {1, 2}));
  try {
    m_rank({1, 3}, {1, 2});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code == "not-primary");
  }
}

TEST_CASE("primary count equals the closed form") {
  struct C {
    int d, n;
    Tuple m;
    long long want;
  };
  for (auto c : {C{2, 4, {1, 2}, 1}, C{2, 5, {4, 5}, 3}, C{2, 6, {5, 6}, 6}, C{3, 6, {1, 2, 3}, 10}}) {
    long long count = 0;
    for (auto& u : subsets_by_mask(c.d, c.n))
      if (u != c.m && (int)set_minus(u, c.m).size() >= 2) ++count;
    CHECK(count == c.want);
    CHECK(upsilon(c.d, c.n) == c.want);
  }
}

TEST_CASE("tuple text") {
  CHECK(tuple_str({1, 2}, 4) == "12");
  CHECK(tuple_str({1, 10}, 12) == "1.10");
  CHECK(parse_entries("34") == Tuple{3, 4});
  CHECK(parse_entries("3,4") == Tuple{3, 4});
  IndexTable tab(2, 4);
  CHECK(tab.id({1, 2}) == 0);
  CHECK(tab.id({3, 4}) == 5);
  CHECK(tab.str(5) == "34");
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate_dn(0, 4), Error);
  CHECK_THROWS_AS(validate_dn(4, 4), Error);
  CHECK_NOTHROW(validate_dn(2, 4));
  CHECK_THROWS_AS(validate_chart_index({1, 5}, 2, 4), Error);
  CHECK_THROWS_AS(validate_chart_index({2, 1}, 2, 4), Error);
}
