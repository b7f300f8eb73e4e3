#include "grres/indices.hpp"

#include <algorithm>
#include <sstream>

namespace grres {

void validate_dn(int d, int n) {
  if (d <= 0 || d >= n) throw Error("invalid-parameters", "require 1 ≤ d < n");
  if (n > 4095) throw Error("invalid-parameters", "n too large");
}

void validate_chart_index(const Tuple& m, int d, int n) {
  validate_dn(d, n);
  if ((int)m.size() != d) throw Error("invalid-parameters", "chart index must have d entries");
  for (size_t i = 0; i < m.size(); ++i) {
    if (m[i] < 1 || m[i] > n) throw Error("invalid-parameters", "chart index entry out of range");
    if (i && m[i] <= m[i - 1]) throw Error("invalid-parameters", "chart index must be strictly increasing");
  }
}

std::vector<Tuple> enumerate_index_set(int d, int n) {
  validate_dn(d, n);
  std::vector<Tuple> out;
  Tuple cur(d);
  for (int i = 0; i < d; ++i) cur[i] = i + 1;
  while (true) {
    out.push_back(cur);
    int i = d - 1;
    while (i >= 0 && cur[i] == n - d + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < d; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

Normalized normalize_index(const Tuple& raw) {
  Normalized r;
  r.t = raw;
  // insertion sort, counting transpositions
  int swaps = 0;
  for (size_t i = 1; i < r.t.size(); ++i)
    for (size_t j = i; j > 0 && r.t[j - 1] > r.t[j]; --j) {
      std::swap(r.t[j - 1], r.t[j]);
      ++swaps;
    }
  for (size_t i = 1; i < r.t.size(); ++i)
    if (r.t[i] == r.t[i - 1]) {
      r.zero = true;
      r.sign = 0;
      return r;
    }
  r.sign = (swaps % 2) ? -1 : 1;
  return r;
}

int compare_lex(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) throw Error("invalid-comparison", "tuple lengths differ");
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

int compare_invlex(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) throw Error("invalid-comparison", "tuple lengths differ");
  for (size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

Tuple set_minus(const Tuple& a, const Tuple& b) {
  Tuple r;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) == b.end()) r.push_back(x);
  return r;
}

Tuple set_intersect(const Tuple& a, const Tuple& b) {
  Tuple r;
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) r.push_back(x);
  return r;
}

Tuple set_union(const Tuple& a, const Tuple& b) {
  Tuple r = a;
  for (int x : b)
    if (std::find(r.begin(), r.end(), x) == r.end()) r.push_back(x);
  std::sort(r.begin(), r.end());
  return r;
}

bool is_primary_index(const Tuple& u, const Tuple& m) { return set_minus(u, m).size() >= 2; }
bool is_basic_index(const Tuple& u, const Tuple& m) { return set_minus(u, m).size() == 1; }

int m_rank(const Tuple& u, const Tuple& m) {
  auto k = set_minus(u, m).size();
  if (k < 2) throw Error("not-primary", "index is not in the primary set");
  return (int)k - 2;
}

int compare_wp(const Tuple& u, const Tuple& v, const Tuple& m) {
  if (u == m || v == m) throw Error("invalid-comparison", "cannot compare the chart index");
  if (u.size() != v.size() || u.size() != m.size()) throw Error("invalid-comparison", "tuple lengths differ");
  if (u == v) return 0;
  bool bu = is_basic_index(u, m), bv = is_basic_index(v, m);
  // Mixed basic/primary comparisons are not covered by the order; basic comes first.
  if (bu != bv) return bu ? -1 : 1;
  if (bu) {
    int a = set_minus(u, m)[0], b = set_minus(v, m)[0];
    if (a != b) return a < b ? -1 : 1;
    return compare_lex(set_intersect(m, u), set_intersect(m, v));
  }
  int ru = m_rank(u, m), rv = m_rank(v, m);
  if (ru != rv) return ru < rv ? -1 : 1;
  int c = compare_lex(set_minus(u, m), set_minus(v, m));
  if (c) return c;
  return compare_lex(set_intersect(m, u), set_intersect(m, v));
}

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long upsilon(int d, int n) { return binom(n, d) - 1 - (long long)d * (n - d); }

std::string tuple_str(const Tuple& t, int n) {
  std::ostringstream os;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i && n >= 10) os << '.';
    os << t[i];
  }
  return os.str();
}

Tuple parse_entries(const std::string& s) {
  Tuple t;
  if (s.find(',') != std::string::npos || s.find('.') != std::string::npos) {
    std::string cur;
    for (char c : s + ",") {
      if (c == ',' || c == '.') {
        if (cur.empty()) throw Error("invalid-parameters", "bad tuple '" + s + "'");
        t.push_back(std::stoi(cur));
        cur.clear();
      } else if (c >= '0' && c <= '9') {
        cur += c;
      } else if (c != ' ') {
        throw Error("invalid-parameters", "bad tuple '" + s + "'");
      }
    }
  } else {
    for (char c : s) {
      if (c < '0' || c > '9') throw Error("invalid-parameters", "bad tuple '" + s + "'");
      t.push_back(c - '0');
    }
  }
  if (t.empty()) throw Error("invalid-parameters", "empty tuple");
  return t;
}

IndexTable::IndexTable(int d_, int n_) : d(d_), n(n_), tuples(enumerate_index_set(d_, n_)) {
  for (size_t i = 0; i < tuples.size(); ++i) ids[tuples[i]] = (int)i;
}

int IndexTable::id(const Tuple& t) const {
  auto it = ids.find(t);
  if (it == ids.end()) throw Error("invalid-parameters", "tuple not in index set");
  return it->second;
}

}  // namespace grres
