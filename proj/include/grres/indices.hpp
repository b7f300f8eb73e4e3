#pragma once
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace grres {

// Error carrying a stable machine-readable code (e.g. "invalid-parameters").
struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& msg) : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

using Tuple = std::vector<int>;

std::vector<Tuple> enumerate_index_set(int d, int n);

struct Normalized {
  bool zero = false;
  Tuple t;
  int sign = 1;
};
Normalized normalize_index(const Tuple& raw);

// Return <0, 0, >0.
int compare_lex(const Tuple& a, const Tuple& b);
int compare_invlex(const Tuple& a, const Tuple& b);
int compare_wp(const Tuple& u, const Tuple& v, const Tuple& m);

int m_rank(const Tuple& u, const Tuple& m);
bool is_primary_index(const Tuple& u, const Tuple& m);
bool is_basic_index(const Tuple& u, const Tuple& m);

long long binom(int n, int k);
long long upsilon(int d, int n);

Tuple set_minus(const Tuple& a, const Tuple& b);
Tuple set_intersect(const Tuple& a, const Tuple& b);
Tuple set_union(const Tuple& a, const Tuple& b);

// Digits run together when n < 10, dot separated otherwise.
std::string tuple_str(const Tuple& t, int n);
// Accepts "3,4" or "34" (the latter only for single-digit entries).
Tuple parse_entries(const std::string& s);

// Lex-enumerated I_{d,n} with dense ids; id order equals lex order.
struct IndexTable {
  int d = 0, n = 0;
  std::vector<Tuple> tuples;
  std::map<Tuple, int> ids;
  IndexTable() = default;
  IndexTable(int d, int n);
  int id(const Tuple& t) const;
  const Tuple& at(int i) const { return tuples.at(i); }
  std::string str(int i) const { return tuple_str(tuples.at(i), n); }
};

void validate_dn(int d, int n);
void validate_chart_index(const Tuple& m, int d, int n);

}  // namespace grres
