#pragma once
#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "grres/polynomial.hpp"

namespace grres {

using u64 = uint64_t;

inline u64 addm(u64 a, u64 b, u64 p) { a += b; return a >= p ? a - p : a; }
inline u64 subm(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }
inline u64 mulm(u64 a, u64 b, u64 p) { return (unsigned __int128)a * b % p; }
u64 powm(u64 a, u64 e, u64 p);
u64 invm(u64 a, u64 p);
bool is_prime(long p);
u64 to_fp(const mpq_class& c, u64 p);

using FpMatrix = std::vector<std::vector<u64>>;
int rank_mod_p(FpMatrix a, u64 p);

// A polynomial compiled against a slot numbering of its variables.
struct FpPoly {
  struct Term {
    u64 c;
    std::vector<std::pair<int, int>> f;  // (slot, exponent)
  };
  u64 p = 0;
  std::vector<Term> terms;
  std::vector<int> slots;  // distinct slots used, sorted

  static FpPoly compile(const Polynomial& f, u64 p, const std::function<int(Var)>& slot_of);
  u64 eval(const std::vector<u64>& x) const;
  // Coefficients of f as a polynomial in `slot` with all other slots taken from x.
  std::vector<u64> univariate(const std::vector<u64>& x, int slot) const;
};

}  // namespace grres
