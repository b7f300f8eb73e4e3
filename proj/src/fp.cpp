#include "grres/fp.hpp"

namespace grres {

u64 powm(u64 a, u64 e, u64 p) {
  u64 r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mulm(r, a, p);
    a = mulm(a, a, p);
    e >>= 1;
  }
  return r;
}

u64 invm(u64 a, u64 p) {
  if (a % p == 0) throw Error("division-by-zero", "zero has no inverse");
  return powm(a, p - 2, p);
}

bool is_prime(long p) {
  if (p < 2) return false;
  for (long q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

u64 to_fp(const mpq_class& c, u64 p) {
  mpz_class P = (unsigned long)p, num, den;
  mpz_mod(num.get_mpz_t(), c.get_num_mpz_t(), P.get_mpz_t());
  mpz_mod(den.get_mpz_t(), c.get_den_mpz_t(), P.get_mpz_t());
  return mulm(num.get_ui(), invm(den.get_ui(), p), p);
}

int rank_mod_p(FpMatrix a, u64 p) {
  int rows = (int)a.size();
  if (!rows) return 0;
  int cols = (int)a[0].size();
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (a[i][c] % p) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(a[piv], a[r]);
    u64 inv = invm(a[r][c], p);
    for (int i = r + 1; i < rows; ++i) {
      u64 f = mulm(a[i][c], inv, p);
      if (!f) continue;
      for (int j = c; j < cols; ++j) a[i][j] = subm(a[i][j], mulm(f, a[r][j], p), p);
    }
    ++r;
  }
  return r;
}

FpPoly FpPoly::compile(const Polynomial& f, u64 p, const std::function<int(Var)>& slot_of) {
  FpPoly r;
  r.p = p;
  for (auto& [m, c] : f.terms()) {
    u64 cc = to_fp(c, p);
    if (!cc) continue;
    Term t{cc, {}};
    for (auto& [v, e] : m.f) {
      int s = slot_of(v);
      t.f.push_back({s, e});
      r.slots.push_back(s);
    }
    r.terms.push_back(std::move(t));
  }
  std::sort(r.slots.begin(), r.slots.end());
  r.slots.erase(std::unique(r.slots.begin(), r.slots.end()), r.slots.end());
  return r;
}

u64 FpPoly::eval(const std::vector<u64>& x) const {
  u64 s = 0;
  for (auto& t : terms) {
    u64 v = t.c;
    for (auto& [slot, e] : t.f) {
      u64 b = x[slot];
      for (int i = 0; i < e && v; ++i) v = mulm(v, b, p);
    }
    s = addm(s, v, p);
  }
  return s;
}

std::vector<u64> FpPoly::univariate(const std::vector<u64>& x, int slot) const {
  std::vector<u64> co(1, 0);
  for (auto& t : terms) {
    u64 v = t.c;
    int deg = 0;
    for (auto& [s, e] : t.f) {
      if (s == slot) {
        deg = e;
        continue;
      }
      for (int i = 0; i < e && v; ++i) v = mulm(v, x[s], p);
    }
    if ((int)co.size() <= deg) co.resize(deg + 1, 0);
    co[deg] = addm(co[deg], v, p);
  }
  return co;
}

}  // namespace grres
