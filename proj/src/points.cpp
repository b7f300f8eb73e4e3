#include "grres/points.hpp"

#include <random>
#include <set>

namespace grres {

namespace {

struct Solver {
  u64 p;
  int nv;
  std::vector<FpPoly> eqs;
  std::vector<std::vector<int>> eqs_of;
  size_t max_points;
  std::vector<std::vector<u64>>* out;
  std::set<std::vector<u64>>* seen = nullptr;
  std::mt19937_64* rng = nullptr;
  bool stop = false;

  // returns false on conflict
  bool propagate(std::vector<u64>& val, std::vector<char>& set) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& e : eqs) {
        int free_slot = -1, nfree = 0;
        for (int s : e.slots)
          if (!set[s]) {
            ++nfree;
            free_slot = s;
            if (nfree > 1) break;
          }
        if (nfree == 0) {
          if (e.eval(val)) return false;
        } else if (nfree == 1) {
          auto co = e.univariate(val, free_slot);
          while (co.size() > 1 && !co.back()) co.pop_back();
          if (co.size() == 1) {
            if (co[0]) return false;
          } else if (co.size() == 2) {
            val[free_slot] = mulm(subm(0, co[0], p), invm(co[1], p), p);
            set[free_slot] = 1;
            changed = true;
          } else {
            int roots = 0;
            u64 root = 0;
            for (u64 a = 0; a < p; ++a) {
              u64 s = 0;
              for (size_t i = co.size(); i-- > 0;) s = addm(mulm(s, a, p), co[i], p);
              if (!s) {
                ++roots;
                root = a;
              }
            }
            if (!roots) return false;
            if (roots == 1) {
              val[free_slot] = root;
              set[free_slot] = 1;
              changed = true;
            }
          }
        }
      }
    }
    return true;
  }

  int pick(const std::vector<char>& set) const {
    int best = -1, score = -1;
    for (int v = 0; v < nv; ++v) {
      if (set[v]) continue;
      int sc = 0;
      for (int e : eqs_of[v]) {
        int nfree = 0;
        for (int s : eqs[e].slots)
          if (!set[s]) ++nfree;
        if (nfree >= 2) ++sc;
      }
      if (sc > score) {
        score = sc;
        best = v;
      }
    }
    return best;
  }

  void emit(const std::vector<u64>& val) {
    if (seen) {
      if (!seen->insert(val).second) return;
    }
    out->push_back(val);
    if (out->size() >= max_points) stop = true;
  }

  void dfs(std::vector<u64> val, std::vector<char> set) {
    if (stop) return;
    if (!propagate(val, set)) return;
    int v = pick(set);
    if (v < 0) {
      emit(val);
      return;
    }
    for (u64 a = 0; a < p && !stop; ++a) {
      auto v2 = val;
      auto s2 = set;
      v2[v] = a;
      s2[v] = 1;
      dfs(std::move(v2), std::move(s2));
    }
  }

  // One random descent; returns true if a point was reached.
  bool dive(std::vector<u64> val, std::vector<char> set) {
    while (true) {
      if (!propagate(val, set)) return false;
      int v = pick(set);
      if (v < 0) {
        emit(val);
        return true;
      }
      val[v] = (*rng)() % p;
      set[v] = 1;
    }
  }
};

}  // namespace

PointSet enumerate_points(const std::vector<Polynomial>& eqs, const std::vector<Var>& vars, u64 p,
                          const std::map<Var, u64>& fixed, const PointSearchOptions& opt) {
  if (!is_prime((long)p)) throw Error("invalid-parameters", "p must be prime");
  PointSet ps;
  ps.p = p;
  ps.vars = vars;
  std::map<Var, int> slot;
  for (size_t i = 0; i < vars.size(); ++i) slot[vars[i]] = (int)i;
  Solver S;
  S.p = p;
  S.nv = (int)vars.size();
  S.max_points = opt.max_points;
  S.out = &ps.pts;
  S.eqs_of.resize(vars.size());
  std::vector<u64> val(vars.size(), 0);
  std::vector<char> set(vars.size(), 0);
  for (auto& [v, a] : fixed) {
    auto it = slot.find(v);
    if (it == slot.end()) continue;
    val[it->second] = a % p;
    set[it->second] = 1;
  }
  for (auto& f : eqs) {
    FpPoly c = FpPoly::compile(f, p, [&](Var v) {
      auto it = slot.find(v);
      if (it == slot.end()) throw Error("missing-assignment", "equation uses a variable outside the chart");
      return it->second;
    });
    if (c.terms.empty()) continue;
    for (int s : c.slots) S.eqs_of[s].push_back((int)S.eqs.size());
    S.eqs.push_back(std::move(c));
  }
  int nfree = 0;
  for (char c : set)
    if (!c) ++nfree;
  if (nfree <= opt.exhaustive_threshold) {
    ps.exhaustive = true;
    S.dfs(val, set);
  } else {
    ps.exhaustive = false;
    std::mt19937_64 rng(opt.seed ^ (p * 0x9e3779b97f4a7c15ULL));
    std::set<std::vector<u64>> seen;
    S.rng = &rng;
    S.seen = &seen;
    for (long i = 0; i < opt.sample_budget && !S.stop; ++i) S.dive(val, set);
    std::sort(ps.pts.begin(), ps.pts.end());
  }
  ps.truncated = S.stop;
  return ps;
}

}  // namespace grres
