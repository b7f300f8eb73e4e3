#include "grres/blowup_tower.hpp"

#include <algorithm>
#include <set>

namespace grres {

int compare_flat(const Atlas& A, int a, int b) {
  if (a == b) return 0;
  const Divisor& x = A.divisors.at(a);
  const Divisor& y = A.divisors.at(b);
  auto rk = [](const Divisor& d) { return d.kind == Divisor::Exc ? 0 : d.kind == Divisor::Rho ? 1 : 2; };
  if (rk(x) != rk(y)) return rk(x) < rk(y) ? -1 : 1;
  if (x.kind == Divisor::Exc) {
    for (int i = 3; i >= 0; --i)
      if (x.idx[i] != y.idx[i]) return x.idx[i] < y.idx[i] ? -1 : 1;
    return a < b ? -1 : 1;
  }
  std::pair<int, int> px{var_a(x.base), var_b(x.base)}, py{var_a(y.base), var_b(y.base)};
  if (px != py) return px < py ? -1 : 1;
  return a < b ? -1 : 1;
}

std::vector<std::pair<int, int>> center_candidates(const Atlas& A, int k, int tau, int stage) {
  const Model& M = *A.model;
  int b = M.main_index(k, tau);
  int xs = A.divisor_of_name.at(M.rho(k - 1, tau));
  int xm = A.divisor_of_name.at(M.rho(k - 1, 0));
  std::vector<int> plus, minus;
  for (int d = 0; d < (int)A.divisors.size(); ++d) {
    const Divisor& D = A.divisors[d];
    if (stage == 1) {
      if (D.mplus[b] > 0 && d != xs) plus.push_back(d);
      if (D.mminus[b] > 0 && d != xm) minus.push_back(d);
    } else {
      if (D.mminus[b] > 0 && d != xm && D.kind != Divisor::Rho) minus.push_back(d);
    }
  }
  if (stage == 2) plus.push_back(xs);
  std::set<std::pair<int, int>> seen;
  std::vector<std::pair<int, int>> out;
  for (int p : plus)
    for (int q : minus) {
      if (p == q) continue;
      std::pair<int, int> pr = compare_flat(A, p, q) < 0 ? std::make_pair(p, q) : std::make_pair(q, p);
      if (seen.insert(pr).second) out.push_back(pr);
    }
  std::sort(out.begin(), out.end(), [&](auto& x, auto& y) {
    int c = compare_flat(A, x.first, y.first);
    if (c) return c < 0;
    return compare_flat(A, x.second, y.second) < 0;
  });
  return out;
}

static bool meets(const Chart& c, int d0, int d1) {
  return c.var_of_divisor.count(d0) && c.var_of_divisor.count(d1);
}

static bool point_on_center(const TowerRun& R, const Chart& c, int d0, int d1) {
  auto it = R.points.find(c.id);
  if (it == R.points.end()) return false;
  int s0 = int(std::lower_bound(c.vars.begin(), c.vars.end(), c.var_of_divisor.at(d0)) - c.vars.begin());
  int s1 = int(std::lower_bound(c.vars.begin(), c.vars.end(), c.var_of_divisor.at(d1)) - c.vars.begin());
  const PointBlock& P = it->second;
  for (size_t i = 0; i < P.size(); ++i)
    if (!P.at(i, s0) && !P.at(i, s1)) return true;
  return false;
}

static bool splits(const TowerRun& R, const Chart& c, int d0, int d1, const TowerOptions& opt) {
  if (!meets(c, d0, d1)) return false;
  return opt.point_prime == 0 || point_on_center(R, c, d0, d1);
}

// Points owned by the child chart. Side 0 takes every parent point off y_0 and the whole fiber over
// the center; side 1 takes what side 0 misses, so each F_p point is owned by exactly one leaf.
static PointBlock child_points(const Chart& par, const Chart& ch, const PointBlock& pp, u64 p) {
  BlowupMap t = blowup_map(ch.center0, ch.center1, ch.side);
  auto slot = [](const Chart& c, Var v) { return int(std::lower_bound(c.vars.begin(), c.vars.end(), v) - c.vars.begin()); };
  int pi = slot(par, t.yi), pj = slot(par, t.yj);
  std::vector<int> from(ch.vars.size());
  for (size_t i = 0; i < ch.vars.size(); ++i) from[i] = ch.vars[i] == t.zeta ? -1 : slot(par, ch.vars[i]);
  int cj = slot(ch, t.yj);
  PointBlock out;
  out.width = ch.vars.size();
  std::vector<u64> w(ch.vars.size());
  for (size_t r = 0; r < pp.size(); ++r) {
    u64 zi = pp.at(r, pi), zj = pp.at(r, pj);
    if (!zi || (ch.side == 1 && zj)) continue;
    for (size_t i = 0; i < w.size(); ++i) w[i] = from[i] < 0 ? zi : pp.at(r, from[i]);
    w[cj] = mulm(zj, invm(zi, p), p);
    out.push(w);
  }
  // fiber over each owned point on the center: zeta = 0, the proper transform of y_j free
  std::vector<FpPoly> sys;
  for (auto& f : ch.system()) sys.push_back(FpPoly::compile(f, p, [&](Var v) { return slot(ch, v); }));
  for (size_t r = 0; r < pp.size(); ++r) {
    if (pp.at(r, pi) || pp.at(r, pj)) continue;
    for (size_t i = 0; i < w.size(); ++i) w[i] = from[i] < 0 ? 0 : pp.at(r, from[i]);
    for (u64 a = 0; a < (ch.side == 0 ? p : 1); ++a) {
      w[cj] = a;
      bool ok = true;
      for (auto& f : sys)
        if (f.eval(w)) {
          ok = false;
          break;
        }
      if (ok) out.push(w);
    }
  }
  return out;
}

bool gate_passes(const TowerRun& R, int d0, int d1, const TowerOptions& opt) {
  const Atlas& A = R.atlas;
  if (opt.point_prime) {
    for (int id : A.active)
      if (splits(R, A.charts[id], d0, d1, opt)) return true;
    return false;
  }
  bool structural = false;
  for (int id : A.active)
    if (meets(A.charts[id], d0, d1)) structural = true;
  if (!structural || opt.gate == "nonempty") return structural;
  PointSearchOptions so = opt.search;
  if (opt.gate.rfind("exact-budget:", 0) == 0) {
    so.sample_budget = std::stol(opt.gate.substr(13));
    so.exhaustive_threshold = -1;
  } else if (opt.gate != "empty") {
    throw Error("invalid-parameters", "gate must be nonempty, empty or exact-budget:<N>");
  }
  so.max_points = 1;
  for (int id : A.active) {
    const Chart& c = A.charts[id];
    if (!meets(c, d0, d1)) continue;
    std::map<Var, u64> fixed{{c.var_of_divisor.at(d0), 0}, {c.var_of_divisor.at(d1), 0}};
    for (long p : opt.primes) {
      auto ps = enumerate_points(c.system(), c.vars, p, fixed, so);
      if (!ps.pts.empty()) return true;
    }
  }
  return false;
}

std::vector<int> apply_blowup(TowerRun& R, int d0, int d1, Step st, const TowerOptions& opt) {
  Atlas& A = R.atlas;
  std::vector<int> hit;
  for (int id : A.active)
    if (splits(R, A.charts[id], d0, d1, opt)) hit.push_back(id);
  if (hit.empty()) return hit;
  st.d0 = d0;
  st.d1 = d1;
  st.exc = add_exceptional(A, d0, d1, st.stage, {st.k, st.tau, st.mu, st.h}, st.label);
  int step_id = (int)R.steps.size();
  std::set<int> hitset(hit.begin(), hit.end());
  std::vector<int> next;
  for (int id : A.active) {
    if (!hitset.count(id)) {
      next.push_back(id);
      continue;
    }
    for (int side = 0; side < 2; ++side) {
      const Chart& par = A.charts[id];
      Chart ch = blow_up_chart(par, par.var_of_divisor.at(d0), par.var_of_divisor.at(d1), side, st.exc);
      ch.id = (int)A.charts.size();
      ch.step = step_id;
      ch.stage = st.label;
      ch.name = par.name + "/" + st.label + ":" + std::to_string(side);
      bool drop = opt.prune && chart_is_contradictory(ch);
      if (opt.point_prime) {
        auto pts = child_points(par, ch, R.points[id], opt.point_prime);
        // a chart without F_p points carries nothing to certify
        if (pts.empty()) drop = true;
        else R.points[ch.id] = std::move(pts);
      }
      if (drop) ++R.pruned;
      else next.push_back(ch.id);
      A.charts.push_back(std::move(ch));
    }
    R.points.erase(id);
  }
  A.active = std::move(next);
  st.split = hit;
  R.steps.push_back(std::move(st));
  if (A.charts.size() > opt.max_charts) {
    R.partial = true;
    R.partial_reason = "chart budget exceeded";
  }
  return hit;
}

static void run_stage(TowerRun& R, int stage, const TowerOptions& opt) {
  const Model& M = *R.model;
  for (auto& B : M.mains) {
    int mu = 0;
    while (!R.partial) {
      auto cands = center_candidates(R.atlas, B.k, B.tau, stage);
      std::vector<std::pair<int, int>> sets;
      for (auto& pr : cands) {
        for (int d : {pr.first, pr.second})
          if (stage == 1 && R.atlas.divisors[d].kind == Divisor::Rho)
            R.warnings.push_back("rho-kind candidate " + R.atlas.divisor_name(d) + " for binomial (" +
                                 std::to_string(B.k) + "," + std::to_string(B.tau) + ")");
        if (gate_passes(R, pr.first, pr.second, opt)) sets.push_back(pr);
      }
      if (sets.empty()) break;
      ++mu;
      if (mu > opt.round_cap) throw Error("tower-nontermination", "round cap exceeded");
      int h = 0;
      for (auto& [d0, d1] : sets) {
        Step st;
        st.stage = stage;
        st.k = B.k;
        st.tau = B.tau;
        st.mu = mu;
        st.h = h + 1;
        st.label = std::string(stage == 1 ? "wp" : "eth") + "(" + std::to_string(B.k) + "," + std::to_string(B.tau) +
                   ")" + std::to_string(mu) + "." + std::to_string(h + 1);
        if (!apply_blowup(R, d0, d1, st, opt).empty()) ++h;
        if (R.partial) break;
      }
      (stage == 1 ? R.sigma : R.varsigma)[{B.k, B.tau, mu}] = h;
    }
    (stage == 1 ? R.rho : R.kappa)[{B.k, B.tau}] = mu;
    if (R.partial) return;
  }
}

TowerRun run_full_tower(const Model& M, const TowerOptions& opt) {
  TowerRun R;
  R.model = &M;
  R.point_prime = opt.point_prime;
  R.atlas = make_base_atlas(M, lambda_o_choices(M, opt.lambda_o));
  if (opt.point_prime >= 65536) throw Error("invalid-parameters", "point prime must be below 65536");
  if (opt.point_prime) {
    PointSearchOptions so = opt.search;
    so.exhaustive_threshold = 1 << 20;
    std::vector<int> keep;
    for (int id : R.atlas.active) {
      auto& c = R.atlas.charts[id];
      auto ps = enumerate_points(c.system(), c.vars, opt.point_prime, {}, so);
      if (ps.pts.empty()) continue;
      PointBlock& P = R.points[id];
      P.width = c.vars.size();
      for (auto& z : ps.pts) P.push(z);
      keep.push_back(id);
    }
    R.atlas.active = keep;
  }
  for (auto& b : M.blocks) {
    int dp = R.atlas.divisor_of_name.at(M.pl(b.u));
    int dr = R.atlas.divisor_of_name.at(M.rho(b.pairs[0]));
    Step st;
    st.stage = 0;
    st.k = 1;
    st.tau = 1;
    st.mu = 0;
    st.h = b.k;
    st.label = "theta[" + std::to_string(b.k) + "]";
    apply_blowup(R, dp, dr, st, opt);
    if (R.partial) return R;
  }
  // The lead rho divisor is no longer counted against the minus terms.
  for (auto& B : M.mains) {
    int i = M.main_index(B.k, B.tau);
    R.atlas.divisors[R.atlas.divisor_of_name.at(M.rho(B.k - 1, 0))].mminus[i] = 0;
  }
  for (int id : R.atlas.active) R.atlas.charts[id].residuals_live = false;
  R.theta_leaves = R.atlas.active;
  if (opt.run_wp) run_stage(R, 1, opt);
  R.wp_leaves = R.atlas.active;
  if (opt.run_eth && !R.partial) {
    int h = 0;
    for (auto& D : R.atlas.divisors)
      if (D.kind == Divisor::Exc) D.idx = {1, 1, 0, ++h};
    run_stage(R, 2, opt);
  }
  return R;
}

}  // namespace grres
