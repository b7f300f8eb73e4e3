#include "grres/verify.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace grres {

ChartPath chart_path_data(const Atlas& A, int id) { return {chart_path(A, id)}; }

static int slot_of(const Chart& c, Var v) {
  auto it = std::lower_bound(c.vars.begin(), c.vars.end(), v);
  if (it == c.vars.end() || *it != v) return -1;
  return int(it - c.vars.begin());
}

static u64 eval_mono(const Chart& c, const Monomial& m, const std::vector<u64>& z, u64 p) {
  u64 r = 1;
  for (auto& [v, e] : m.f) r = mulm(r, powm(z[slot_of(c, v)], e, p), p);
  return r;
}

std::vector<std::vector<u64>> path_values(const Atlas& A, const ChartPath& P, const std::vector<u64>& z, u64 p) {
  std::vector<std::vector<u64>> out(P.ids.size());
  out.back() = z;
  for (size_t i = P.ids.size() - 1; i > 0; --i) {
    const Chart& ch = A.charts[P.ids[i]];
    const Chart& par = A.charts[P.ids[i - 1]];
    std::vector<u64> v(par.vars.size());
    for (size_t j = 0; j < par.vars.size(); ++j) {
      auto t = ch.to_parent.find(par.vars[j]);
      v[j] = t == ch.to_parent.end() ? out[i][slot_of(ch, par.vars[j])] : eval_mono(ch, t->second, out[i], p);
    }
    out[i - 1] = std::move(v);
  }
  return out;
}

bool terminates_at(const Chart& c, const std::vector<u64>& z, u64 p, std::vector<int>* failing) {
  bool ok = true;
  for (size_t i = 0; i < c.mains.size(); ++i)
    if (!eval_mono(c, c.mains[i].plus, z, p) && !eval_mono(c, c.mains[i].minus, z, p)) {
      ok = false;
      if (failing) failing->push_back((int)i);
    }
  return ok;
}

namespace {

// Per (chart, prime) data reused across points.
struct Ctx {
  const Atlas& A;
  const Model& M;
  const Chart& c;
  const GammaChart& g;
  u64 p;
  ChartPath path;
  std::vector<Var> freev;
  std::map<Var, int> free_slot;
  std::vector<Polynomial> eqs;        // reduced, nonzero
  std::vector<std::vector<std::pair<int, FpPoly>>> jac;  // per eq: (free column, derivative)
  std::map<int, int> main_eq, lin_eq;  // main index / block -> index into eqs

  Ctx(const Atlas& A_, const Chart& c_, const GammaChart& g_, u64 p_)
      : A(A_), M(*A_.model), c(c_), g(g_), p(p_), path(chart_path_data(A_, c_.id)) {
    for (Var v : c.vars)
      if (!g.zero.count(v) && !g.one.count(v)) {
        free_slot[v] = (int)freev.size();
        freev.push_back(v);
      }
    std::map<Var, Polynomial> pins;
    for (Var v : g.zero) pins[v] = Polynomial::constant(0);
    for (Var v : g.one) pins[v] = Polynomial::constant(1);
    auto add = [&](const Polynomial& f) {
      Polynomial r = f.substitute(pins);
      if (r.is_zero()) return -1;
      eqs.push_back(r);
      return (int)eqs.size() - 1;
    };
    for (size_t i = 0; i < c.mains.size(); ++i) {
      int e = add(c.mains[i].poly());
      if (e >= 0) main_eq[(int)i] = e;
    }
    if (c.residuals_live)
      for (auto& b : c.residuals) add(b.poly());
    for (auto& b : c.quotients) add(b.poly());
    for (int k : g.fstar) {
      int e = add(c.linears.at(k).poly());
      if (e >= 0) lin_eq[k] = e;
    }
    for (auto& x : g.extras) add(x);
    auto slot = [&](Var v) {
      auto it = free_slot.find(v);
      if (it == free_slot.end()) throw Error("internal", "pinned variable left after substitution");
      return it->second;
    };
    for (auto& f : eqs) {
      std::vector<std::pair<int, FpPoly>> row;
      for (Var v : f.variables()) row.push_back({free_slot.at(v), FpPoly::compile(f.derivative(v), p, slot)});
      jac.push_back(std::move(row));
    }
  }

  std::vector<u64> free_values(const std::vector<u64>& z) const {
    std::vector<u64> x;
    for (Var v : freev) x.push_back(z[slot_of(c, v)]);
    return x;
  }

  int rank_of(const std::vector<int>& rows, const std::vector<Var>& cols, const std::vector<u64>& x, std::string* err) const {
    FpMatrix m(rows.size(), std::vector<u64>(cols.size(), 0));
    for (size_t j = 0; j < cols.size(); ++j) {
      auto it = free_slot.find(cols[j]);
      if (it == free_slot.end()) {
        if (err) *err = "column " + var_name(cols[j], M.tab) + " is pinned";
        return -1;
      }
      for (size_t i = 0; i < rows.size(); ++i)
        for (auto& [s, d] : jac[rows[i]])
          if (s == it->second) m[i][j] = d.eval(x);
    }
    return rank_mod_p(m, p);
  }

  Var by_stem(Var stem) const {
    for (Var v : c.vars)
      if (var_stem(v) == stem) return v;
    return 0xffffffffu;
  }

  // Blocks in order; within a block the linear relation, then original mains, then intrinsic mains by
  // termination position. Each row tries its preferred column first, then the other variables of its
  // equation in chart order, keeping only unused columns that raise the rank; depth-first with
  // backtracking. Returns false when no full-rank choice is found (the preferred columns are kept).
  bool reselect_columns(PointCheck& pc, const std::vector<std::vector<Var>>& prefs, const std::vector<u64>& x) const {
    const Var none = 0xffffffffu;
    struct Row {
      size_t block, pos;
      int eq;
      std::vector<Var> cand;
    };
    std::vector<Row> rows;
    for (size_t b = 0; b < pc.blocks.size(); ++b) {
      const BlockClass& bc = pc.blocks[b];
      std::vector<size_t> order(bc.row_eqs.size());
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      auto key = [&](size_t i) {
        int r = bc.row_eqs[i];
        if (r < 0) return -2;
        auto t = bc.terminated_at.find(r);
        return t == bc.terminated_at.end() ? -1 : t->second;
      };
      std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return key(a) < key(b); });
      for (size_t i : order) {
        int code = bc.row_eqs[i];
        Row r{b, i, code < 0 ? lin_eq.at(-1 - code) : main_eq.at(code), {}};
        Var pv = prefs[b][i];
        if (pv != none) r.cand.push_back(pv);
        for (Var v : c.vars)
          if (v != pv && free_slot.count(v) && eqs[r.eq].degree_in(v) > 0) r.cand.push_back(v);
        rows.push_back(std::move(r));
      }
    }
    std::vector<int> eq;
    std::vector<Var> cols;
    long budget = 200000;
    std::function<bool(size_t)> dfs = [&](size_t r) {
      if (r == rows.size()) return true;
      eq.push_back(rows[r].eq);
      for (Var v : rows[r].cand) {
        if (--budget < 0) break;
        if (std::find(cols.begin(), cols.end(), v) != cols.end()) continue;
        cols.push_back(v);
        if (rank_of(eq, cols, x, nullptr) == (int)r + 1 && dfs(r + 1)) return true;
        cols.pop_back();
      }
      eq.pop_back();
      return false;
    };
    if (!dfs(0)) return false;
    std::vector<std::vector<Var>> chosen(pc.blocks.size());
    bool changed = false;
    for (size_t r = 0; r < rows.size(); ++r) {
      BlockClass& bc = pc.blocks[rows[r].block];
      int code = bc.row_eqs[rows[r].pos];
      chosen[rows[r].block].push_back(cols[r]);
      if (cols[r] == prefs[rows[r].block][rows[r].pos]) continue;
      changed = true;
      bc.reselected.push_back(code);
      if (bc.terminating.count(code)) bc.terminating[code] = cols[r];
    }
    for (size_t b = 0; b < pc.blocks.size(); ++b) pc.blocks[b].cols = chosen[b];
    if (changed) pc.reselected = 1;
    return true;
  }

  PointCheck check(const std::vector<u64>& z, bool reselect) const {
    PointCheck pc;
    auto PV = path_values(A, path, z, p);
    auto x = free_values(z);
    const Chart& base = A.charts[path.ids[0]];
    std::vector<int> rows;
    std::vector<Var> cols;
    std::vector<std::vector<Var>> prefs;  // per block, parallel to row_eqs
    auto fail = [&](const std::string& s) {
      pc.ok = false;
      pc.failures.push_back(s);
    };
    for (size_t k = 0; k < M.blocks.size(); ++k) {
      const Block& B = M.blocks[k];
      BlockClass bc;
      bc.k = (int)k + 1;
      std::vector<int> mains;
      for (size_t i = 0; i < M.mains.size(); ++i)
        if (M.mains[i].k == (int)k + 1) mains.push_back((int)i);
      for (int i : mains) {
        auto& b0 = base.mains[i];
        if (eval_mono(base, b0.plus, PV[0], p) || eval_mono(base, b0.minus, PV[0], p)) {
          bc.original.push_back(i);
          continue;
        }
        bc.intrinsic.push_back(i);
        // first chart on which the binomial has a unit term; pointwise nonvanishing as a fallback
        size_t j = 1;
        for (; j < path.ids.size(); ++j) {
          const Chart& cj = A.charts[path.ids[j]];
          if (cj.mains[i].plus.is_one() || cj.mains[i].minus.is_one()) break;
        }
        if (j == path.ids.size())
          for (j = 1; j < path.ids.size(); ++j) {
            const Chart& cj = A.charts[path.ids[j]];
            if (eval_mono(cj, cj.mains[i].plus, PV[j], p) || eval_mono(cj, cj.mains[i].minus, PV[j], p)) break;
          }
        std::string bname = "B(" + std::to_string(M.mains[i].k) + "," + std::to_string(M.mains[i].tau) + ")";
        if (j == path.ids.size()) {
          fail(bname + " never terminates along the path");
          continue;
        }
        const Chart& cj = A.charts[path.ids[j]];
        Var y = cj.side == 0 ? cj.center1 : cj.center0;
        for (size_t jj = j + 1; jj < path.ids.size(); ++jj) {
          const Chart& cc = A.charts[path.ids[jj]];
          BlowupMap t = blowup_map(cc.center0, cc.center1, cc.side);
          if (y == t.yi) y = t.zeta;
        }
        if (slot_of(c, y) < 0) {
          fail(bname + " terminating variable left the chart");
          continue;
        }
        bc.terminating[i] = y;
        bc.terminated_at[i] = (int)j;
      }
      bc.kase = bc.original.empty() ? 'a' : c.lambda_o[k] == 0 ? 'b' : 'g';
      // preferred column per row; rows are the linear relation (if kept) then the live mains
      const Var none = 0xffffffffu;
      std::vector<Var> pref;
      auto stem_col = [&](Var stem) {
        Var v = by_stem(stem);
        if (v == none && !reselect)
          fail("block " + std::to_string(k + 1) + ": missing column " + var_name(stem, M.tab));
        return v;
      };
      if (lin_eq.count((int)k)) {
        bc.row_eqs.push_back(-1 - (int)k);
        Var pick = none;
        if (bc.kase == 'a') {
          auto& L = c.linears[k];
          for (size_t s = 0; s < L.terms.size() && pick == none; ++s) {
            if (!eval_mono(c, L.terms[s].second, z, p)) continue;
            Var stem = M.rho(B.pairs[s]);
            for (auto& [v, e] : L.terms[s].second.f)
              if (var_stem(v) == stem && free_slot.count(v)) pick = v;
          }
          if (pick == none && !reselect) fail("block " + std::to_string(k + 1) + ": no surviving linear term");
        } else {
          pick = stem_col(M.pl(B.u));
        }
        pref.push_back(pick);
      }
      for (int i : mains) {
        if (!main_eq.count(i)) continue;  // identically zero after pinning: row and column drop
        bc.row_eqs.push_back(i);
        auto t = bc.terminating.find(i);
        if (t != bc.terminating.end()) {
          pref.push_back(t->second);
          continue;
        }
        if (bc.kase == 'a') {
          pref.push_back(none);  // intrinsic with no terminating variable, already reported
          continue;
        }
        int tau = M.mains[i].tau;
        pref.push_back(stem_col(M.rho(B.pairs[bc.kase == 'g' && tau == c.lambda_o[k] ? 0 : tau])));
      }
      for (Var v : pref)
        if (v != none) bc.cols.push_back(v);
      for (int r : bc.row_eqs) rows.push_back(r < 0 ? lin_eq.at(-1 - r) : main_eq.at(r));
      for (Var v : bc.cols) cols.push_back(v);
      prefs.push_back(std::move(pref));
      pc.blocks.push_back(std::move(bc));
    }
    if (reselect && (rows.size() != cols.size() || rank_of(rows, cols, x, nullptr) < (int)rows.size()))
      if (reselect_columns(pc, prefs, x)) {
        cols.clear();
        for (auto& bc : pc.blocks)
          for (Var v : bc.cols) cols.push_back(v);
      }
    pc.rows = (int)rows.size();
    pc.cols = (int)cols.size();
    std::string err;
    pc.rank = rank_of(rows, cols, x, &err);
    if (pc.rank < 0) {
      fail(err);
      pc.rank = 0;
    }
    if (pc.rows != pc.cols) fail("J* is " + std::to_string(pc.rows) + "x" + std::to_string(pc.cols));
    else if (pc.rank != pc.rows) fail("J* rank " + std::to_string(pc.rank) + " < " + std::to_string(pc.rows));
    std::vector<int> all(eqs.size());
    for (size_t i = 0; i < eqs.size(); ++i) all[i] = (int)i;
    pc.full_rank = rank_of(all, freev, x, nullptr);
    if (pc.full_rank < pc.rank) fail("full Jacobian rank below J* rank");
    pc.dim_t = (int)freev.size() - pc.full_rank;
    return pc;
  }
};

std::string point_str(const Chart& c, const std::vector<u64>& z, const IndexTable& tab) {
  std::string s = "{";
  for (size_t i = 0; i < z.size(); ++i) s += (i ? ", " : "") + var_name(c.vars[i], tab) + "=" + std::to_string(z[i]);
  return s + "}";
}

}  // namespace

PointCheck check_point(const TowerRun& R, const GammaRun& G, int chart, const std::vector<u64>& z, u64 p,
                       bool reselect) {
  Ctx ctx(R.atlas, R.atlas.charts.at(chart), G.states.at(chart), p);
  return ctx.check(z, reselect);
}

SmoothnessReport certify(const TowerRun& R, const GammaRun& G, const VerifyOptions& opt) {
  SmoothnessReport rep;
  rep.expected_dim = G.expected_dim;
  const Atlas& A = R.atlas;
  const Model& M = *R.model;
  bool partial = R.partial, failed = false;
  if (R.partial) rep.notes.push_back("tower is partial: " + R.partial_reason);
  std::vector<long> primes = opt.primes;
  bool owned = R.point_prime && G.gamma.empty();
  if (R.point_prime) {
    primes = {R.point_prime};
    rep.notes.push_back("point-driven atlas over F_" + std::to_string(R.point_prime));
  }
  for (int id : G.leaves) {
    const Chart& c = A.charts[id];
    const GammaChart& g = G.states[id];
    for (long p : primes) {
      ChartReport cr;
      cr.chart = id;
      cr.name = c.name;
      cr.p = p;
      cr.empty = g.empty;
      cr.undecided = g.undecided;
      if (g.undecided) partial = true;
      if (g.empty) {
        rep.charts.push_back(std::move(cr));
        continue;
      }
      std::vector<std::vector<u64>> pts;
      if (owned) {
        auto it = R.points.find(id);
        if (it != R.points.end())
          for (size_t i = 0; i < it->second.size(); ++i) pts.push_back(it->second.row(i));
      } else {
        auto ps = gamma_points(c, g, p, opt.search);
        cr.exhaustive = ps.exhaustive;
        pts = std::move(ps.pts);
      }
      cr.points = pts.size();
      if (!pts.empty()) {
        Ctx ctx(A, c, g, p);
        for (auto& z : pts) {
          std::vector<int> bad;
          if (!terminates_at(c, z, p, &bad)) {
            ++cr.termination_failures;
            if (cr.failures.size() < 8)
              cr.failures.push_back("main binomial " + std::to_string(bad[0]) + " has no nonzero term at " +
                                    point_str(c, z, M.tab));
          }
          PointCheck pc = ctx.check(z, opt.reselect);
          if (pc.reselected) ++cr.reselected_points;
          if (cr.expected_rank < 0) cr.expected_rank = pc.rows;
          cr.min_rank = cr.min_rank < 0 ? pc.rank : std::min(cr.min_rank, pc.rank);
          cr.dim_t[pc.dim_t]++;
          rep.dim_t[pc.dim_t]++;
          if (rep.expected_dim >= 0 && pc.dim_t != rep.expected_dim) {
            pc.ok = false;
            pc.failures.push_back("tangent dimension " + std::to_string(pc.dim_t));
          }
          if (!pc.ok) {
            ++rep.failed_points;
            if (cr.failures.size() < 8) cr.failures.push_back(pc.failures[0] + " at " + point_str(c, z, M.tab));
          }
        }
      }
      rep.points += cr.points;
      rep.termination_failures += cr.termination_failures;
      rep.reselected_points += cr.reselected_points;
      if (!cr.failures.empty()) failed = true;
      rep.charts.push_back(std::move(cr));
    }
  }
  if (!rep.points) {
    partial = true;
    rep.notes.push_back("no points enumerated");
  }
  rep.verdict = failed ? "FAIL" : partial ? "PARTIAL" : "PASS";
  return rep;
}

TowerAudit audit_tower(const TowerRun& R) {
  TowerAudit out;
  const Atlas& A = R.atlas;
  const Model& M = *R.model;
  for (const Chart& c : A.charts) {
    int stage = c.parent < 0 ? -1 : R.steps.at(c.step).stage;
    ++out.charts_checked;
    if (stage <= 1) {
      for (size_t i = 0; i < c.mains.size(); ++i) {
        int rho_deg = 0;
        bool sq = true;
        for (auto& [v, e] : c.mains[i].plus.f) {
          if (e != 1) sq = false;
          if (var_kind(v) == kRho) rho_deg += e;
        }
        if (!sq || rho_deg > 1)
          out.square_free_failures.push_back(c.name + ": plus term " + c.mains[i].plus.str(M.tab));
      }
    }
    if (c.parent < 0) continue;
    // residual cofactor identity, pulled back from the base chart
    const Chart& base = A.charts[c.base];
    auto am = ancestor_map(A, c.base, c.id);
    auto pull = [&](const Monomial& m) {
      Monomial r;
      for (auto& [v, e] : m.f)
        for (int i = 0; i < e; ++i) r = r * am.at(v);
      return r;
    };
    // pullback of a base binomial divided by the chart binomial; false if not a monomial multiple
    auto factor = [&](const ChartBinomial& b0, const ChartBinomial& b, Monomial& D) {
      Monomial pp = pull(b0.plus), pm = pull(b0.minus);
      if (!pp.divisible_by(b.plus)) return false;
      D = pp.divided(b.plus);
      return D * b.minus == pm;
    };
    for (size_t r = 0; r < M.residuals.size(); ++r) {
      auto& Rb = M.residuals[r];
      const Block& B = M.blocks[Rb.k - 1];
      int is = M.main_index(Rb.k, Rb.tau), it = M.main_index(Rb.k, Rb.t);
      auto cof = [&](int tau) {
        auto pr = B.pairs[tau];
        return Monomial::of(M.pl(pr.first)) * Monomial::of(M.pl(pr.second));
      };
      Monomial Ds, Dt, Dr;
      std::string who = c.name + ": residual " + std::to_string(r);
      if (!factor(base.mains[is], c.mains[is], Ds) || !factor(base.mains[it], c.mains[it], Dt) ||
          !factor(base.residuals[r], c.residuals[r], Dr)) {
        out.cofactor_failures.push_back(who + " is not a monomial quotient of its pullback");
        continue;
      }
      Polynomial lhs = Polynomial::mono(pull(Monomial::of(M.pl(B.u))) * Dr) * c.residuals[r].poly();
      Polynomial rhs = Polynomial::mono(pull(cof(Rb.t)) * Ds) * c.mains[is].poly() -
                       Polynomial::mono(pull(cof(Rb.tau)) * Dt) * c.mains[it].poly();
      if (lhs != rhs) out.cofactor_failures.push_back(who + " is not a cofactor combination");
    }
  }
  return out;
}

}  // namespace grres
