#include "grres/gamma.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

namespace grres {

// ---------------------------------------------------------------- matroids

static std::vector<Tuple> all_subsets(int n) {
  std::vector<Tuple> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    Tuple t;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) t.push_back(i + 1);
    out.push_back(t);
  }
  return out;
}

void validate_matroid(const Matroid& M) {
  if (M.n < 1 || M.n > 16) throw Error("invalid-parameters", "matroid ground set size out of range");
  if (M.d < 1 || M.d >= M.n) throw Error("invalid-parameters", "require 1 ≤ d < n");
  auto subs = all_subsets(M.n);
  if ((int)M.rank.size() != (int)subs.size()) throw Error("invalid-parameters", "matroid must rank every subset");
  Tuple full;
  for (int i = 1; i <= M.n; ++i) full.push_back(i);
  if (M.r({}) != 0) throw Error("invalid-parameters", "d of the empty set must be 0");
  if (M.r(full) != M.d) throw Error("invalid-parameters", "d of the ground set must equal the rank");
  for (auto& I : subs) {
    int r = M.r(I);
    if (r < 0 || r > (int)I.size() || r > M.d) throw Error("invalid-parameters", "d_I out of range for " + tuple_str(I, M.n));
  }
  for (auto& I : subs)
    for (auto& J : subs)
      if (M.r(I) + M.r(J) > M.r(set_union(I, J)) + M.r(set_intersect(I, J)))
        throw Error("invalid-parameters", "exchange inequality fails for I=" + tuple_str(I, M.n) + " J=" + tuple_str(J, M.n));
}

Matroid make_matroid(int d, int n, const std::map<Tuple, int>& listed) {
  if (n < 1 || n > 16) throw Error("invalid-parameters", "matroid ground set size out of range");
  Matroid M;
  M.d = d;
  M.n = n;
  for (auto& I : all_subsets(n)) {
    auto it = listed.find(I);
    // uniform default: dim of a generic d-space meeting a coordinate |I|-space
    M.rank[I] = it != listed.end() ? it->second : std::max(0, (int)I.size() - (n - d));
  }
  for (auto& [I, r] : listed) {
    (void)r;
    if (!M.rank.count(I)) throw Error("invalid-parameters", "subset out of range: " + tuple_str(I, n));
  }
  validate_matroid(M);
  return M;
}

Matroid matroid_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error("invalid-parameters", std::string("matroid json: ") + e.what());
  }
  if (!j.contains("d") || !j.contains("n")) throw Error("invalid-parameters", "matroid json needs d and n");
  int d = j["d"].get<int>(), n = j["n"].get<int>();
  std::map<Tuple, int> listed;
  if (j.contains("dI")) {
    for (auto& [key, val] : j["dI"].items()) {
      Tuple I;
      try {
        for (auto& e : nlohmann::json::parse(key)) I.push_back(e.get<int>());
      } catch (const std::exception&) {
        throw Error("invalid-parameters", "bad subset key " + key);
      }
      std::sort(I.begin(), I.end());
      if (std::adjacent_find(I.begin(), I.end()) != I.end()) throw Error("invalid-parameters", "repeated entry in " + key);
      for (int a : I)
        if (a < 1 || a > n) throw Error("invalid-parameters", "entry out of range in " + key);
      listed[I] = val.get<int>();
    }
  }
  return make_matroid(d, n, listed);
}

bool in_matroid_polytope(const Matroid& M, const Tuple& vertex) {
  for (auto& [I, r] : M.rank)
    if ((int)set_intersect(I, vertex).size() < r) return false;
  return true;
}

std::vector<Tuple> gamma_from_matroid(const Matroid& M, const Tuple& m) {
  validate_chart_index(m, M.d, M.n);
  if (!in_matroid_polytope(M, m)) throw Error("chart-incompatible", "chart vertex lies outside the matroid polytope");
  std::vector<Tuple> out;
  for (auto& u : enumerate_index_set(M.d, M.n))
    if (!in_matroid_polytope(M, u)) out.push_back(u);
  return out;
}

// ---------------------------------------------------------------- gamma input

std::vector<Tuple> parse_gamma(const std::string& s, int d, int n) {
  validate_dn(d, n);
  std::vector<std::string> toks;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(std::remove_if(tok.begin(), tok.end(), ::isspace), tok.end());
    if (!tok.empty()) toks.push_back(tok);
  }
  std::vector<Tuple> out;
  if (toks.empty()) return out;
  auto entries = [&](const std::string& t) {
    Tuple e;
    if (t.find('.') != std::string::npos) {
      std::stringstream s2(t);
      std::string x;
      while (std::getline(s2, x, '.')) e.push_back(std::stoi(x));
    } else {
      for (char c : t) {
        if (!isdigit((unsigned char)c)) throw Error("invalid-parameters", "bad gamma entry " + t);
        e.push_back(c - '0');
      }
    }
    return e;
  };
  bool list = true;
  for (auto& t : toks)
    if ((int)entries(t).size() != d) list = false;
  if (list) {
    for (auto& t : toks) out.push_back(entries(t));
  } else if ((int)toks.size() == d) {
    Tuple one;
    for (auto& t : toks) {
      if (t.find_first_not_of("0123456789") != std::string::npos) throw Error("invalid-parameters", "bad gamma entry " + t);
      one.push_back(std::stoi(t));
    }
    out.push_back(one);
  } else {
    throw Error("invalid-parameters", "gamma must be a comma list of " + std::to_string(d) + "-tuples");
  }
  for (auto& t : out) {
    std::sort(t.begin(), t.end());
    validate_chart_index(t, d, n);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::set<Var> gamma_vars(const Model& M, const std::vector<Tuple>& gamma) {
  std::set<Var> out;
  for (auto& t : gamma) {
    if (t == M.m) throw Error("invalid-parameters", "gamma cannot contain the chart index");
    out.insert(M.pl(t));
  }
  return out;
}

bool gamma_relevant(const Block& b, const std::set<Var>& gamma) {
  for (auto& [mono, c] : b.fbar.terms()) {
    (void)c;
    bool hit = false;
    for (auto& [v, e] : mono.f)
      if (gamma.count(v)) hit = true;
    if (!hit) return true;
  }
  return false;
}

// ---------------------------------------------------------------- point helpers

namespace {

struct Compiled {
  std::vector<Var> vars;
  std::map<Var, int> slot;
  u64 p;
  Compiled(std::vector<Var> vs, u64 p_) : vars(std::move(vs)), p(p_) {
    for (size_t i = 0; i < vars.size(); ++i) slot[vars[i]] = (int)i;
  }
  FpPoly compile(const Polynomial& f) const {
    return FpPoly::compile(f, p, [&](Var v) {
      auto it = slot.find(v);
      if (it == slot.end()) throw Error("missing-assignment", "variable outside the slot set");
      return it->second;
    });
  }
};

// Solve A x = b over F_p; returns false unless the solution exists and is unique.
bool solve_unique(FpMatrix A, std::vector<u64> b, u64 p, std::vector<u64>& x) {
  int rows = (int)A.size(), cols = rows ? (int)A[0].size() : 0;
  std::vector<int> piv;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int s = -1;
    for (int i = r; i < rows; ++i)
      if (A[i][c]) {
        s = i;
        break;
      }
    if (s < 0) continue;
    std::swap(A[r], A[s]);
    std::swap(b[r], b[s]);
    u64 inv = invm(A[r][c], p);
    for (int j = 0; j < cols; ++j) A[r][j] = mulm(A[r][j], inv, p);
    b[r] = mulm(b[r], inv, p);
    for (int i = 0; i < rows; ++i)
      if (i != r && A[i][c]) {
        u64 f = A[i][c];
        for (int j = 0; j < cols; ++j) A[i][j] = subm(A[i][j], mulm(f, A[r][j], p), p);
        b[i] = subm(b[i], mulm(f, b[r], p), p);
      }
    piv.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (b[i]) return false;
  if (r < cols) return false;
  x.assign(cols, 0);
  for (int i = 0; i < r; ++i) x[piv[i]] = b[i];
  return true;
}

// Coefficient rows of equations linear in `cols`, evaluated at a point of the other variables.
struct LinearRows {
  std::vector<std::vector<FpPoly>> coef;  // [row][col]
  std::vector<FpPoly> cst;
};

LinearRows linear_rows(const std::vector<Polynomial>& eqs, const std::vector<Var>& cols, const Compiled& C) {
  std::map<Var, Polynomial> zero;
  for (Var c : cols) zero[c] = Polynomial::constant(0);
  LinearRows L;
  for (auto& f : eqs) {
    for (auto& [mono, co] : f.terms()) {
      (void)co;
      int deg = 0;
      for (auto& [v, e] : mono.f)
        if (std::find(cols.begin(), cols.end(), v) != cols.end()) deg += e;
      if (deg > 1) throw Error("internal", "system is not linear in the designated variables");
    }
    std::vector<FpPoly> row;
    for (Var c : cols) row.push_back(C.compile(f.derivative(c).substitute(zero)));
    L.coef.push_back(std::move(row));
    L.cst.push_back(C.compile(f.substitute(zero)));
  }
  return L;
}

FpMatrix eval_rows(const LinearRows& L, const std::vector<u64>& z, const std::vector<int>& which) {
  FpMatrix A;
  for (auto& row : L.coef) {
    std::vector<u64> r;
    for (int c : which) r.push_back(row[c].eval(z));
    A.push_back(std::move(r));
  }
  return A;
}

Polynomial pin_substitute(const Polynomial& f, const GammaChart& g) {
  std::map<Var, Polynomial> s;
  for (Var v : g.zero) s[v] = Polynomial::constant(0);
  for (Var v : g.one) s[v] = Polynomial::constant(1);
  return f.substitute(s);
}

Polynomial transform_poly(const Polynomial& f, const BlowupMap& t) {
  std::map<Var, Polynomial> s;
  s[t.yi] = Polynomial::var(t.zeta);
  s[t.yj] = Polynomial::var(t.zeta) * Polynomial::var(t.yj);
  Polynomial g = f.substitute(s);
  int e = -1;
  for (auto& [mono, c] : g.terms()) {
    (void)c;
    int x = mono.exponent(t.zeta);
    e = e < 0 ? x : std::min(e, x);
  }
  if (e <= 0) return g;
  Polynomial r;
  for (auto& [mono, c] : g.terms()) r.add_term(mono.divided(Monomial::of(t.zeta, e)), c);
  return r;
}

}  // namespace

int generic_rank(const std::vector<Polynomial>& lin, const std::vector<Var>& cols, const std::vector<Polynomial>& variety,
                 const std::vector<Var>& vvars, const GammaOptions& opt, long* witnesses) {
  if (lin.empty() || cols.empty()) {
    if (witnesses) *witnesses = 0;
    return 0;
  }
  std::vector<Var> all = vvars;
  for (Var c : cols) all.push_back(c);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  int best = -1;
  long wit = 0;
  std::vector<int> which(cols.size());
  for (size_t i = 0; i < cols.size(); ++i) which[i] = (int)i;
  for (long p : opt.primes) {
    Compiled C(all, p);
    LinearRows L = linear_rows(lin, cols, C);
    auto ps = enumerate_points(variety, vvars, p, {}, opt.search);
    for (auto& pt : ps.pts) {
      std::vector<u64> z(all.size(), 0);
      for (size_t i = 0; i < vvars.size(); ++i) z[C.slot.at(vvars[i])] = pt[i];
      int r = rank_mod_p(eval_rows(L, z, which), p);
      if (r > best) {
        best = r;
        wit = 0;
      }
      if (r == best) ++wit;
    }
  }
  if (witnesses) *witnesses = wit;
  return best;
}

std::vector<Polynomial> gamma_equations(const Chart& c, const GammaChart& g) {
  std::vector<Polynomial> out;
  for (auto& b : c.mains) out.push_back(b.poly());
  if (c.residuals_live)
    for (auto& b : c.residuals) out.push_back(b.poly());
  for (auto& b : c.quotients) out.push_back(b.poly());
  for (int k : g.fstar) out.push_back(c.linears.at(k).poly());
  for (auto& e : g.extras) out.push_back(e);
  return out;
}

std::map<Var, u64> gamma_pins(const GammaChart& g) {
  std::map<Var, u64> f;
  for (Var v : g.zero) f[v] = 0;
  for (Var v : g.one) f[v] = 1;
  return f;
}

PointSet gamma_points(const Chart& c, const GammaChart& g, long p, const PointSearchOptions& so) {
  return enumerate_points(gamma_equations(c, g), c.vars, p, gamma_pins(g), so);
}

// ---------------------------------------------------------------- pipeline

namespace {

struct Pipeline {
  const TowerRun& R;
  const Model& M;
  const Atlas& A;
  const std::set<Var>& gamma;
  const GammaOptions& opt;
  GammaRun& out;
  std::map<std::pair<int, long>, PointSet> cache;
  std::map<Var, int> block_of;  // rho variable -> block

  Pipeline(const TowerRun& r, const std::set<Var>& g, const GammaOptions& o, GammaRun& res)
      : R(r), M(*r.model), A(r.atlas), gamma(g), opt(o), out(res) {
    for (size_t k = 0; k < M.blocks.size(); ++k)
      for (auto& pr : M.blocks[k].pairs) block_of[M.rho(pr)] = (int)k;
  }

  const PointSet& points(int id, long p) {
    auto key = std::make_pair(id, p);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache[key] = gamma_points(A.charts[id], out.states[id], p, exhaustive());
  }

  PointSearchOptions exhaustive() const {
    PointSearchOptions so = opt.search;
    so.exhaustive_threshold = std::max(so.exhaustive_threshold, 1 << 20);
    return so;
  }

  bool has_points(int id) {
    for (long p : opt.primes)
      if (!points(id, p).pts.empty()) return true;
    return false;
  }

  void base_stage(int id) {
    const Chart& c = A.charts[id];
    GammaChart& g = out.states[id];
    for (Var v : gamma)
      if (c.has(v)) g.zero.insert(v);
    std::vector<Var> plv = M.pl_vars();
    for (size_t k = 0; k < M.blocks.size() && !g.empty; ++k) {
      const Block& B = M.blocks[k];
      BlockRecord rec;
      rec.k = (int)k + 1;
      rec.relevant = gamma_relevant(B, gamma);
      if (rec.relevant) {
        for (auto& pr : B.pairs) {
          bool hit = (pr.first != M.mid && gamma.count(M.pl(pr.first))) ||
                     (pr.second != M.mid && gamma.count(M.pl(pr.second)));
          if (!hit) continue;
          Var v = M.rho(pr);
          rec.lam0.push_back(v);
          if (c.has(v)) {
            g.zero.insert(v);
          } else {
            g.empty = true;
            g.notes.push_back("absorbed term " + var_name(v, M.tab) + " forced to vanish");
          }
        }
        g.fstar.push_back((int)k);
        g.blocks.push_back(rec);
        continue;
      }
      irrelevant_block(c, g, (int)k, rec, plv);
      g.blocks.push_back(rec);
    }
  }

  void irrelevant_block(const Chart& c, GammaChart& g, int k, BlockRecord& rec, const std::vector<Var>& plv) {
    const Block& B = M.blocks[k];
    std::vector<Var> cols;
    for (auto& pr : B.pairs)
      if (c.has(M.rho(pr))) cols.push_back(M.rho(pr));
    auto in_blocks = [&](const Monomial& mono, int upto, bool need_k) {
      bool touches_k = false;
      for (auto& [v, e] : mono.f) {
        auto it = block_of.find(v);
        if (it == block_of.end()) continue;
        if (it->second > upto) return false;
        if (it->second == k) touches_k = true;
      }
      return !need_k || touches_k;
    };
    std::vector<Polynomial> rows{c.linears[k].poly()};
    for (size_t i = 0; i < M.mains.size(); ++i)
      if (M.mains[i].k == k + 1) rows.push_back(c.mains[i].poly());
    for (size_t i = 0; i < M.residuals.size(); ++i)
      if (M.residuals[i].k == k + 1) rows.push_back(c.residuals[i].poly());
    for (size_t i = 0; i < M.quotients.size(); ++i) {
      auto& q = c.quotients[i];
      if (in_blocks(q.plus, k, false) && in_blocks(q.minus, k, false) &&
          (in_blocks(q.plus, k, true) || in_blocks(q.minus, k, true)))
        rows.push_back(q.poly());
    }
    // the scheme cut out by everything before this block
    std::vector<Polynomial> prior;
    for (auto& b : M.blocks) prior.push_back(b.fbar);
    std::vector<Var> zvars = plv;
    for (Var v : c.vars) {
      auto it = block_of.find(v);
      if (it != block_of.end() && it->second < k) zvars.push_back(v);
    }
    std::sort(zvars.begin(), zvars.end());
    for (size_t i = 0; i < M.mains.size(); ++i)
      if (M.mains[i].k <= k) prior.push_back(c.mains[i].poly());
    for (size_t i = 0; i < M.residuals.size(); ++i)
      if (M.residuals[i].k <= k) prior.push_back(c.residuals[i].poly());
    for (size_t i = 0; i < M.quotients.size(); ++i)
      if (in_blocks(c.quotients[i].plus, k - 1, false) && in_blocks(c.quotients[i].minus, k - 1, false))
        prior.push_back(c.quotients[i].poly());
    for (int j : g.fstar) prior.push_back(c.linears[j].poly());
    std::map<Var, u64> fixed;
    for (auto& [v, a] : gamma_pins(g))
      if (std::binary_search(zvars.begin(), zvars.end(), v)) fixed[v] = a;

    std::vector<Var> all = zvars;
    for (Var v : cols) all.push_back(v);
    std::sort(all.begin(), all.end());
    struct PerPrime {
      long p;
      LinearRows L;
      std::vector<std::vector<u64>> z;
    };
    std::vector<PerPrime> data;
    size_t npts = 0;
    for (long p : opt.primes) {
      Compiled C(all, p);
      PerPrime d{p, linear_rows(rows, cols, C), {}};
      auto ps = enumerate_points(prior, zvars, p, fixed, exhaustive());
      for (auto& pt : ps.pts) {
        std::vector<u64> z(all.size(), 0);
        for (size_t i = 0; i < zvars.size(); ++i) z[C.slot.at(zvars[i])] = pt[i];
        d.z.push_back(std::move(z));
      }
      npts += d.z.size();
      data.push_back(std::move(d));
    }
    if (!npts) {
      g.empty = true;
      g.notes.push_back("no points before block " + std::to_string(k + 1));
      return;
    }
    // lex-first column basis of maximal rank
    std::vector<int> S;
    for (int c2 = 0; c2 < (int)cols.size(); ++c2) {
      std::vector<int> trial = S;
      trial.push_back(c2);
      bool grows = false;
      for (auto& d : data) {
        for (auto& z : d.z)
          if (rank_mod_p(eval_rows(d.L, z, trial), d.p) == (int)trial.size()) {
            grows = true;
            break;
          }
        if (grows) break;
      }
      if (grows) S = trial;
    }
    std::vector<int> pinned;
    for (int c2 = 0; c2 < (int)cols.size(); ++c2)
      if (std::find(S.begin(), S.end(), c2) == S.end()) {
        pinned.push_back(c2);
        rec.lam1.push_back(cols[c2]);
        g.one.insert(cols[c2]);
      }
    for (int s : S) rec.lamdet.push_back(cols[s]);
    std::vector<bool> always_zero(S.size(), true);
    size_t solved = 0;
    for (auto& d : data)
      for (auto& z : d.z) {
        FpMatrix AS = eval_rows(d.L, z, S);
        std::vector<u64> b;
        for (size_t r = 0; r < d.L.cst.size(); ++r) {
          u64 s = d.L.cst[r].eval(z);
          for (int c2 : pinned) s = addm(s, d.L.coef[r][c2].eval(z), d.p);
          b.push_back(subm(0, s, d.p));
        }
        std::vector<u64> x;
        if (!solve_unique(AS, b, d.p, x)) continue;
        ++solved;
        for (size_t i = 0; i < S.size(); ++i)
          if (x[i]) always_zero[i] = false;
      }
    if (!S.empty() && !solved) {
      g.undecided = true;
      g.notes.push_back("no point determines block " + std::to_string(k + 1));
    } else {
      for (size_t i = 0; i < S.size(); ++i)
        if (always_zero[i]) {
          rec.lam0.push_back(cols[S[i]]);
          g.zero.insert(cols[S[i]]);
        }
    }
    rec.in_fstar = false;
    for (auto& [sg, mono] : c.linears[k].terms) {
      (void)sg;
      for (auto& [v, e] : mono.f)
        if (!g.zero.count(v) && !g.one.count(v)) rec.in_fstar = true;
    }
    if (rec.in_fstar) g.fstar.push_back(k);
  }

  void blowup_stage(int id) {
    const Chart& ch = A.charts[id];
    const GammaChart& gp = out.states[ch.parent];
    GammaChart& g = out.states[id];
    if (gp.empty) {
      g.empty = true;
      g.notes.push_back("parent empty");
      return;
    }
    g.undecided = gp.undecided;
    g.fstar = gp.fstar;
    BlowupMap t = blowup_map(ch.center0, ch.center1, ch.side);
    for (auto& e : gp.extras) g.extras.push_back(transform_poly(e, t));
    for (Var v : gp.zero)
      if (v != t.yi && v != t.yj) g.zero.insert(v);
    for (Var v : gp.one)
      if (v != t.yi && v != t.yj) g.one.insert(v);
    bool contained = gp.zero.count(t.yi) && gp.zero.count(t.yj);
    if (!contained) {
      if (gp.zero.count(t.yi)) {
        g.empty = true;
        g.notes.push_back("transform misses this chart");
        return;
      }
      if (gp.one.count(t.yi)) g.one.insert(t.zeta);
      if (gp.zero.count(t.yj)) g.zero.insert(t.yj);
      if (gp.one.count(t.yj)) {
        if (gp.one.count(t.yi)) g.one.insert(t.yj);
        else g.extras.push_back(Polynomial::var(t.zeta) * Polynomial::var(t.yj) - Polynomial::constant(1));
      }
      return;
    }
    g.zero.insert(t.zeta);
    std::vector<std::pair<Polynomial, Polynomial>> ab;  // a*y + b
    bool nonlinear = false;
    for (auto& f : gamma_equations(ch, g)) {
      Polynomial r = pin_substitute(f, g);
      int deg = r.degree_in(t.yj);
      if (!deg) continue;
      if (deg > 1) {
        nonlinear = true;
        continue;
      }
      Polynomial a, b;
      for (auto& [mono, c] : r.terms()) {
        if (mono.exponent(t.yj)) a.add_term(mono.divided(Monomial::of(t.yj)), c);
        else b.add_term(mono, c);
      }
      ab.push_back({a, b});
    }
    if (nonlinear) g.notes.push_back("fiber equation of degree > 1 ignored");
    if (ab.empty()) {
      g.one.insert(t.yj);
      g.notes.push_back("fiber coordinate pinned to 1");
      return;
    }
    const Chart& par = A.charts[ch.parent];
    bool any_a = false, all_zero = true, inconsistent = false, any_point = false;
    for (long p : opt.primes) {
      const PointSet& ps = points(par.id, p);
      if (ps.pts.empty()) continue;
      any_point = true;
      Compiled C(par.vars, p);
      std::vector<std::pair<FpPoly, FpPoly>> cab;
      for (auto& [a, b] : ab) cab.push_back({C.compile(a), C.compile(b)});
      for (auto& z : ps.pts) {
        bool have = false;
        u64 sol = 0;
        for (auto& [a, b] : cab) {
          u64 av = a.eval(z);
          if (!av) continue;
          u64 s = mulm(subm(0, b.eval(z), p), invm(av, p), p);
          if (have && s != sol) inconsistent = true;
          have = true;
          sol = s;
        }
        if (have) {
          any_a = true;
          if (sol) all_zero = false;
        }
      }
    }
    if (!any_point) {
      g.undecided = true;
      g.notes.push_back("no parent points to decide the fiber");
      return;
    }
    if (inconsistent) g.notes.push_back("fiber equations disagree at some point");
    if (!any_a) {
      g.one.insert(t.yj);
      g.notes.push_back("fiber coordinate pinned to 1");
    } else if (all_zero) {
      g.zero.insert(t.yj);
    }
  }

  void audit(int id) {
    const Chart& c = A.charts[id];
    GammaChart& g = out.states[id];
    std::vector<bool> vanish(c.vars.size(), true);
    bool any = false;
    for (long p : opt.primes) {
      const PointSet& ps = points(id, p);
      for (auto& z : ps.pts) {
        any = true;
        for (size_t i = 0; i < z.size(); ++i)
          if (z[i]) vanish[i] = false;
      }
    }
    if (!any) {
      g.empty = true;
      return;
    }
    for (size_t i = 0; i < c.vars.size(); ++i)
      if (vanish[i] && !g.zero.count(c.vars[i]))
        out.audit_failures.push_back(c.name + ": " + var_name(c.vars[i], M.tab) + " vanishes on every point");
  }

  void birationality() {
    out.birational_checked = true;
    std::vector<Var> plv = M.pl_vars();
    std::vector<Polynomial> fb;
    for (auto& b : M.blocks) fb.push_back(b.fbar);
    std::map<Var, u64> gfix;
    for (Var v : gamma) gfix[v] = 0;
    std::map<int, std::map<Var, Monomial>> maps;
    for (long p : opt.primes) {
      auto in = enumerate_points(fb, plv, p, gfix, exhaustive());
      std::set<std::vector<u64>> input;
      auto dense = [&](const std::vector<u64>& x) {
        for (size_t i = 0; i < plv.size(); ++i)
          if (!gamma.count(plv[i]) && !x[i]) return false;
        return true;
      };
      for (auto& x : in.pts)
        if (dense(x)) input.insert(x);
      std::set<std::vector<u64>> image;
      bool injective = true;
      for (int id : out.leaves) {
        const GammaChart& g = out.states[id];
        if (g.empty) continue;
        const Chart& c = A.charts[id];
        if (!maps.count(id)) maps[id] = ancestor_map(A, c.base, id);
        auto& am = maps[id];
        std::set<std::vector<u64>> mine;
        for (auto& z : points(id, p).pts) {
          bool off = true;
          for (size_t i = 0; i < c.vars.size(); ++i)
            if (is_exceptional_name(c.vars[i]) && !g.zero.count(c.vars[i]) && !z[i]) off = false;
          if (!off) continue;
          std::vector<u64> x;
          for (Var v : plv) {
            u64 val = 1;
            for (auto& [w, e] : am.at(v).f)
              val = mulm(val, powm(z[std::lower_bound(c.vars.begin(), c.vars.end(), w) - c.vars.begin()], e, p), p);
            x.push_back(val);
          }
          if (!dense(x)) continue;
          if (!mine.insert(x).second) injective = false;
          image.insert(x);
        }
      }
      bool eq = image == input && injective;
      out.birational_detail.push_back("p=" + std::to_string(p) + " input " + std::to_string(input.size()) + " image " +
                                      std::to_string(image.size()) + (injective ? "" : " (not injective)") +
                                      (eq ? " agree" : " differ"));
      if (!eq) out.birational_ok = false;
    }
  }

  void expected_dimension() {
    std::vector<Var> plv = M.pl_vars(), freev;
    for (Var v : plv)
      if (!gamma.count(v)) freev.push_back(v);
    std::map<Var, Polynomial> zero;
    for (Var v : gamma) zero[v] = Polynomial::constant(0);
    std::vector<Polynomial> fb;
    for (auto& b : M.blocks) fb.push_back(b.fbar.substitute(zero));
    int best = 0;
    for (long p : opt.primes) {
      Compiled C(freev, p);
      std::vector<std::vector<FpPoly>> J;
      for (auto& f : fb) {
        std::vector<FpPoly> row;
        for (Var v : freev) row.push_back(C.compile(f.derivative(v)));
        J.push_back(std::move(row));
      }
      for (auto& z : enumerate_points(fb, freev, p, {}, exhaustive()).pts) {
        FpMatrix m;
        for (auto& row : J) {
          std::vector<u64> r;
          for (auto& e : row) r.push_back(e.eval(z));
          m.push_back(std::move(r));
        }
        best = std::max(best, rank_mod_p(m, p));
      }
    }
    out.expected_dim = (int)freev.size() - best;
  }
};

}  // namespace

GammaRun run_gamma_pipeline(const TowerRun& R, const std::set<Var>& gamma, const GammaOptions& opt) {
  if (!R.model) throw Error("invalid-parameters", "tower run has no model");
  for (long p : opt.primes)
    if (!is_prime(p)) throw Error("invalid-parameters", "primes must be prime");
  GammaRun out;
  out.tower = &R;
  out.gamma = gamma;
  const Atlas& A = R.atlas;
  out.states.resize(A.charts.size());
  out.leaves = A.active;
  for (size_t i = 0; i < A.charts.size(); ++i) out.states[i].chart = (int)i;
  const Model& M = *R.model;
  if (gamma.empty()) {
    // nothing pinned: every chart carries the plain transform
    for (auto& g : out.states)
      for (size_t k = 0; k < M.blocks.size(); ++k) g.fstar.push_back((int)k);
    out.expected_dim = M.d * (M.n - M.d);
    return out;
  }
  Pipeline P(R, gamma, opt, out);
  P.expected_dimension();
  for (auto& c : A.charts) {
    if (c.parent < 0) P.base_stage(c.id);
    else P.blowup_stage(c.id);
    GammaChart& g = out.states[c.id];
    for (Var v : g.zero)
      if (g.one.count(v)) throw Error("internal", "pinned to both 0 and 1");
    if (!g.empty) P.audit(c.id);
  }
  if (R.points.empty()) P.birationality();
  return out;
}

}  // namespace grres
