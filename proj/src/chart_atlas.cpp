#include "grres/chart_atlas.hpp"

#include <algorithm>
#include <sstream>

namespace grres {

Polynomial ChartBinomial::poly() const {
  Polynomial f;
  f.add_term(plus, 1);
  f.add_term(minus, -1);
  return f;
}

Polynomial ChartLinear::poly() const {
  Polynomial f;
  for (auto& [s, m] : terms) f.add_term(m, s);
  return f;
}

std::vector<Polynomial> Chart::system(bool with_residuals) const {
  std::vector<Polynomial> out;
  for (auto& b : mains) out.push_back(b.poly());
  if (with_residuals && residuals_live)
    for (auto& b : residuals) out.push_back(b.poly());
  for (auto& b : quotients) out.push_back(b.poly());
  for (auto& l : linears) out.push_back(l.poly());
  return out;
}

std::string Atlas::divisor_name(int d) const {
  auto& D = divisors.at(d);
  if (D.kind == Divisor::Exc) return D.label;
  return "X" + var_name(D.base, model->tab).substr(1);
}

std::vector<std::vector<int>> lambda_o_choices(const Model& M, const std::string& policy) {
  std::vector<std::vector<int>> out;
  int U = (int)M.blocks.size();
  if (policy == "first") {
    out.push_back(std::vector<int>(U, 0));
  } else if (policy == "all") {
    std::vector<int> c(U, 0);
    while (true) {
      out.push_back(c);
      int i = U - 1;
      while (i >= 0 && ++c[i] == (int)M.blocks[i].pairs.size()) c[i--] = 0;
      if (i < 0) break;
    }
    if (U == 0) out.resize(1);
  } else if (policy.rfind("explicit:", 0) == 0) {
    std::string rest = policy.substr(9);
    std::stringstream ss(rest);
    std::string one;
    while (std::getline(ss, one, ';')) {
      std::vector<int> c;
      std::stringstream s2(one);
      std::string tok;
      while (std::getline(s2, tok, ',')) c.push_back(std::stoi(tok));
      if ((int)c.size() != U) throw Error("invalid-chart", "explicit choice needs one term per relation");
      for (int i = 0; i < U; ++i)
        if (c[i] < 0 || c[i] >= (int)M.blocks[i].pairs.size()) throw Error("invalid-chart", "term index out of range");
      out.push_back(c);
    }
    if (out.empty()) throw Error("invalid-chart", "empty explicit choice");
  } else {
    throw Error("invalid-parameters", "lambda-o policy must be all, first or explicit:<i,j,..>");
  }
  return out;
}

static std::string lambda_name(const std::vector<int>& lo) {
  std::string s = "V[";
  for (size_t i = 0; i < lo.size(); ++i) s += (i ? "." : "") + std::to_string(lo[i]);
  return s + "]";
}

Chart base_chart(const Model& M, const std::vector<int>& lo, const std::map<Var, int>& dname) {
  if (lo.size() != M.blocks.size()) throw Error("invalid-chart", "one absorbed term per relation required");
  Chart c;
  c.lambda_o = lo;
  c.name = lambda_name(lo);
  c.stage = "base";
  for (Var v : M.pl_vars()) c.vars.push_back(v);
  std::map<Var, Monomial> sub;  // absorbed rho variables -> 1
  for (size_t k = 0; k < M.blocks.size(); ++k) {
    auto& b = M.blocks[k];
    if (lo[k] < 0 || lo[k] >= (int)b.pairs.size()) throw Error("invalid-chart", "term index out of range");
    for (int s = 0; s < (int)b.pairs.size(); ++s) {
      if (s == lo[k]) sub[M.rho(b.pairs[s])] = Monomial{};
      else c.vars.push_back(M.rho(b.pairs[s]));
    }
  }
  std::sort(c.vars.begin(), c.vars.end());
  for (Var v : c.vars) {
    int d = dname.at(v);
    c.divisor[v] = d;
    c.var_of_divisor[d] = v;
  }
  auto reduce = [&](const Monomial& m) {
    Monomial r;
    for (auto& [v, e] : m.f)
      if (!sub.count(v)) r.f.push_back({v, e});
    return r;
  };
  for (size_t i = 0; i < M.mains.size(); ++i) c.mains.push_back({reduce(M.mains[i].plus), reduce(M.mains[i].minus), (int)i});
  for (size_t i = 0; i < M.residuals.size(); ++i)
    c.residuals.push_back({reduce(M.residuals[i].plus), reduce(M.residuals[i].minus), (int)i});
  for (size_t i = 0; i < M.quotients.size(); ++i)
    c.quotients.push_back({reduce(M.quotients[i].plus), reduce(M.quotients[i].minus), (int)i});
  for (size_t k = 0; k < M.blocks.size(); ++k) {
    ChartLinear L;
    L.block = (int)k;
    for (size_t s = 0; s < M.blocks[k].pairs.size(); ++s)
      L.terms.push_back({M.blocks[k].signs[s], reduce(Monomial::of(M.rho(M.blocks[k].pairs[s])))});
    c.linears.push_back(std::move(L));
  }
  return c;
}

Atlas make_base_atlas(const Model& M, const std::vector<std::vector<int>>& los) {
  Atlas A;
  A.model = &M;
  int nb = (int)M.mains.size(), nq = (int)M.quotients.size();
  auto fresh = [&](Divisor::Kind kind, Var v) {
    Divisor D;
    D.kind = kind;
    D.base = v;
    D.mplus.assign(nb + nq, 0);
    D.mminus.assign(nb + nq, 0);
    for (auto& b : M.blocks) D.ml.push_back(std::vector<int>(b.pairs.size(), 0));
    return D;
  };
  for (Var v : M.pl_vars()) {
    Divisor D = fresh(Divisor::Pl, v);
    for (int i = 0; i < nb; ++i) {
      D.mplus[i] = M.mains[i].plus.exponent(v);
      D.mminus[i] = M.mains[i].minus.exponent(v);
    }
    A.divisor_of_name[v] = (int)A.divisors.size();
    A.divisors.push_back(std::move(D));
  }
  for (size_t k = 0; k < M.blocks.size(); ++k)
    for (size_t s = 0; s < M.blocks[k].pairs.size(); ++s) {
      Var v = M.rho(M.blocks[k].pairs[s]);
      Divisor D = fresh(Divisor::Rho, v);
      for (int i = 0; i < nb; ++i) {
        D.mplus[i] = M.mains[i].plus.exponent(v);
        D.mminus[i] = M.mains[i].minus.exponent(v);
      }
      for (int i = 0; i < nq; ++i) {
        D.mplus[nb + i] = M.quotients[i].plus.exponent(v);
        D.mminus[nb + i] = M.quotients[i].minus.exponent(v);
      }
      D.ml[k][s] = 1;
      A.divisor_of_name[v] = (int)A.divisors.size();
      A.divisors.push_back(std::move(D));
    }
  for (auto& lo : los) {
    Chart c = base_chart(M, lo, A.divisor_of_name);
    c.id = (int)A.charts.size();
    c.base = c.id;
    A.active.push_back(c.id);
    A.charts.push_back(std::move(c));
  }
  return A;
}

BlowupMap blowup_map(Var c0, Var c1, int side) {
  BlowupMap t;
  t.yi = side == 0 ? c0 : c1;
  t.yj = side == 0 ? c1 : c0;
  t.zeta = exceptional_rename(t.yi);
  return t;
}

Monomial BlowupMap::apply(const Monomial& m) const {
  int ei = m.exponent(yi), ej = m.exponent(yj);
  Monomial r;
  for (auto& [v, e] : m.f)
    if (v != yi && v != yj) r.f.push_back({v, e});
  r = r * Monomial::of(zeta, ei + ej);
  if (ej) r = r * Monomial::of(yj, ej);
  return r;
}

ChartBinomial proper_transform_binomial(const ChartBinomial& b, const BlowupMap& t) {
  int lp = b.plus.exponent(t.yi) + b.plus.exponent(t.yj);
  int lm = b.minus.exponent(t.yi) + b.minus.exponent(t.yj);
  int l = std::min(lp, lm);
  ChartBinomial r;
  r.src = b.src;
  r.plus = t.apply(b.plus).divided(Monomial::of(t.zeta, l));
  r.minus = t.apply(b.minus).divided(Monomial::of(t.zeta, l));
  return r;
}

ChartLinear pullback_linear(const ChartLinear& l, const BlowupMap& t) {
  ChartLinear r;
  r.block = l.block;
  for (auto& [s, m] : l.terms) r.terms.push_back({s, t.apply(m)});
  return r;
}

Chart blow_up_chart(const Chart& c, Var c0, Var c1, int side, int new_div) {
  if (!c.has(c0) || !c.has(c1)) throw Error("center-misses-chart", "center variable absent");
  BlowupMap t = blowup_map(c0, c1, side);
  Chart r;
  r.parent = c.id;
  r.side = side;
  r.base = c.base;
  r.lambda_o = c.lambda_o;
  r.center0 = c0;
  r.center1 = c1;
  r.residuals_live = c.residuals_live;
  r.eV = c.eV;
  r.dV = c.dV;
  if (var_kind(t.yi) == kPl) r.eV.push_back(var_a(t.yi));
  if (var_kind(t.yi) == kRho) r.dV.push_back({var_a(t.yi), var_b(t.yi)});
  std::sort(r.eV.begin(), r.eV.end());
  std::sort(r.dV.begin(), r.dV.end());
  for (Var v : c.vars)
    if (v != t.yi) r.vars.push_back(v);
  r.vars.push_back(t.zeta);
  std::sort(r.vars.begin(), r.vars.end());
  if (std::adjacent_find(r.vars.begin(), r.vars.end()) != r.vars.end())
    throw Error("internal", "variable name collision in blowup");
  r.divisor = c.divisor;
  r.divisor.erase(t.yi);
  r.divisor[t.zeta] = new_div;
  for (auto& [v, d] : r.divisor) r.var_of_divisor[d] = v;
  r.to_parent[t.yi] = Monomial::of(t.zeta);
  r.to_parent[t.yj] = Monomial::of(t.zeta) * Monomial::of(t.yj);
  for (auto& b : c.mains) r.mains.push_back(proper_transform_binomial(b, t));
  for (auto& b : c.residuals) r.residuals.push_back(proper_transform_binomial(b, t));
  for (auto& b : c.quotients) r.quotients.push_back(proper_transform_binomial(b, t));
  for (auto& l : c.linears) r.linears.push_back(pullback_linear(l, t));
  return r;
}

bool chart_is_contradictory(const Chart& c) {
  for (auto& l : c.linears) {
    Polynomial f = l.poly();
    if (f.is_constant() && !f.is_zero()) return true;
  }
  return false;
}

int add_exceptional(Atlas& A, int d0, int d1, int stage, std::array<int, 4> idx, const std::string& label) {
  const Divisor& Y0 = A.divisors.at(d0);
  const Divisor& Y1 = A.divisors.at(d1);
  Divisor E;
  E.kind = Divisor::Exc;
  E.stage = stage;
  E.idx = idx;
  E.label = label;
  int nt = A.tracked_count();
  E.mplus.assign(nt, 0);
  E.mminus.assign(nt, 0);
  for (int i = 0; i < nt; ++i) {
    int a = Y0.mplus[i] + Y1.mplus[i], b = Y0.mminus[i] + Y1.mminus[i];
    int l = std::min(a, b);
    E.mplus[i] = a - l;
    E.mminus[i] = b - l;
  }
  E.ml = Y0.ml;
  for (size_t k = 0; k < E.ml.size(); ++k)
    for (size_t s = 0; s < E.ml[k].size(); ++s) E.ml[k][s] += Y1.ml[k][s];
  A.divisors.push_back(std::move(E));
  return (int)A.divisors.size() - 1;
}

std::vector<TableMismatch> check_tables(const Atlas& A, const Chart& c) {
  std::vector<TableMismatch> out;
  const Model& M = *A.model;
  int nb = (int)M.mains.size();
  for (Var v : c.vars) {
    const Divisor& D = A.divisors.at(c.divisor.at(v));
    for (int i = 0; i < A.tracked_count(); ++i) {
      const ChartBinomial& b = i < nb ? c.mains[i] : c.quotients[i - nb];
      if (b.plus.exponent(v) != D.mplus[i]) out.push_back({c.id, i, v, "plus"});
      if (b.minus.exponent(v) != D.mminus[i]) {
        // entry cleared after the first stage
        bool cleared = i < nb && D.kind == Divisor::Rho &&
                       D.base == M.rho(M.blocks[M.mains[i].k - 1].pairs[0]) && D.mminus[i] == 0 &&
                       b.minus.exponent(v) == 1;
        if (!cleared) out.push_back({c.id, i, v, "minus"});
      }
    }
    for (auto& L : c.linears)
      for (size_t s = 0; s < L.terms.size(); ++s)
        if (L.terms[s].second.exponent(v) != D.ml[L.block][s]) out.push_back({c.id, -1 - L.block, v, "linear"});
  }
  return out;
}

std::vector<int> chart_path(const Atlas& A, int id) {
  std::vector<int> p;
  for (int x = id; x >= 0; x = A.charts.at(x).parent) p.push_back(x);
  std::reverse(p.begin(), p.end());
  return p;
}

std::map<Var, Monomial> ancestor_map(const Atlas& A, int anc, int id) {
  auto path = chart_path(A, id);
  auto it = std::find(path.begin(), path.end(), anc);
  if (it == path.end()) throw Error("invalid-parameters", "not an ancestor");
  std::map<Var, Monomial> cur;
  for (Var v : A.charts.at(anc).vars) cur[v] = Monomial::of(v);
  for (++it; it != path.end(); ++it) {
    const Chart& ch = A.charts.at(*it);
    for (auto& [v, mono] : cur) {
      Monomial r;
      for (auto& [w, e] : mono.f) {
        auto t = ch.to_parent.find(w);
        Monomial part = t == ch.to_parent.end() ? Monomial::of(w) : t->second;
        for (int i = 0; i < e; ++i) r = r * part;
      }
      mono = r;
    }
  }
  return cur;
}

}  // namespace grres
