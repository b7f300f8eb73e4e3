#include "grres/plucker_model.hpp"

#include <algorithm>
#include <set>

namespace grres {

namespace {

void push_term(PluckerRelation& r, int sign, const Tuple& a, const Tuple& b) {
  auto na = normalize_index(a), nb = normalize_index(b);
  if (na.zero || nb.zero) return;
  PTerm t;
  t.sign = sign * na.sign * nb.sign;
  t.u = na.t;
  t.v = nb.t;
  if (compare_lex(t.u, t.v) > 0) std::swap(t.u, t.v);
  r.terms.push_back(std::move(t));
}

void finish(PluckerRelation& r) {
  r.zero = r.terms.empty();
  r.tF = (int)r.terms.size() - 1;
  r.rank = r.tF - 2;
}

}  // namespace

PluckerRelation plucker_relation(const Tuple& h, const Tuple& k, int n) {
  if (h.size() + 2 != k.size()) throw Error("invalid-parameters", "need |h| = d-1 and |k| = d+1");
  for (int x : h)
    if (x < 1 || x > n) throw Error("invalid-parameters", "entry out of range");
  for (int x : k)
    if (x < 1 || x > n) throw Error("invalid-parameters", "entry out of range");
  PluckerRelation r;
  r.h = h;
  r.k = k;
  for (size_t l = 0; l < k.size(); ++l) {
    Tuple a = h;
    a.push_back(k[l]);
    Tuple b;
    for (size_t j = 0; j < k.size(); ++j)
      if (j != l) b.push_back(k[j]);
    push_term(r, (l % 2) ? -1 : 1, a, b);
  }
  finish(r);
  return r;
}

PluckerRelation primary_relation(const Tuple& m, const Tuple& u, int n) {
  if (!is_primary_index(u, m)) throw Error("not-primary", "u is not in the primary index set of m");
  int u0 = set_minus(u, m)[0];
  Tuple ur;
  for (int x : u)
    if (x != u0) ur.push_back(x);
  PluckerRelation r;
  r.h = ur;
  r.k = set_union(m, Tuple{u0});
  Tuple lead = ur;
  lead.push_back(u0);
  push_term(r, 1, m, lead);
  r.lead = 0;
  r.uF = u;
  for (size_t i = 0; i < m.size(); ++i) {
    Tuple a = ur;
    a.push_back(m[i]);
    Tuple b{u0};
    for (size_t j = 0; j < m.size(); ++j)
      if (j != i) b.push_back(m[j]);
    push_term(r, ((i + 1) % 2) ? -1 : 1, a, b);
  }
  for (int x : u)
    if (x < 1 || x > n) throw Error("invalid-parameters", "entry out of range");
  std::sort(r.terms.begin() + 1, r.terms.end(), [](const PTerm& a, const PTerm& b) {
    int c = compare_lex(a.u, b.u);
    return c ? c < 0 : compare_lex(a.v, b.v) < 0;
  });
  if (r.terms[0].sign < 0)
    for (auto& t : r.terms) t.sign = -t.sign;
  finish(r);
  return r;
}

Polynomial homogeneous_poly(const PluckerRelation& r, const IndexTable& tab) {
  Polynomial f;
  for (auto& t : r.terms)
    f.add_term(Monomial::of(make_var(kPl, tab.id(t.u))) * Monomial::of(make_var(kPl, tab.id(t.v))), t.sign);
  return f;
}

Polynomial dehomogenize(const PluckerRelation& r, const Tuple& m, const IndexTable& tab) {
  if (r.lead < 0) throw Error("not-primary", "relation has no leading term");
  Polynomial f;
  for (auto& t : r.terms) {
    Monomial mo;
    if (t.u != m) mo = mo * Monomial::of(make_var(kPl, tab.id(t.u)));
    if (t.v != m) mo = mo * Monomial::of(make_var(kPl, tab.id(t.v)));
    f.add_term(mo, t.sign);
  }
  return f;
}

Polynomial Binomial::poly() const {
  Polynomial f;
  f.add_term(plus, 1);
  f.add_term(minus, -1);
  return f;
}

int Model::main_index(int k, int tau) const {
  for (size_t i = 0; i < mains.size(); ++i)
    if (mains[i].k == k && mains[i].tau == tau) return (int)i;
  throw Error("invalid-parameters", "no such main binomial");
}

std::vector<Var> Model::pl_vars() const {
  std::vector<Var> v;
  for (size_t i = 0; i < tab.tuples.size(); ++i)
    if ((int)i != mid) v.push_back(pl((int)i));
  return v;
}

std::vector<PluckerRelation> primary_family(int d, int n, const Tuple& m) {
  validate_chart_index(m, d, n);
  std::vector<Tuple> us;
  for (auto& u : enumerate_index_set(d, n))
    if (is_primary_index(u, m)) us.push_back(u);
  std::sort(us.begin(), us.end(), [&](const Tuple& a, const Tuple& b) { return compare_wp(a, b, m) < 0; });
  std::vector<PluckerRelation> out;
  for (auto& u : us) out.push_back(primary_relation(m, u, n));
  return out;
}

Monomial rho_image(const Model& M, const Monomial& mono) {
  Monomial r;
  for (auto& [v, e] : mono.f) {
    if (var_kind(v) != kRho) throw Error("invalid-parameters", "rho_image expects rho variables");
    for (int id : {var_a(v), var_b(v)})
      if (id != M.mid) r = r * Monomial::of(M.pl(id), e);
  }
  return r;
}

std::vector<Binomial> quotient_binomials(const Model& M, int bound) {
  std::vector<Binomial> out;
  int U = (int)M.blocks.size();
  // block subsets of size 2..bound, in lex order
  std::vector<std::vector<int>> subsets;
  for (int sz = 2; sz <= std::min(bound, U); ++sz) {
    std::vector<int> c(sz);
    for (int i = 0; i < sz; ++i) c[i] = i;
    while (true) {
      subsets.push_back(c);
      int i = sz - 1;
      while (i >= 0 && c[i] == U - sz + i) --i;
      if (i < 0) break;
      ++c[i];
      for (int j = i + 1; j < sz; ++j) c[j] = c[j - 1] + 1;
    }
  }
  for (auto& S : subsets) {
    std::map<Monomial, std::vector<Monomial>> groups;
    std::vector<int> pick(S.size(), 0);
    while (true) {
      Monomial mo;
      for (size_t i = 0; i < S.size(); ++i) mo = mo * Monomial::of(M.rho(S[i], pick[i]));
      Monomial img = rho_image(M, mo);
      bool sqfree = true;
      for (auto& [v, e] : img.f)
        if (e > 1) sqfree = false;
      if (sqfree) groups[img].push_back(mo);
      size_t i = 0;
      while (i < S.size() && ++pick[i] == (int)M.blocks[S[i]].pairs.size()) pick[i++] = 0;
      if (i == S.size()) break;
    }
    for (auto& [img, monos] : groups) {
      std::sort(monos.begin(), monos.end());
      for (size_t a = 0; a < monos.size(); ++a)
        for (size_t b = a + 1; b < monos.size(); ++b) {
          if (!monos[a].coprime(monos[b])) continue;
          if (!(rho_image(M, monos[a]) == rho_image(M, monos[b]))) continue;
          Binomial q;
          q.tag = Binomial::Quotient;
          q.plus = monos[a];
          q.minus = monos[b];
          out.push_back(q);
        }
    }
  }
  return out;
}

Model build_model(int d, int n, const Tuple& m, int bound) {
  Model M;
  M.d = d;
  M.n = n;
  M.m = m;
  M.tab = IndexTable(d, n);
  M.mid = M.tab.id(m);
  M.rho_bound = bound;
  auto fam = primary_family(d, n, m);
  for (size_t i = 0; i < fam.size(); ++i) {
    Block b;
    b.k = (int)i + 1;
    b.u = fam[i].uF;
    b.rel = fam[i];
    for (auto& t : b.rel.terms) {
      int a = M.tab.id(t.u), c = M.tab.id(t.v);
      b.pairs.push_back({std::min(a, c), std::max(a, c)});
      b.signs.push_back(t.sign);
    }
    b.fbar = dehomogenize(b.rel, m, M.tab);
    for (size_t s = 0; s < b.pairs.size(); ++s) b.linear.add_term(Monomial::of(M.rho(b.pairs[s])), b.signs[s]);
    M.blocks.push_back(std::move(b));
  }
  std::set<Pair> seen;
  for (auto& b : M.blocks)
    for (auto& pr : b.pairs)
      if (!seen.insert(pr).second) throw Error("internal", "rho pair shared by two relations");
  for (auto& b : M.blocks) {
    Var uk = M.pl(b.u);
    Var lead = M.rho(b.pairs[0]);
    auto xs = [&](int s) { return Monomial::of(M.pl(b.pairs[s].first)) * Monomial::of(M.pl(b.pairs[s].second)); };
    for (int s = 1; s < (int)b.pairs.size(); ++s) {
      Binomial B;
      B.tag = Binomial::Main;
      B.k = b.k;
      B.tau = s;
      B.plus = Monomial::of(M.rho(b.pairs[s])) * Monomial::of(uk);
      B.minus = Monomial::of(lead) * xs(s);
      M.mains.push_back(B);
    }
    for (int s = 1; s < (int)b.pairs.size(); ++s)
      for (int t = s + 1; t < (int)b.pairs.size(); ++t) {
        Binomial B;
        B.tag = Binomial::Residual;
        B.k = b.k;
        B.tau = s;
        B.t = t;
        B.plus = Monomial::of(M.rho(b.pairs[s])) * xs(t);
        B.minus = Monomial::of(M.rho(b.pairs[t])) * xs(s);
        M.residuals.push_back(B);
      }
  }
  if (bound >= 2) M.quotients = quotient_binomials(M, bound);
  return M;
}

std::map<Var, Polynomial> express_in_basic(const Model& M) {
  std::map<Var, Polynomial> expr;
  for (auto& b : M.blocks) {
    Var uk = M.pl(b.u);
    mpq_class lc = b.fbar.derivative(uk).constant_term();
    Polynomial rest = b.fbar - Polynomial::mono(Monomial::of(uk), lc);
    Polynomial e = rest.scaled(-1 / lc);
    // rewrite until only basic variables remain
    for (int guard = 0; guard < (int)M.blocks.size() + 1; ++guard) {
      bool any = false;
      for (Var v : e.variables())
        if (expr.count(v)) any = true;
      if (!any) break;
      e = e.substitute(expr);
    }
    for (Var v : e.variables())
      if (!is_basic_index(M.tab.at(var_a(v)), M.m))
        throw Error("not-generated", "leading variable not expressible through lower ranks");
    expr[uk] = e;
  }
  return expr;
}

}  // namespace grres
