#include "grres/report.hpp"

namespace grres {

static json names(const std::vector<Var>& vs, const IndexTable& tab) {
  json a = json::array();
  for (Var v : vs) a.push_back(var_name(v, tab));
  return a;
}

static json poly_list(const std::vector<Polynomial>& ps, const IndexTable& tab) {
  json a = json::array();
  for (auto& f : ps) a.push_back(f.str(tab));
  return a;
}

json relations_json(const Model& M) {
  json j;
  j["d"] = M.d;
  j["n"] = M.n;
  j["m"] = tuple_str(M.m, M.n);
  j["upsilon"] = M.blocks.size();
  json bl = json::array();
  for (auto& b : M.blocks) {
    json x;
    x["k"] = b.k;
    x["u"] = tuple_str(b.u, M.n);
    x["relation"] = b.fbar.str(M.tab);
    x["linear"] = b.linear.str(M.tab);
    x["terms"] = b.rel.terms.size();
    x["rank"] = b.rel.rank;
    json pr = json::array();
    for (auto& p : b.pairs) pr.push_back(M.pair_str(p));
    x["pairs"] = pr;
    bl.push_back(x);
  }
  j["relations"] = bl;
  auto bins = [&](const std::vector<Binomial>& bs) {
    json a = json::array();
    for (auto& b : bs) a.push_back(b.poly().str(M.tab));
    return a;
  };
  j["main"] = bins(M.mains);
  j["residual"] = bins(M.residuals);
  j["quotient"] = bins(M.quotients);
  j["counts"] = {{"main", M.mains.size()}, {"residual", M.residuals.size()}, {"quotient", M.quotients.size()}};
  return j;
}

json chart_json(const TowerRun& R, int id, const GammaRun* G) {
  const Atlas& A = R.atlas;
  const Model& M = *R.model;
  const Chart& c = A.charts.at(id);
  json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["parent"] = c.parent;
  j["side"] = c.side;
  j["stage"] = c.stage;
  j["lambda_o"] = c.lambda_o;
  j["vars"] = names(c.vars, M.tab);
  json dv = json::object();
  for (auto& [v, d] : c.divisor) dv[var_name(v, M.tab)] = A.divisor_name(d);
  j["divisors"] = dv;
  auto bins = [&](const std::vector<ChartBinomial>& bs) {
    json a = json::array();
    for (auto& b : bs) a.push_back(b.poly().str(M.tab));
    return a;
  };
  j["main"] = bins(c.mains);
  j["residual"] = c.residuals_live ? bins(c.residuals) : json::array();
  j["quotient"] = bins(c.quotients);
  json lin = json::array();
  for (auto& l : c.linears) lin.push_back(l.poly().str(M.tab));
  j["linear"] = lin;
  if (G) {
    const GammaChart& g = G->states.at(id);
    json s;
    s["empty"] = g.empty;
    s["undecided"] = g.undecided;
    s["zero"] = names({g.zero.begin(), g.zero.end()}, M.tab);
    s["one"] = names({g.one.begin(), g.one.end()}, M.tab);
    json fs = json::array();
    for (int k : g.fstar) fs.push_back(k + 1);
    s["linear_kept"] = fs;
    s["extra"] = poly_list(g.extras, M.tab);
    s["notes"] = g.notes;
    j["gamma"] = s;
  }
  return j;
}

json tower_manifest(const TowerRun& R, const json& config) {
  const Atlas& A = R.atlas;
  json j;
  j["config"] = config;
  j["partial"] = R.partial;
  if (R.partial) j["partial_reason"] = R.partial_reason;
  j["charts_total"] = A.charts.size();
  j["charts_final"] = A.active.size();
  j["pruned"] = R.pruned;
  if (R.point_prime) j["point_prime"] = R.point_prime;
  json steps = json::array();
  for (auto& s : R.steps) {
    json x;
    x["label"] = s.label;
    x["center"] = {A.divisor_name(s.d0), A.divisor_name(s.d1)};
    x["charts_split"] = s.split.size();
    steps.push_back(x);
  }
  j["steps"] = steps;
  auto pairs = [](const std::map<std::pair<int, int>, int>& m) {
    json o = json::object();
    for (auto& [k, v] : m) o["(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")"] = v;
    return o;
  };
  auto triples = [](const std::map<std::vector<int>, int>& m) {
    json o = json::object();
    for (auto& [k, v] : m)
      o["(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ")" + std::to_string(k[2])] = v;
    return o;
  };
  j["rho"] = pairs(R.rho);
  j["kappa"] = pairs(R.kappa);
  j["sigma"] = triples(R.sigma);
  j["varsigma"] = triples(R.varsigma);
  json fin = json::array();
  for (int id : A.active) fin.push_back(A.charts[id].name);
  j["final_charts"] = fin;
  j["warnings"] = R.warnings;
  return j;
}

json gamma_json(const GammaRun& G) {
  const TowerRun& R = *G.tower;
  const Model& M = *R.model;
  json j;
  j["gamma"] = names({G.gamma.begin(), G.gamma.end()}, M.tab);
  j["expected_dim"] = G.expected_dim;
  json base = json::array();
  for (auto& c : R.atlas.charts) {
    if (c.parent >= 0) continue;
    const GammaChart& g = G.states[c.id];
    json x;
    x["chart"] = c.name;
    x["empty"] = g.empty;
    json bl = json::array();
    for (auto& b : g.blocks) {
      json y;
      y["k"] = b.k;
      y["relevant"] = b.relevant;
      y["linear_kept"] = b.in_fstar;
      y["zero"] = names(b.lam0, M.tab);
      y["one"] = names(b.lam1, M.tab);
      y["determined"] = names(b.lamdet, M.tab);
      bl.push_back(y);
    }
    x["relations"] = bl;
    base.push_back(x);
  }
  j["base"] = base;
  json leaves = json::array();
  size_t nonempty = 0;
  for (int id : G.leaves) {
    leaves.push_back(chart_json(R, id, &G));
    if (!G.states[id].empty) ++nonempty;
  }
  j["charts"] = leaves;
  j["nonempty_charts"] = nonempty;
  j["maximality_failures"] = G.audit_failures;
  json b;
  b["checked"] = G.birational_checked;
  b["agree"] = G.birational_ok;
  b["detail"] = G.birational_detail;
  j["birationality"] = b;
  return j;
}

json smoothness_json(const SmoothnessReport& S) {
  json j;
  j["verdict"] = S.verdict;
  j["expected_dim"] = S.expected_dim;
  j["points"] = S.points;
  j["failed_points"] = S.failed_points;
  j["termination_failures"] = S.termination_failures;
  j["reselected_points"] = S.reselected_points;
  json dt = json::object();
  for (auto& [d, c] : S.dim_t) dt[std::to_string(d)] = c;
  j["tangent_dimensions"] = dt;
  json ch = json::array();
  for (auto& c : S.charts) {
    json x;
    x["id"] = c.chart;
    x["name"] = c.name;
    x["p"] = c.p;
    x["empty"] = c.empty;
    x["undecided"] = c.undecided;
    x["exhaustive"] = c.exhaustive;
    x["points"] = c.points;
    x["expected_rank"] = c.expected_rank;
    x["min_rank"] = c.min_rank;
    x["reselected_points"] = c.reselected_points;
    json d = json::object();
    for (auto& [k, v] : c.dim_t) d[std::to_string(k)] = v;
    x["tangent_dimensions"] = d;
    x["failures"] = c.failures;
    ch.push_back(x);
  }
  j["charts"] = ch;
  j["notes"] = S.notes;
  return j;
}

json audit_json(const TowerAudit& T) {
  json j;
  j["charts_checked"] = T.charts_checked;
  j["square_free_failures"] = T.square_free_failures;
  j["cofactor_failures"] = T.cofactor_failures;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace grres
