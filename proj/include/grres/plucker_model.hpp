#pragma once
#include <utility>
#include <vector>

#include "grres/indices.hpp"
#include "grres/polynomial.hpp"

namespace grres {

struct PTerm {
  int sign = 1;
  Tuple u, v;  // u <lex v
};

struct PluckerRelation {
  Tuple h, k;
  std::vector<PTerm> terms;
  int lead = -1;  // index of the term p_m p_{u_F} when primary
  Tuple uF;
  int tF = 0;    // terms.size() - 1
  int rank = 0;  // tF - 2
  bool zero = false;
};

PluckerRelation plucker_relation(const Tuple& h, const Tuple& k, int n);
PluckerRelation primary_relation(const Tuple& m, const Tuple& u, int n);
// Sum of sign * p_u * p_v with p_w = x[w] for every w (m included).
Polynomial homogeneous_poly(const PluckerRelation& r, const IndexTable& tab);
Polynomial dehomogenize(const PluckerRelation& r, const Tuple& m, const IndexTable& tab);

using Pair = std::pair<int, int>;  // tuple ids, first < second

struct Block {
  int k = 0;  // 1-based position in the family
  Tuple u;    // leading index u_F
  PluckerRelation rel;
  std::vector<Pair> pairs;  // [0] is (m, u_F); the rest sorted lex
  std::vector<int> signs;
  Polynomial fbar;
  Polynomial linear;
};

struct Binomial {
  enum Tag { Main, Residual, Quotient };
  Monomial plus, minus;
  Tag tag = Main;
  int k = 0, tau = 0, t = 0;  // main: (k, tau); residual: (k, tau < t)
  Polynomial poly() const;
};

struct Model {
  int d = 0, n = 0;
  Tuple m;
  int mid = -1;
  IndexTable tab;
  int rho_bound = 3;
  std::vector<Block> blocks;
  std::vector<Binomial> mains, residuals, quotients;

  Var pl(int id) const { return make_var(kPl, id); }
  Var pl(const Tuple& t) const { return make_var(kPl, tab.id(t)); }
  Var rho(const Pair& p) const { return make_var(kRho, p.first, p.second); }
  Var rho(int k, int s) const { return rho(blocks.at(k).pairs.at(s)); }
  // Main binomial index of (k, tau), both 1-based.
  int main_index(int k, int tau) const;
  // Plücker variables of the chart U_m (everything but m).
  std::vector<Var> pl_vars() const;
  std::string pair_str(const Pair& p) const { return "(" + tab.str(p.first) + "," + tab.str(p.second) + ")"; }
};

std::vector<PluckerRelation> primary_family(int d, int n, const Tuple& m);
Model build_model(int d, int n, const Tuple& m, int rho_degree_bound = 3);

// Image of a rho-monomial under x_(u,v) -> x_u x_v, x_m -> 1.
Monomial rho_image(const Model& M, const Monomial& mono);
std::vector<Binomial> quotient_binomials(const Model& M, int rho_degree_bound);

// x_{u_F} for every block rewritten through basic variables.
std::map<Var, Polynomial> express_in_basic(const Model& M);

}  // namespace grres
