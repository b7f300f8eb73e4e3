#pragma once
#include <map>
#include <set>
#include <string>
#include <vector>

#include "grres/blowup_tower.hpp"

namespace grres {

// Rank function of a matroid on [n]; subsets are sorted 1-based tuples.
struct Matroid {
  int d = 0, n = 0;
  std::map<Tuple, int> rank;  // every subset of [n]
  int r(const Tuple& I) const { return rank.at(I); }
};

// rank[I] = dim of the point's d-space meeting the coordinate span of I; a vertex e_u is in the
// polytope iff |u ∩ I| >= rank[I] for all I. Unlisted subsets default to max(0, |I| - (n - d)).
// Throws invalid-parameters when the function is not a valid matroid datum.
Matroid make_matroid(int d, int n, const std::map<Tuple, int>& listed);
// {"d":..,"n":..,"dI":{"[1,2]":2,...}}
Matroid matroid_from_json(const std::string& text);
void validate_matroid(const Matroid& M);
bool in_matroid_polytope(const Matroid& M, const Tuple& vertex);
// Index tuples whose vertex lies outside the matroid polytope; m must lie inside.
std::vector<Tuple> gamma_from_matroid(const Matroid& M, const Tuple& m);

// "34,13" is a list of tuples; "3,4" with d single entries is one tuple.
std::vector<Tuple> parse_gamma(const std::string& s, int d, int n);
std::set<Var> gamma_vars(const Model& M, const std::vector<Tuple>& gamma);

// Relevant iff some term of the de-homogenized relation avoids the set.
bool gamma_relevant(const Block& b, const std::set<Var>& gamma);

struct GammaOptions {
  std::vector<long> primes{3, 5, 7};
  PointSearchOptions search{};
};

// Max over F_p points of the variety of the rank of the coefficient matrix of `lin` in `cols`.
// Returns -1 when no point is found on any prime.
int generic_rank(const std::vector<Polynomial>& lin, const std::vector<Var>& cols,
                 const std::vector<Polynomial>& variety, const std::vector<Var>& vvars, const GammaOptions& opt,
                 long* witnesses = nullptr);

struct BlockRecord {
  int k = 0;  // 1-based
  bool relevant = true;
  bool in_fstar = true;
  std::vector<Var> lam0, lam1, lamdet;
};

struct GammaChart {
  int chart = -1;
  bool empty = false;
  bool undecided = false;
  std::set<Var> zero, one;
  std::vector<int> fstar;  // 0-based block indices whose linear relation survives
  std::vector<Polynomial> extras;
  std::vector<std::string> notes;
  std::vector<BlockRecord> blocks;  // base charts only
};

struct GammaRun {
  const TowerRun* tower = nullptr;
  std::set<Var> gamma;
  std::vector<GammaChart> states;  // indexed by chart id
  std::vector<int> leaves;
  std::vector<std::string> audit_failures;
  bool birational_checked = false;
  bool birational_ok = true;
  std::vector<std::string> birational_detail;
  // Dimension of the input scheme at a generic point (free coordinates minus generic Jacobian rank).
  int expected_dim = -1;
};

// Defining system of the transform on a chart, pins excluded.
std::vector<Polynomial> gamma_equations(const Chart& c, const GammaChart& g);
std::map<Var, u64> gamma_pins(const GammaChart& g);
PointSet gamma_points(const Chart& c, const GammaChart& g, long p, const PointSearchOptions& so);

GammaRun run_gamma_pipeline(const TowerRun& R, const std::set<Var>& gamma, const GammaOptions& opt);

}  // namespace grres
