#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "grres/plucker_model.hpp"

namespace grres {

struct Divisor {
  enum Kind { Pl = 0, Rho = 1, Exc = 2 };
  Kind kind = Pl;
  Var base = 0;             // x-name for Pl / Rho divisors
  int stage = -1;           // exceptional: 0 theta, 1 wp, 2 eth
  std::array<int, 4> idx{};  // exceptional: (k, tau, mu, h)
  std::string label;
  // Tracked binomials are the mains followed by the quotients.
  std::vector<int> mplus, mminus;
  std::vector<std::vector<int>> ml;  // per block, per term of L
};

struct ChartBinomial {
  Monomial plus, minus;
  int src = -1;  // index into the model's list of the same kind
  Polynomial poly() const;
};

struct ChartLinear {
  int block = -1;
  std::vector<std::pair<int, Monomial>> terms;  // (sign, monomial), one per term of S_F
  Polynomial poly() const;
};

struct Chart {
  int id = -1, parent = -1, side = -1, step = -1, base = -1;
  std::string name, stage;
  std::vector<int> lambda_o;  // chosen term s_{F,o} per block
  std::vector<Var> vars;      // sorted
  std::map<Var, int> divisor;
  std::map<int, Var> var_of_divisor;
  std::vector<ChartBinomial> mains, residuals, quotients;
  std::vector<ChartLinear> linears;
  bool residuals_live = true;
  std::vector<int> eV;    // tuple ids
  std::vector<Pair> dV;
  Var center0 = 0, center1 = 0;    // parent variables blown up
  std::map<Var, Monomial> to_parent;  // parent variable -> monomial in this chart (changed ones only)

  bool has(Var v) const { return std::binary_search(vars.begin(), vars.end(), v); }
  int var_count() const { return (int)vars.size(); }
  // All defining equations: mains, residuals when live, quotients, linears.
  std::vector<Polynomial> system(bool with_residuals = true) const;
};

struct Atlas {
  const Model* model = nullptr;
  std::vector<Divisor> divisors;
  std::map<Var, int> divisor_of_name;  // base divisors by x-name
  std::vector<Chart> charts;           // every node, creation order
  std::vector<int> active;             // current leaves

  int tracked_count() const { return (int)(model->mains.size() + model->quotients.size()); }
  std::string divisor_name(int d) const;
};

// Lambda^o policies.
std::vector<std::vector<int>> lambda_o_choices(const Model& M, const std::string& policy);

Atlas make_base_atlas(const Model& M, const std::vector<std::vector<int>>& lambda_os);
Chart base_chart(const Model& M, const std::vector<int>& lambda_o, const std::map<Var, int>& divisor_of_name);

// Binomial on a chart after the blowup substitution y_i -> z, y_j -> z*y_j, divided by z^l.
struct BlowupMap {
  Var yi, yj, zeta;  // parent names; zeta is the child name of the exceptional parameter
  Monomial apply(const Monomial& m) const;
};
BlowupMap blowup_map(Var c0, Var c1, int side);
ChartBinomial proper_transform_binomial(const ChartBinomial& b, const BlowupMap& t);
ChartLinear pullback_linear(const ChartLinear& l, const BlowupMap& t);

// Child chart of `c` on the given side; `new_div` is the exceptional divisor.
Chart blow_up_chart(const Chart& c, Var c0, Var c1, int side, int new_div);
// True if some equation became a nonzero constant.
bool chart_is_contradictory(const Chart& c);

// Adds the exceptional divisor of blowing up (d0, d1) and returns its index.
int add_exceptional(Atlas& A, int d0, int d1, int stage, std::array<int, 4> idx, const std::string& label);

// Exponent of chart variables must match the divisor tables (skip list for cleared entries).
struct TableMismatch {
  int chart, binomial;
  Var var;
  std::string what;
};
std::vector<TableMismatch> check_tables(const Atlas& A, const Chart& c);

// Chain of chart ids from the base chart to `id`.
std::vector<int> chart_path(const Atlas& A, int id);
// Monomial expression of every variable of ancestor `anc` in the variables of chart `id`.
std::map<Var, Monomial> ancestor_map(const Atlas& A, int anc, int id);

}  // namespace grres
