#pragma once
#include <map>
#include <string>
#include <vector>

#include "grres/gamma.hpp"

namespace grres {

struct VerifyOptions {
  std::vector<long> primes{3, 5};
  PointSearchOptions search{};
  bool reselect = true;  // re-choose a terminating column when the chart-level choice leaves a block singular
};

// Per block at one point.
struct BlockClass {
  int k = 0;  // 1-based
  char kase = 'a';  // 'a', 'b', 'g'
  std::vector<int> original, intrinsic;  // main binomial indices
  std::map<int, Var> terminating;        // intrinsic binomial -> chart variable
  std::map<int, int> terminated_at;      // intrinsic binomial -> path position
  std::vector<int> reselected;           // intrinsic binomials whose column was re-chosen
  std::vector<int> row_eqs;              // -1 - k for the linear relation, else main index
  std::vector<Var> cols;
};

struct PointCheck {
  bool ok = true;
  int rows = 0, cols = 0, rank = 0, full_rank = 0, dim_t = 0;
  int reselected = 0;
  std::vector<BlockClass> blocks;
  std::vector<std::string> failures;
};

struct ChartReport {
  int chart = -1;
  std::string name;
  long p = 0;
  bool empty = false, undecided = false, exhaustive = true;
  size_t points = 0;
  int expected_rank = -1;
  int min_rank = -1;
  size_t reselected_points = 0;
  std::map<int, size_t> dim_t;  // dim T_z -> count
  size_t termination_failures = 0;
  std::vector<std::string> failures;
};

struct SmoothnessReport {
  std::string verdict;  // PASS, FAIL, PARTIAL
  int expected_dim = -1;
  std::vector<ChartReport> charts;
  size_t points = 0, failed_points = 0, termination_failures = 0;
  size_t reselected_points = 0;  // points where a terminating column had to be re-chosen
  std::map<int, size_t> dim_t;
  std::vector<std::string> notes;
};

// Precomputed path data of one final chart.
struct ChartPath {
  std::vector<int> ids;  // base .. chart
};
ChartPath chart_path_data(const Atlas& A, int id);

// Values of every chart on the path at the image of z (index i matches ids[i]).
std::vector<std::vector<u64>> path_values(const Atlas& A, const ChartPath& P, const std::vector<u64>& z, u64 p);

PointCheck check_point(const TowerRun& R, const GammaRun& G, int chart, const std::vector<u64>& z, u64 p,
                       bool reselect = true);

// Every main binomial has a nonzero term at z.
bool terminates_at(const Chart& c, const std::vector<u64>& z, u64 p, std::vector<int>* failing = nullptr);

SmoothnessReport certify(const TowerRun& R, const GammaRun& G, const VerifyOptions& opt);

// Structural tower invariants.
struct TowerAudit {
  size_t charts_checked = 0;
  std::vector<std::string> square_free_failures;
  std::vector<std::string> cofactor_failures;
};
TowerAudit audit_tower(const TowerRun& R);

}  // namespace grres
