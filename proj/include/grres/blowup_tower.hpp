#pragma once
#include <map>
#include <string>
#include <vector>

#include "grres/chart_atlas.hpp"
#include "grres/points.hpp"

namespace grres {

struct TowerOptions {
  std::string lambda_o = "all";
  // nonempty: blow up whenever the center meets a chart;
  // empty / exact-budget:N: additionally require an F_p point of the transform on the center.
  std::string gate = "nonempty";
  std::vector<long> primes{3, 5, 7};
  bool prune = true;
  size_t max_charts = 200000;
  int round_cap = 64;
  bool run_wp = true;
  bool run_eth = true;
  // 0: every chart meeting a center is split. p > 0: a chart is split only when one of its
  // F_p points lies on the center; the resulting atlas covers all F_p points of the transform.
  long point_prime = 0;  // must be below 65536
  PointSearchOptions search{};
};

struct Step {
  std::string label;
  int stage = 0;  // 0 theta, 1 wp, 2 eth
  int k = 0, tau = 0, mu = 0, h = 0;
  int d0 = -1, d1 = -1, exc = -1;
  std::vector<int> split;  // charts blown up
};

struct TowerRun {
  const Model* model = nullptr;
  Atlas atlas;
  std::vector<Step> steps;
  std::map<std::pair<int, int>, int> rho, kappa;  // rounds per (k, tau)
  std::map<std::vector<int>, int> sigma, varsigma;  // sets per (k, tau, mu)
  std::vector<std::string> warnings;
  bool partial = false;
  std::string partial_reason;
  int pruned = 0;
  std::vector<int> theta_leaves, wp_leaves;  // leaves after each stage
  // Point-driven mode: F_p points of the transform owned by each active chart.
  long point_prime = 0;
  std::map<int, PointBlock> points;
};

// <_flat on divisors: exceptional < rho < pl.
int compare_flat(const Atlas& A, int a, int b);

// Candidate center pairs for main binomial (k, tau) at the current state; stage 1 = wp, 2 = eth.
std::vector<std::pair<int, int>> center_candidates(const Atlas& A, int k, int tau, int stage);
// Gate check for a center pair against the active charts.
bool gate_passes(const TowerRun& R, int d0, int d1, const TowerOptions& opt);

TowerRun run_full_tower(const Model& M, const TowerOptions& opt);

// Applies one blowup along (d0, d1) to all active charts meeting it; returns split chart ids.
std::vector<int> apply_blowup(TowerRun& R, int d0, int d1, Step step, const TowerOptions& opt);

}  // namespace grres
