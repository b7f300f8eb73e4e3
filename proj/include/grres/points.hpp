#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "grres/fp.hpp"

namespace grres {

struct PointSearchOptions {
  int exhaustive_threshold = 14;  // free variables
  long sample_budget = 100000;    // random dives when not exhaustive
  uint64_t seed = 1;
  size_t max_points = SIZE_MAX;
};

struct PointSet {
  u64 p = 0;
  std::vector<Var> vars;
  std::vector<std::vector<u64>> pts;
  bool exhaustive = true;
  bool truncated = false;
};

// Compact row-major store for many points over a small prime.
struct PointBlock {
  size_t width = 0;
  std::vector<uint16_t> data;
  size_t size() const { return width ? data.size() / width : 0; }
  bool empty() const { return data.empty(); }
  u64 at(size_t i, size_t j) const { return data[i * width + j]; }
  std::vector<u64> row(size_t i) const { return {data.begin() + i * width, data.begin() + (i + 1) * width}; }
  void push(const std::vector<u64>& z) { data.insert(data.end(), z.begin(), z.end()); }
};

// F_p points of {eqs = 0} in `vars`, with `fixed` assignments imposed.
PointSet enumerate_points(const std::vector<Polynomial>& eqs, const std::vector<Var>& vars, u64 p,
                          const std::map<Var, u64>& fixed = {}, const PointSearchOptions& opt = {});

}  // namespace grres
