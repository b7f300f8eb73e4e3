// grres: relations, tower, gamma and verify front end.
#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "grres/report.hpp"

namespace fs = std::filesystem;
using namespace grres;

namespace {

struct Config {
  int d = 0, n = 0;
  std::string m;
  std::string lambda_o = "all";
  std::string primes = "3,5,7";
  std::string gate = "nonempty";
  size_t max_charts = 200000;
  long point_prime = 0;
  bool no_prune = false;
  bool strict_terminating = false;
  std::string stop_after = "eth";
  std::string gamma, matroid;
  std::string verify_primes = "3,5";
  int exhaustive_threshold = 14;
  long sample_budget = 100000;
  uint64_t seed = 1;
  std::string out, report;
};

std::vector<long> parse_primes(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string t;
  while (std::getline(ss, t, ',')) {
    if (t.empty()) continue;
    long p = 0;
    try {
      p = std::stol(t);
    } catch (const std::exception&) {
      throw Error("invalid-parameters", "bad prime " + t);
    }
    if (!is_prime(p)) throw Error("invalid-parameters", t + " is not prime");
    out.push_back(p);
  }
  if (out.empty()) throw Error("invalid-parameters", "empty prime list");
  return out;
}

std::string hex64(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

// FNV-1a over the serialized config.
std::string config_hash(const json& j) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return hex64(h);
}

void write_file(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("invalid-parameters", "cannot write " + p.string());
  f << s;
}

std::string read_file(const std::string& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw Error("invalid-parameters", "cannot read " + p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void add_model_flags(CLI::App* a, Config& c) {
  a->add_option("--d", c.d, "Grassmannian rank d")->required();
  a->add_option("--n", c.n, "ambient dimension n")->required();
  a->add_option("--m", c.m, "chart index, e.g. 1,2")->required();
}

void add_tower_flags(CLI::App* a, Config& c, bool certifying = false) {
  a->add_option("--lambda-o", c.lambda_o, "all | first | explicit:<i,j,..;...>");
  if (certifying) {
    a->add_option("--primes", c.verify_primes, "primes for certification");
    a->add_option("--oracle-primes", c.primes, "primes for the point gate and point oracles");
    a->add_flag("--strict-terminating", c.strict_terminating,
                "never re-choose a terminating column, even when the block is singular");
  } else {
    a->add_option("--primes", c.primes, "primes for the point gate and point oracles");
  }
  a->add_option("--gate", c.gate, "nonempty | empty | exact-budget:<N>");
  a->add_option("--max-charts", c.max_charts, "chart budget");
  a->add_option("--point-prime", c.point_prime,
                "split only charts with an F_p point on the center (0 = full atlas)");
  a->add_flag("--no-prune", c.no_prune, "keep contradictory charts");
  a->add_option("--stop-after", c.stop_after, "theta | wp | eth");
  a->add_option("--exhaustive-threshold", c.exhaustive_threshold, "free variables enumerated exhaustively");
  a->add_option("--sample-budget", c.sample_budget, "random dives when not exhaustive");
  a->add_option("--seed", c.seed, "sampling seed");
}

void add_gamma_flags(CLI::App* a, Config& c) {
  a->add_option("--gamma", c.gamma, "comma list of index tuples, e.g. 34,13");
  a->add_option("--matroid", c.matroid, "matroid JSON file");
}

json config_json(const Config& c, const std::string& cmd) {
  json j;
  j["command"] = cmd;
  j["d"] = c.d;
  j["n"] = c.n;
  j["m"] = c.m;
  if (cmd != "relations") {
    j["lambda_o"] = c.lambda_o;
    j["primes"] = c.primes;
    j["gate"] = c.gate;
    j["max_charts"] = c.max_charts;
    j["point_prime"] = c.point_prime;
    j["prune"] = !c.no_prune;
    j["stop_after"] = c.stop_after;
    j["exhaustive_threshold"] = c.exhaustive_threshold;
    if (cmd == "verify") j["strict_terminating"] = c.strict_terminating;
    j["sample_budget"] = c.sample_budget;
    j["seed"] = c.seed;
  }
  if (cmd == "gamma" || cmd == "verify") {
    j["gamma"] = c.gamma;
    j["matroid"] = c.matroid;
  }
  if (cmd == "verify") {
    j["primes"] = c.verify_primes;
    j["oracle_primes"] = c.primes;
  }
  return j;
}

Model make_model(const Config& c) {
  validate_dn(c.d, c.n);
  Tuple m = parse_entries(c.m);
  validate_chart_index(m, c.d, c.n);
  return build_model(c.d, c.n, m);
}

TowerOptions tower_options(const Config& c) {
  TowerOptions o;
  o.lambda_o = c.lambda_o;
  o.primes = parse_primes(c.primes);
  o.gate = c.gate;
  o.max_charts = c.max_charts;
  o.prune = !c.no_prune;
  o.point_prime = c.point_prime;
  if (c.point_prime && !is_prime(c.point_prime)) throw Error("invalid-parameters", "point prime must be prime");
  if (c.stop_after != "theta" && c.stop_after != "wp" && c.stop_after != "eth")
    throw Error("invalid-parameters", "stop-after must be theta, wp or eth");
  o.run_wp = c.stop_after != "theta";
  o.run_eth = c.stop_after == "eth";
  o.search.exhaustive_threshold = c.exhaustive_threshold;
  o.search.sample_budget = c.sample_budget;
  o.search.seed = c.seed;
  return o;
}

std::set<Var> gamma_from_config(const Config& c, const Model& M) {
  if (!c.gamma.empty() && !c.matroid.empty()) throw Error("invalid-parameters", "give --gamma or --matroid, not both");
  std::vector<Tuple> g;
  if (!c.matroid.empty()) {
    Matroid mat = matroid_from_json(read_file(c.matroid));
    if (mat.d != c.d || mat.n != c.n) throw Error("incompatible-fields", "matroid rank/size differ from --d/--n");
    g = gamma_from_matroid(mat, M.m);
  } else {
    g = parse_gamma(c.gamma, c.d, c.n);
  }
  return gamma_vars(M, g);
}

fs::path out_dir(const Config& c) {
  if (!c.out.empty()) return c.out;
  if (const char* e = std::getenv("GRRES_OUT")) return e;
  return {};
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int cmd_relations(const Config& c) {
  Model M = make_model(c);
  json j = relations_json(M);
  j["config"] = config_json(c, "relations");
  fs::path dir = out_dir(c);
  if (!dir.empty()) write_file(dir / "relations.json", dump(j));
  std::cout << "Gr(" << c.d << "," << c.n << ") m=" << tuple_str(M.m, c.n) << ": " << M.blocks.size()
            << " primary relations\n";
  for (auto& b : M.blocks) std::cout << "  F" << b.k << " u=" << tuple_str(b.u, c.n) << "  " << b.fbar.str(M.tab) << "\n";
  std::cout << "main " << M.mains.size() << ", residual " << M.residuals.size() << ", quotient " << M.quotients.size()
            << "\n";
  return 0;
}

void write_tower(const TowerRun& R, const json& cfg, const fs::path& dir, const GammaRun* G) {
  json man = tower_manifest(R, cfg);
  man["config_hash"] = config_hash(cfg);
  write_file(dir / "manifest.json", dump(man));
  for (int id : R.atlas.active) write_file(dir / "charts" / (std::to_string(id) + ".json"), dump(chart_json(R, id, G)));
}

int cmd_tower(const Config& c) {
  auto t0 = Clock::now();
  Model M = make_model(c);
  TowerRun R = run_full_tower(M, tower_options(c));
  json cfg = config_json(c, "tower");
  fs::path dir = out_dir(c);
  if (!dir.empty()) {
    write_tower(R, cfg, dir, nullptr);
    write_file(dir / "timings.json", dump(json{{"seconds", seconds_since(t0)}}));
  }
  std::cout << "steps " << R.steps.size() << ", charts " << R.atlas.charts.size() << ", final " << R.atlas.active.size()
            << (R.partial ? ", PARTIAL (" + R.partial_reason + ")" : "") << "\n";
  for (auto& [k, v] : R.rho) std::cout << "  rho(" << k.first << "," << k.second << ") = " << v << "\n";
  for (auto& [k, v] : R.kappa) std::cout << "  kappa(" << k.first << "," << k.second << ") = " << v << "\n";
  return R.partial ? 3 : 0;
}

int cmd_gamma(const Config& c) {
  auto t0 = Clock::now();
  Model M = make_model(c);
  std::set<Var> g = gamma_from_config(c, M);
  TowerRun R = run_full_tower(M, tower_options(c));
  GammaOptions go;
  go.primes = parse_primes(c.primes);
  GammaRun G = run_gamma_pipeline(R, g, go);
  json cfg = config_json(c, "gamma");
  fs::path dir = out_dir(c);
  if (!dir.empty()) {
    write_tower(R, cfg, dir, &G);
    json gj = gamma_json(G);
    gj["config_hash"] = config_hash(cfg);
    write_file(dir / "gamma.json", dump(gj));
    write_file(dir / "timings.json", dump(json{{"seconds", seconds_since(t0)}}));
  }
  size_t nonempty = 0, undecided = 0;
  for (int id : G.leaves) {
    nonempty += !G.states[id].empty;
    undecided += G.states[id].undecided;
  }
  std::cout << "gamma {";
  bool first = true;
  for (Var v : g) {
    std::cout << (first ? "" : ", ") << var_name(v, M.tab);
    first = false;
  }
  std::cout << "}: " << nonempty << " nonempty of " << G.leaves.size() << " final charts, " << undecided
            << " undecided, " << G.audit_failures.size() << " maximality failures\n";
  for (auto& s : G.birational_detail) std::cout << "  birationality " << s << "\n";
  return R.partial || undecided ? 3 : 0;
}

int cmd_verify(const Config& c) {
  auto t0 = Clock::now();
  Model M = make_model(c);
  std::set<Var> g = gamma_from_config(c, M);
  TowerOptions to = tower_options(c);
  TowerRun R = run_full_tower(M, to);
  GammaOptions go;
  go.primes = parse_primes(c.primes);
  go.search = to.search;
  GammaRun G = run_gamma_pipeline(R, g, go);
  VerifyOptions vo;
  vo.primes = parse_primes(c.verify_primes);
  vo.search = to.search;
  vo.reselect = !c.strict_terminating;
  SmoothnessReport S = certify(R, G, vo);
  TowerAudit T = audit_tower(R);
  json cfg = config_json(c, "verify");
  json rep = smoothness_json(S);
  rep["config"] = cfg;
  rep["config_hash"] = config_hash(cfg);
  rep["tower_audit"] = audit_json(T);
  rep["maximality_failures"] = G.audit_failures;
  rep["birationality"] = {{"checked", G.birational_checked}, {"agree", G.birational_ok}, {"detail", G.birational_detail}};
  fs::path dir = out_dir(c);
  if (!dir.empty()) {
    write_tower(R, cfg, dir, &G);
    write_file(dir / "report.json", dump(rep));
    write_file(dir / "timings.json", dump(json{{"seconds", seconds_since(t0)}}));
  }
  if (!c.report.empty()) write_file(c.report, dump(rep));
  std::cout << "verdict " << S.verdict << ": " << S.points << " points, " << S.failed_points << " failed, "
            << S.termination_failures << " termination failures, " << S.reselected_points
            << " with re-chosen terminating columns\n";
  for (auto& [d, n] : S.dim_t) std::cout << "  dim T = " << d << " at " << n << " points\n";
  for (auto& ch : S.charts)
    for (auto& f : ch.failures) std::cout << "  " << ch.name << " p=" << ch.p << ": " << f << "\n";
  for (auto& s : S.notes) std::cout << "  note: " << s << "\n";
  if (S.verdict == "FAIL") return 1;
  if (S.verdict == "PARTIAL") return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resolution towers over Grassmannian charts"};
  app.require_subcommand(1);
  Config c;
  auto* rel = app.add_subcommand("relations", "primary relations and binomial systems");
  add_model_flags(rel, c);
  rel->add_option("--out", c.out, "output directory");
  auto* tow = app.add_subcommand("tower", "run the blowup tower");
  add_model_flags(tow, c);
  add_tower_flags(tow, c);
  tow->add_option("--out", c.out, "output directory");
  auto* gam = app.add_subcommand("gamma", "transform a coordinate subscheme through the tower");
  add_model_flags(gam, c);
  add_tower_flags(gam, c);
  add_gamma_flags(gam, c);
  gam->add_option("--out", c.out, "output directory");
  auto* ver = app.add_subcommand("verify", "certify smoothness at finite-field points");
  add_model_flags(ver, c);
  add_tower_flags(ver, c, true);
  add_gamma_flags(ver, c);
  ver->add_option("--report", c.report, "report JSON file");
  ver->add_option("--out", c.out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 2;
  }
  try {
    if (*rel) return cmd_relations(c);
    if (*tow) return cmd_tower(c);
    if (*gam) return cmd_gamma(c);
    if (*ver) return cmd_verify(c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code == "invalid-parameters" || e.code == "invalid-chart" || e.code == "chart-incompatible" ||
        e.code == "not-primary" || e.code == "incompatible-fields")
      return 2;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
