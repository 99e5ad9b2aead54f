#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "ccopt/json_io.hpp"

namespace {

using namespace ccopt;

struct InstanceFlags {
  int K = 3;
  int N = 4;
  double M = -1.0;
  double gamma = 0.0;
  std::string popularity_file;

  Popularity popularity() const {
    if (!popularity_file.empty()) {
      std::ifstream in(popularity_file);
      if (!in) throw std::runtime_error("cannot open popularity file: " + popularity_file);
      Json j;
      in >> j;
      return Popularity::from_probabilities(j.get<std::vector<double>>());
    }
    return Popularity::zipf(N, gamma);
  }

  Instance instance() const { return Instance(K, N, M, popularity()); }
  Instance instance_at(double memory) const { return Instance(K, N, memory, popularity()); }
};

void add_instance_flags(CLI::App* cmd, InstanceFlags& flags, bool require_m) {
  cmd->add_option("--K", flags.K, "number of users")->check(CLI::Range(1, 16));
  cmd->add_option("--N", flags.N, "number of files")->check(CLI::PositiveNumber);
  auto* m = cmd->add_option("--M", flags.M, "cache size per user, in files");
  if (require_m) m->required();
  auto* g = cmd->add_option("--gamma", flags.gamma, "Zipf popularity exponent (0 = uniform)");
  cmd->add_option("--popularity-file", flags.popularity_file,
                  "JSON array of per-file probabilities (overrides --gamma)")
      ->excludes(g);
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(out);
  if (!f) throw std::runtime_error("cannot open output file: " + out);
  f << text << "\n";
}

bool popularity_is_uniform(const Popularity& pop) {
  for (int n = 1; n <= pop.size(); ++n)
    if (std::abs(pop.prob(n) - pop.prob(1)) > 1e-12) return false;
  return true;
}

bool enumeration_fits(const Instance& inst) {
  return std::pow(static_cast<double>(inst.N), inst.K) <=
         static_cast<double>(max_enumeration());
}

int max_l0_of(const PartitionParam& x) {
  int worst = 0;
  for (const auto& row : x.x) worst = std::max(worst, l0_count(row));
  return worst;
}

// Re-evaluate the placement by exact enumeration and insist it reproduces the
// reported objective; cheap insurance against a wrong expansion or objective.
void check_emitted(const Instance& inst, const PartitionParam& x, double objective) {
  const auto violations = validate(x, inst);
  if (!violations.empty())
    throw std::runtime_error("emitted parameter failed validation: " +
                             violations.front().describe());
  if (!enumeration_fits(inst)) return;
  const double exact = average_load_exact(inst, x);
  if (std::abs(exact - objective) > 1e-7) {
    std::ostringstream os;
    os << "emitted parameter re-evaluates to " << exact << " but reported " << objective;
    throw std::runtime_error(os.str());
  }
}

// ---------------------------------------------------------------------------

int cmd_optimize(const InstanceFlags& flags, const std::string& level, const std::string& out) {
  const Instance inst = flags.instance();
  OptResult res;
  if (level == "p1") {
    res = solve_full(inst);
  } else if (level == "p2") {
    res = solve_symmetric(inst);
  } else if (level == "p3") {
    if (!popularity_is_uniform(inst.pop))
      throw std::runtime_error("level p3 assumes uniform popularity; use --gamma 0");
    res = solve_uniform(inst);
  } else {
    throw std::runtime_error("unknown level '" + level + "' (expected p1|p2|p3)");
  }
  if (res.status != LpStatus::Optimal) {
    std::cerr << "optimization failed: " << to_string(res.status) << "\n";
    return 1;
  }
  PartitionParam x = res.x ? *res.x : (res.y ? expand(*res.y) : expand(expand(*res.z, inst.N)));
  check_emitted(inst, x, res.objective);
  Json param = res.x ? to_json(*res.x) : (res.y ? to_json(*res.y) : to_json(*res.z, inst.N));
  const Json j{{"M", inst.M},          {"scheme", level},
               {"load", res.objective}, {"level", level_name(res.level)},
               {"iterations", res.iterations}, {"status", to_string(res.status)},
               {"param", param}};
  write_output(out, j.dump(2));
  return 0;
}

int cmd_subpack(const InstanceFlags& flags, const SubpackConfig& cfg, const std::string& out) {
  const Instance inst = flags.instance();
  const DemandStats stats = DemandStats::compute(inst.pop, inst.K);
  const MultiStartResult ms = dc_multi_start(inst, stats, cfg);
  if (!ms.found) {
    std::cerr << "no run reached a sparsity-feasible point (" << ms.runs << " starts)\n";
    return 1;
  }
  check_emitted(inst, expand(ms.best.y), ms.best.objective);
  int worst = 0;
  for (int c : ms.best.l0_per_file) worst = std::max(worst, c);
  const Json j{{"M", inst.M},
               {"scheme", "dc"},
               {"load", ms.best.objective},
               {"level", level_name(Level::Symmetric)},
               {"iterations", ms.best.iterations},
               {"f_hat", cfg.f_hat},
               {"subpack_max", worst},
               {"feasible", ms.best.feasible},
               {"runs", ms.runs},
               {"feasible_runs", ms.feasible_runs},
               {"param", to_json(ms.best.y)}};
  write_output(out, j.dump(2));
  return 0;
}

int cmd_plan(const InstanceFlags& flags, const std::string& param_file,
             const std::string& demand_str, const std::string& out) {
  const Instance inst = flags.instance();
  std::ifstream in(param_file);
  if (!in) throw std::runtime_error("cannot open parameter file: " + param_file);
  Json pj;
  in >> pj;
  const PartitionParam x = partition_from_json(pj);
  Demand demand;
  std::stringstream ss(demand_str);
  for (std::string tok; std::getline(ss, tok, ',');) demand.push_back(std::stoi(tok));
  const DeliveryPlan plan = delivery(inst, x, demand);
  double total = 0.0;
  for (const auto& m : plan.messages) total += m.length;
  std::cerr << "load " << total << ", decodable "
            << (decode_check(inst, x, demand, plan) ? "yes" : "no") << "\n";
  write_output(out, to_json(plan, inst.K).dump(2));
  return 0;
}

// ---------------------------------------------------------------------------

struct Check {
  bool ok = true;
  void report(bool pass, const std::string& name, const std::string& detail) {
    std::cout << (pass ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << ": " << detail;
    std::cout << "\n";
    ok = ok && pass;
  }
};

std::string diff_str(double a, double b) {
  std::ostringstream os;
  os.precision(3);
  os << "diff " << std::scientific << std::abs(a - b);
  return os.str();
}

void verify_at(const Instance& inst, uint64_t seed, Check& check) {
  std::ostringstream tag;
  tag << "[M=" << inst.M << "] ";
  const bool small = enumeration_fits(inst);

  DemandStats stats = DemandStats::compute(inst.pop, inst.K, false);
  if (small) {
    const DemandStats brute = DemandStats::enumerate(inst.pop, inst.K);
    double worst = 0.0;
    for (int u = 1; u <= std::min(inst.K, inst.N); ++u)
      for (int i = 1; i <= inst.K - u; ++i)
        for (int n = 1; n <= inst.N; ++n)
          worst = std::max(worst,
                           std::abs(stats.leftover_rank(i, u, n) - brute.leftover_rank(i, u, n)));
    check.report(worst <= 1e-9, tag.str() + "demand statistics formula vs enumeration",
                 "max diff " + std::to_string(worst));
  }

  // The per-rank leftover distribution summed over files must not depend on
  // the rank (all ranks exist with the same distinct count).
  double rank_dev = 0.0;
  for (int u = 1; u <= std::min(inst.K, inst.N); ++u) {
    double first = 0.0;
    for (int i = 1; i <= inst.K - u; ++i) {
      double total = 0.0;
      for (int n = 1; n <= inst.N; ++n) total += stats.leftover_rank(i, u, n);
      if (i == 1)
        first = total;
      else
        rank_dev = std::max(rank_dev, std::abs(total - first));
    }
  }
  check.report(rank_dev <= 1e-12, tag.str() + "rank-independence of leftover mass",
               "max dev " + std::to_string(rank_dev));

  const OptResult p2 = solve_symmetric(inst, stats);
  check.report(p2.status == LpStatus::Optimal, tag.str() + "symmetric optimization",
               to_string(p2.status));
  if (p2.status != LpStatus::Optimal) return;

  if (small) {
    const PartitionParam x2 = expand(*p2.y);
    const double exact = average_load_exact(inst, x2);
    check.report(std::abs(exact - p2.objective) <= 1e-8,
                 tag.str() + "closed-form objective vs exact enumeration",
                 diff_str(exact, p2.objective));

    bool decodes = true;
    for_each_demand(inst.pop, inst.K, [&](const Demand& d, double) {
      decodes = decodes && decode_check(inst, x2, d);
    });
    check.report(decodes, tag.str() + "decodability across all demands", "");

    const McEstimate mc = average_load_mc(inst, x2, 20000, seed);
    const double err = std::abs(mc.mean - exact);
    check.report(err <= 3.0 * mc.std_error + 1e-12, tag.str() + "Monte Carlo consistency",
                 diff_str(mc.mean, exact) + " vs 3*se " + std::to_string(3.0 * mc.std_error));

    if (std::pow(static_cast<double>(inst.N), inst.K) * (1 << inst.K) <=
        static_cast<double>(max_enumeration())) {
      const OptResult p1 = solve_full(inst);
      check.report(p1.status == LpStatus::Optimal &&
                       std::abs(p1.objective - p2.objective) <= 1e-7,
                   tag.str() + "full placement matches symmetric optimum",
                   diff_str(p1.objective, p2.objective));
    }
  }

  if (popularity_is_uniform(inst.pop)) {
    const OptResult p3 = solve_uniform(inst);
    check.report(p3.status == LpStatus::Optimal &&
                     std::abs(p3.objective - p2.objective) <= 1e-7,
                 tag.str() + "uniform-popularity collapse to the single-type family",
                 diff_str(p3.objective, p2.objective));
    const double t = static_cast<double>(inst.K) * inst.M / inst.N;
    if (std::abs(t - std::lround(t)) <= 1e-9) {
      const UniformOptimum cf = uniform_closed_form(inst.K, inst.N, inst.M);
      check.report(std::abs(cf.load - p3.objective) <= 1e-8,
                   tag.str() + "closed-form corner optimum", diff_str(cf.load, p3.objective));
    }
  }
}

int cmd_verify(const InstanceFlags& flags, bool m_given, uint64_t seed) {
  Check check;
  if (m_given) {
    verify_at(flags.instance(), seed, check);
  } else {
    for (int t = 0; t <= flags.K; ++t)
      verify_at(flags.instance_at(static_cast<double>(t) * flags.N / flags.K), seed, check);
  }
  std::cout << (check.ok ? "all checks passed" : "CHECKS FAILED") << "\n";
  return check.ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

struct SweepRow {
  double axis_value = 0.0;
  std::string scheme;
  double avg_load = 0.0;
  int subpack_max = 0;
  int iterations = 0;
  long long wall_ms = 0;
};

int uniform_support_width(int K, double M, int N) {
  const double t = static_cast<double>(K) * M / N;
  const int lo = static_cast<int>(std::floor(t + 1e-9));
  int width = static_cast<int>(binomial(K, lo).convert_to<long long>());
  if (t > lo + 1e-9) width += static_cast<int>(binomial(K, lo + 1).convert_to<long long>());
  return width;
}

std::vector<SweepRow> sweep_point(const InstanceFlags& base, const std::string& axis,
                                  double value, const std::vector<std::string>& schemes,
                                  SubpackConfig cfg, bool have_f_hat) {
  InstanceFlags flags = base;
  if (axis == "M")
    flags.M = value;
  else if (axis == "gamma")
    flags.gamma = value;
  else if (axis == "f_hat")
    cfg.f_hat = static_cast<int>(std::lround(value));
  const Instance inst = flags.instance();

  std::vector<SweepRow> rows;
  DemandStats stats(DemandStats::compute(inst.pop, inst.K, false));
  for (const std::string& scheme : schemes) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepRow row;
    row.axis_value = value;
    row.scheme = scheme;
    if (scheme == "p1") {
      const OptResult r = solve_full(inst);
      if (r.status != LpStatus::Optimal) throw std::runtime_error("p1 solve failed");
      check_emitted(inst, *r.x, r.objective);
      row.avg_load = r.objective;
      row.subpack_max = max_l0_of(*r.x);
      row.iterations = r.iterations;
    } else if (scheme == "p2") {
      const OptResult r = solve_symmetric(inst, stats);
      if (r.status != LpStatus::Optimal) throw std::runtime_error("p2 solve failed");
      check_emitted(inst, expand(*r.y), r.objective);
      row.avg_load = r.objective;
      row.subpack_max = max_l0_of(expand(*r.y));
      row.iterations = r.iterations;
    } else if (scheme == "p3") {
      if (!popularity_is_uniform(inst.pop)) {
        std::cerr << "note: skipping p3 at " << axis << "=" << value
                  << " (popularity not uniform)\n";
        continue;
      }
      const OptResult r = solve_uniform(inst);
      if (r.status != LpStatus::Optimal) throw std::runtime_error("p3 solve failed");
      check_emitted(inst, expand(expand(*r.z, inst.N)), r.objective);
      row.avg_load = r.objective;
      row.subpack_max = max_l0_of(expand(expand(*r.z, inst.N)));
      row.iterations = r.iterations;
    } else if (scheme == "mn") {
      row.avg_load = baseline_mn_load(inst);
      row.subpack_max = uniform_support_width(inst.K, inst.M, inst.N);
    } else if (scheme == "yu") {
      row.avg_load = baseline_yu_load(inst);
      row.subpack_max = uniform_support_width(inst.K, inst.M, inst.N);
    } else if (scheme == "dc") {
      if (!have_f_hat && axis != "f_hat")
        throw std::runtime_error("scheme dc requires --f-hat");
      const MultiStartResult ms = dc_multi_start(inst, stats, cfg);
      if (!ms.found) {
        std::cerr << "note: skipping dc at " << axis << "=" << value
                  << " (no feasible run)\n";
        continue;
      }
      check_emitted(inst, expand(ms.best.y), ms.best.objective);
      row.avg_load = ms.best.objective;
      row.subpack_max = *std::max_element(ms.best.l0_per_file.begin(), ms.best.l0_per_file.end());
      row.iterations = ms.best.iterations;
    } else {
      throw std::runtime_error("unknown scheme '" + scheme + "'");
    }
    row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_sweep(const InstanceFlags& flags, const std::string& axis, const std::string& grid_str,
              const std::string& schemes_str, SubpackConfig cfg, bool have_f_hat,
              const std::string& out) {
  if (axis != "M" && axis != "gamma" && axis != "f_hat")
    throw std::runtime_error("unknown axis '" + axis + "' (expected M|gamma|f_hat)");
  if (axis != "M" && flags.M < 0.0)
    throw std::runtime_error("sweep over " + axis + " requires --M");
  std::vector<double> grid;
  {
    std::stringstream ss(grid_str);
    for (std::string tok; std::getline(ss, tok, ',');) grid.push_back(std::stod(tok));
  }
  if (grid.empty()) throw std::runtime_error("empty sweep grid");
  std::vector<std::string> schemes;
  {
    std::stringstream ss(schemes_str);
    for (std::string tok; std::getline(ss, tok, ',');) schemes.push_back(tok);
  }

  // Grid points are independent; solve them in a small worker pool and merge
  // in grid order so the output does not depend on scheduling.
  std::vector<std::future<std::vector<SweepRow>>> futures;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SubpackConfig point_cfg = cfg;
    point_cfg.seed = cfg.seed + static_cast<uint64_t>(i) * static_cast<uint64_t>(cfg.starts);
    futures.push_back(std::async(std::launch::async, sweep_point, flags, axis, grid[i], schemes,
                                 point_cfg, have_f_hat));
  }
  std::vector<SweepRow> rows;
  for (auto& f : futures) {
    auto part = f.get();
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.axis_value != b.axis_value) return a.axis_value < b.axis_value;
    return a.scheme < b.scheme;
  });

  std::ostringstream csv;
  csv << "axis_value,scheme,avg_load,subpack_max,iterations,wall_ms\n";
  for (const auto& r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.12g,%s,%.12g,%d,%d,%lld\n", r.axis_value,
                  r.scheme.c_str(), r.avg_load, r.subpack_max, r.iterations,
                  static_cast<long long>(r.wall_ms));
    csv << buf;
  }
  if (out.empty() || out == "-")
    std::cout << csv.str();
  else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open output file: " + out);
    f << csv.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uncoded cache placement optimization for coded delivery"};
  app.require_subcommand(1);

  InstanceFlags flags;
  std::string out, level = "p2", axis = "M", grid, schemes = "p2,yu,mn";
  std::string param_file, demand_str;
  SubpackConfig cfg;
  uint64_t seed = 0;

  auto* optimize = app.add_subcommand("optimize", "minimize the expected delivery load");
  add_instance_flags(optimize, flags, true);
  optimize->add_option("--level", level, "placement family: p1|p2|p3 (default p2)");
  optimize->add_option("--out", out, "output file (default stdout)");

  auto* subpack = app.add_subcommand("subpack", "optimize under a subpacketization cap");
  add_instance_flags(subpack, flags, true);
  subpack->add_option("--f-hat", cfg.f_hat, "max nonzero subfiles per file")->required();
  subpack->add_option("--delta", cfg.delta, "descent stop threshold");
  subpack->add_option("--starts", cfg.starts, "number of random restarts");
  subpack->add_option("--seed", cfg.seed, "base RNG seed");
  subpack->add_option("--out", out, "output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "run the self-check suite");
  add_instance_flags(verify, flags, false);
  verify->add_option("--seed", seed, "RNG seed for the Monte Carlo check");

  auto* sweep = app.add_subcommand("sweep", "tabulate schemes along one axis (CSV)");
  add_instance_flags(sweep, flags, false);
  sweep->add_option("--axis", axis, "M | gamma | f_hat");
  sweep->add_option("--grid", grid, "comma-separated axis values")->required();
  sweep->add_option("--schemes", schemes, "comma-separated: p1,p2,p3,mn,yu,dc");
  auto* fh = sweep->add_option("--f-hat", cfg.f_hat, "subfile cap for the dc scheme");
  sweep->add_option("--delta", cfg.delta, "descent stop threshold");
  sweep->add_option("--starts", cfg.starts, "random restarts for dc");
  sweep->add_option("--seed", cfg.seed, "base RNG seed");
  sweep->add_option("--out", out, "output CSV file (default stdout)");

  auto* plan = app.add_subcommand("plan", "emit the delivery plan for one demand");
  add_instance_flags(plan, flags, true);
  plan->add_option("--param", param_file, "placement parameter JSON")->required();
  plan->add_option("--demand", demand_str, "comma-separated file per user, e.g. 1,2,1")
      ->required();
  plan->add_option("--out", out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (optimize->parsed()) return cmd_optimize(flags, level, out);
    if (subpack->parsed()) return cmd_subpack(flags, cfg, out);
    if (verify->parsed()) return cmd_verify(flags, verify->count("--M") > 0, seed);
    if (sweep->parsed())
      return cmd_sweep(flags, axis, grid, schemes, cfg, fh->count() > 0, out);
    if (plan->parsed()) return cmd_plan(flags, param_file, demand_str, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
