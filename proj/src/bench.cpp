#include "qline/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>
#include <tuple>

namespace qline {

namespace {

// Runs task(i) for i in [0, count) on up to `workers` threads.
template <typename Task>
void parallel_for(int count, int workers, Task task) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

BenchmarkRow make_row(const Problem& problem, const SolverSpec& solver, int index,
                      std::uint64_t seed, const Vector& x0, const SolveResult& r) {
  BenchmarkRow row;
  row.problem = problem.name;
  row.solver = solver.name;
  row.run_index = index;
  row.seed = seed;
  row.success = is_success(problem, r);
  row.iterations = r.iterations;
  row.elapsed_seconds = r.elapsed_seconds;
  row.start_point = x0;
  row.status = to_string(r.status);
  for (const auto& rec : r.trace) {
    row.min_cos_theta = std::min(row.min_cos_theta, rec.cos_theta);
    row.descent_margin = std::min(row.descent_margin, rec.cos_theta - 1.0 / rec.condition_number);
  }
  return row;
}

}  // namespace

SolverSpec bfgs_solver() { return {"bfgs", SolverSpec::Kind::bfgs, 0, 0.0}; }

SolverSpec q_solver(int gamma, double q0) {
  if (gamma < 1) throw InvalidArgument("gamma must be a positive integer");
  return {"q" + std::to_string(gamma), SolverSpec::Kind::qls, gamma, q0};
}

SolverSpec solver_from_name(const std::string& name, double q0) {
  if (name == "bfgs") return bfgs_solver();
  if (name.size() > 1 && name[0] == 'q' &&
      std::all_of(name.begin() + 1, name.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    return q_solver(std::stoi(name.substr(1)), q0);
  }
  throw InvalidArgument("unknown solver '" + name + "'");
}

SolveResult run_solver(const SolverSpec& solver, const Problem& problem, const Vector& x0,
                       const SolverConfig& config) {
  if (solver.kind == SolverSpec::Kind::bfgs) return solve_bfgs(problem, x0, config);
  return solve_qls(problem, x0, config, QSchedule(solver.q0, solver.gamma));
}

SolverConfig bench_config(double grad_tolerance) {
  SolverConfig config;
  config.grad_tolerance = grad_tolerance;
  config.delta_policy = floored_delta(kBenchDeltaFloor);
  return config;
}

bool is_success(const Problem& problem, const SolveResult& result) {
  if (result.status != SolveStatus::converged) return false;
  return distance_to_minimizers(problem, result.x_final) < 1e-3 ||
         std::abs(result.f_final - problem.known_min_value) < 1e-6;
}

void BenchmarkTable::sort() {
  std::stable_sort(rows.begin(), rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    return std::tie(a.problem, a.solver, a.run_index) < std::tie(b.problem, b.solver, b.run_index);
  });
}

std::uint64_t run_seed(std::uint64_t master_seed, const std::string& problem,
                       const std::string& solver, int attempt) {
  std::uint64_t h = fnv1a(problem);
  h = fnv1a(std::string(1, '\0') + solver, h);
  std::uint64_t s = splitmix64(master_seed ^ h);
  return splitmix64(s + static_cast<std::uint64_t>(attempt));
}

Vector random_start(const StartBox& box, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector x(box.center.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x[i] = box.center[i] + box.side * (u - 0.5);
  }
  return x;
}

FcBenchmark run_fc_benchmark(const FcOptions& options) {
  FcBenchmark bench;
  std::vector<SolverSpec> solvers{bfgs_solver()};
  for (int g : options.gammas) solvers.push_back(q_solver(g, options.q0));
  for (const auto& s : solvers) bench.solvers.push_back(s.name);

  std::vector<Problem> problems;
  for (double c : options.c_values) problems.push_back(make_fc(c));

  const int ny = static_cast<int>(options.y_values.size());
  const int ns = static_cast<int>(solvers.size());
  const int total = static_cast<int>(problems.size()) * ns * ny;
  bench.runs.rows.resize(static_cast<size_t>(total));
  parallel_for(total, options.workers, [&](int t) {
    const int yi = t % ny;
    const int si = (t / ny) % ns;
    const int ci = t / (ny * ns);
    Vector x0(2);
    x0 << options.c_values[static_cast<size_t>(ci)], options.y_values[static_cast<size_t>(yi)];
    const Problem& p = problems[static_cast<size_t>(ci)];
    const SolverSpec& s = solvers[static_cast<size_t>(si)];
    bench.runs.rows[static_cast<size_t>(t)] =
        make_row(p, s, yi, 0, x0, run_solver(s, p, x0, options.config));
  });

  for (size_t ci = 0; ci < problems.size(); ++ci) {
    FcSummaryRow row;
    row.c = options.c_values[ci];
    for (int si = 0; si < ns; ++si) {
      double it = 0.0, sec = 0.0;
      for (int yi = 0; yi < ny; ++yi) {
        const auto& r = bench.runs.rows[(ci * static_cast<size_t>(ns) + static_cast<size_t>(si)) *
                                            static_cast<size_t>(ny) +
                                        static_cast<size_t>(yi)];
        it += r.iterations;
        sec += r.elapsed_seconds;
      }
      row.mean_iterations.push_back(ny ? it / ny : 0.0);
      row.mean_seconds.push_back(ny ? sec / ny : 0.0);
    }
    bench.summary.push_back(std::move(row));
  }
  bench.runs.sort();
  return bench;
}

BenchmarkTable run_suite_benchmark(const std::vector<Problem>& suite,
                                   const std::vector<SolverSpec>& solvers,
                                   const SuiteOptions& options) {
  if (suite.empty()) throw InvalidArgument("benchmark suite is empty");
  if (solvers.empty()) throw InvalidArgument("no solvers given");
  if (options.runs_required < 1 || options.attempt_cap < 1) {
    throw InvalidArgument("runs and attempt cap must be positive");
  }
  const int ns = static_cast<int>(solvers.size());
  const int cells = static_cast<int>(suite.size()) * ns;
  std::vector<std::vector<BenchmarkRow>> per_cell(static_cast<size_t>(cells));
  parallel_for(cells, options.workers, [&](int t) {
    const Problem& p = suite[static_cast<size_t>(t / ns)];
    const SolverSpec& s = solvers[static_cast<size_t>(t % ns)];
    auto& out = per_cell[static_cast<size_t>(t)];
    int successes = 0;
    for (int a = 0; a < options.attempt_cap && successes < options.runs_required; ++a) {
      const std::uint64_t seed = run_seed(options.master_seed, p.name, s.name, a);
      const Vector x0 = random_start(p.start_box, seed);
      out.push_back(make_row(p, s, a, seed, x0, run_solver(s, p, x0, options.config)));
      successes += out.back().success ? 1 : 0;
    }
  });
  BenchmarkTable table;
  for (auto& cell : per_cell) {
    for (auto& r : cell) table.rows.push_back(std::move(r));
  }
  table.sort();
  return table;
}

ProfileMetric metric_from_name(const std::string& name) {
  if (name == "iterations") return ProfileMetric::iterations;
  if (name == "time") return ProfileMetric::time;
  throw InvalidArgument("unknown profile metric '" + name + "'");
}

Profile performance_profile(const BenchmarkTable& table, ProfileMetric metric,
                            int runs_required) {
  if (runs_required < 1) throw InvalidArgument("runs_required must be positive");
  std::set<std::string> problem_set, solver_set;
  std::map<std::pair<std::string, std::string>, std::pair<int, double>> cells;
  for (const auto& r : table.rows) {
    problem_set.insert(r.problem);
    solver_set.insert(r.solver);
    auto& cell = cells[{r.problem, r.solver}];
    if (r.success) {
      cell.first += 1;
      cell.second += metric == ProfileMetric::iterations ? r.iterations : r.elapsed_seconds;
    }
  }

  const double inf = std::numeric_limits<double>::infinity();
  Profile profile;
  std::map<std::string, std::vector<double>> ratios;
  for (const auto& s : solver_set) ratios[s];
  for (const auto& p : problem_set) {
    std::map<std::string, double> measure;
    double best = inf;
    for (const auto& s : solver_set) {
      const auto it = cells.find({p, s});
      double m = inf;
      if (it != cells.end() && it->second.first >= runs_required) {
        m = it->second.second / it->second.first;
      }
      measure[s] = m;
      best = std::min(best, m);
    }
    if (best == inf) {
      profile.excluded_problems.push_back(p);
      continue;
    }
    for (const auto& s : solver_set) {
      const double m = measure[s];
      double rho;
      if (m == inf) rho = inf;
      else if (m == best) rho = 1.0;
      else rho = best > 0.0 ? m / best : inf;
      ratios[s].push_back(rho);
    }
  }

  const double np = static_cast<double>(problem_set.size() - profile.excluded_problems.size());
  for (const auto& s : solver_set) {
    std::vector<double> taus{1.0};
    for (double r : ratios[s]) {
      if (r != inf) taus.push_back(r);
    }
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    ProfileCurve curve;
    curve.solver = s;
    for (double tau : taus) {
      const auto count = std::count_if(ratios[s].begin(), ratios[s].end(),
                                       [tau](double r) { return r <= tau; });
      curve.points.emplace_back(tau, np > 0 ? static_cast<double>(count) / np : 0.0);
    }
    profile.curves.push_back(std::move(curve));
  }
  return profile;
}

double profile_value(const ProfileCurve& curve, double tau) {
  double v = 0.0;
  for (const auto& [t, f] : curve.points) {
    if (t <= tau) v = f;
  }
  return v;
}

}  // namespace qline
