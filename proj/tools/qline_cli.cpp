// qline: command-line front end for the solvers and benchmarks.

#include "CLI11.hpp"
#include "qline/bench.hpp"
#include "qline/problems.hpp"
#include "qline/usolve.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

using namespace qline;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitRunFailures = 3;

Vector parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad coordinate '" + item + "'");
    }
    if (used != item.size()) throw InvalidArgument("bad coordinate '" + item + "'");
    vals.push_back(v);
  }
  if (vals.empty()) throw InvalidArgument("empty start point");
  return Eigen::Map<Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string join(const Vector& x) {
  std::string s;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += format_real(x[i]);
  }
  return s;
}

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

struct SolveArgs {
  std::string problem;
  std::optional<double> c;
  std::string x0;
  std::string method = "qls";
  int gamma = 1;
  double q0 = 0.9;
  double eps = 1e-5;
  int max_iter = 10000;
  double delta_floor = kBenchDeltaFloor;
  std::string trace;
};

int run_solve(const SolveArgs& a) {
  const Problem p = problem_by_name(a.problem, a.c);
  const Vector x0 = parse_vector(a.x0);
  if (x0.size() != p.dimension) {
    throw InvalidArgument("start point has dimension " + std::to_string(x0.size()) +
                          ", problem needs " + std::to_string(p.dimension));
  }
  SolverConfig config = bench_config(a.eps);
  config.max_iterations = a.max_iter;
  config.delta_policy = floored_delta(a.delta_floor);
  SolverSpec solver;
  if (a.method == "bfgs") solver = bfgs_solver();
  else if (a.method == "qls") solver = q_solver(a.gamma, a.q0);
  else throw InvalidArgument("method must be qls or bfgs");

  const SolveResult r = run_solver(solver, p, x0, config);
  std::printf("problem    %s\nsolver     %s\nstatus     %s\niterations %d\n", p.name.c_str(),
              solver.name.c_str(), to_string(r.status).c_str(), r.iterations);
  std::printf("x          %s\nf          %.12g\n|grad|     %.3e\nseconds    %.4f\n",
              join(r.x_final).c_str(), r.f_final, r.grad_norm_final, r.elapsed_seconds);
  if (!r.message.empty()) std::printf("message    %s\n", r.message.c_str());

  if (!a.trace.empty()) {
    write_file(a.trace, [&](std::ostream& out) {
      out << "k,f,grad_norm,alpha,q,cos_theta,condition,fallbacks,x\n";
      for (const auto& rec : r.trace) {
        out << rec.k << ',' << format_real(rec.f_value) << ',' << format_real(rec.grad_norm)
            << ',' << format_real(rec.alpha) << ','
            << (rec.q_k ? format_real(*rec.q_k) : std::string()) << ','
            << format_real(rec.cos_theta) << ',' << format_real(rec.condition_number) << ','
            << rec.fallback_count << ',';
        for (Eigen::Index i = 0; i < rec.x.size(); ++i) out << (i ? ";" : "") << format_real(rec.x[i]);
        out << '\n';
      }
    });
  }
  return r.status == SolveStatus::converged ? 0 : kExitRunFailures;
}

struct FcArgs {
  double q0 = 0.9;
  std::vector<int> gammas{1, 2, 3};
  double eps = 1e-5;
  std::string out;
  std::string runs_out;
  int workers = default_workers();
};

int run_bench_fc(const FcArgs& a) {
  FcOptions opt;
  opt.q0 = a.q0;
  opt.gammas = a.gammas;
  opt.config = bench_config(a.eps);
  opt.workers = a.workers;
  const FcBenchmark bench = run_fc_benchmark(opt);
  std::printf("%6s", "c");
  for (const auto& name : bench.solvers) std::printf(" %8s", ("it_" + name).c_str());
  std::printf("\n");
  for (const auto& row : bench.summary) {
    std::printf("%6.2f", row.c);
    for (double v : row.mean_iterations) std::printf(" %8.2f", v);
    std::printf("\n");
  }
  if (!a.out.empty()) write_file(a.out, [&](std::ostream& o) { write_fc_summary_csv(o, bench); });
  if (!a.runs_out.empty()) {
    write_file(a.runs_out, [&](std::ostream& o) { write_runs_csv(o, bench.runs); });
  }
  int failed = 0;
  for (const auto& r : bench.runs.rows) failed += r.success ? 0 : 1;
  if (failed) std::cerr << failed << " of " << bench.runs.rows.size() << " runs failed\n";
  return failed ? kExitRunFailures : 0;
}

struct SuiteArgs {
  std::uint64_t seed = 42;
  int runs = 10;
  int attempt_cap = 200;
  double eps = 1e-5;
  double time_cap = 100.0;
  std::string out;
  std::vector<std::string> solvers{"bfgs", "q1", "q2", "q3"};
  int workers = default_workers();
};

int run_bench_suite(const SuiteArgs& a) {
  SuiteOptions opt;
  opt.master_seed = a.seed;
  opt.runs_required = a.runs;
  opt.attempt_cap = a.attempt_cap;
  opt.config = bench_config(a.eps);
  opt.config.time_cap_seconds = a.time_cap;
  opt.workers = a.workers;
  std::vector<SolverSpec> solvers;
  for (const auto& s : a.solvers) solvers.push_back(solver_from_name(s));
  const BenchmarkTable table = run_suite_benchmark(standard_suite(), solvers, opt);
  if (!a.out.empty()) write_file(a.out, [&](std::ostream& o) { write_runs_csv(o, table); });
  else write_runs_csv(std::cout, table);

  // A cell fails when it ran out of attempts before collecting enough successes.
  std::map<std::pair<std::string, std::string>, int> wins;
  for (const auto& r : table.rows) wins[{r.problem, r.solver}] += r.success ? 1 : 0;
  int unsolved = 0;
  for (const auto& [cell, n] : wins) {
    if (n < a.runs) {
      std::cerr << "unsolved: " << cell.first << " / " << cell.second << " (" << n << " of "
                << a.runs << ")\n";
      ++unsolved;
    }
  }
  return unsolved ? kExitRunFailures : 0;
}

struct ProfileArgs {
  std::string metric = "iterations";
  std::string in;
  std::string out;
  std::string svg;
  int runs = 10;
};

int run_profile(const ProfileArgs& a) {
  std::ifstream in(a.in);
  if (!in) throw std::runtime_error("cannot open '" + a.in + "'");
  const BenchmarkTable table = read_runs_csv(in);
  const Profile prof = performance_profile(table, metric_from_name(a.metric), a.runs);
  for (const auto& p : prof.excluded_problems) {
    std::cerr << "warning: " << p << " solved by no solver, excluded\n";
  }
  write_file(a.out, [&](std::ostream& o) { write_profile_csv(o, prof.curves); });
  if (!a.svg.empty()) {
    write_file(a.svg, [&](std::ostream& o) {
      write_profile_svg(o, prof.curves, "Performance profile (" + a.metric + ")");
    });
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-derivative line-search solvers and benchmarks"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Minimize one problem from one start point");
  s->add_option("--problem", solve.problem, "Problem name (see README)")->required();
  s->add_option("--c", solve.c, "Parameter c of the fc family");
  s->add_option("--x0", solve.x0, "Start point, comma separated")->required();
  s->add_option("--method", solve.method)->check(CLI::IsMember({"qls", "bfgs"}));
  s->add_option("--gamma", solve.gamma)->check(CLI::PositiveNumber);
  s->add_option("--q0", solve.q0)->check(CLI::Range(0.0, 1.0));
  s->add_option("--eps", solve.eps)->check(CLI::PositiveNumber);
  s->add_option("--max-iter", solve.max_iter)->check(CLI::NonNegativeNumber);
  s->add_option("--delta-floor", solve.delta_floor, "Eigenvalue floor of the modification")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--trace", solve.trace, "Write the iteration trace as CSV");

  auto* bench = app.add_subcommand("bench", "Run a benchmark");
  bench->require_subcommand(1);
  FcArgs fc;
  auto* bfc = bench->add_subcommand("fc", "Iteration counts on the fc family");
  bfc->add_option("--q0", fc.q0)->check(CLI::Range(0.0, 1.0));
  bfc->add_option("--gammas", fc.gammas)->delimiter(',')->check(CLI::PositiveNumber);
  bfc->add_option("--eps", fc.eps)->check(CLI::PositiveNumber);
  bfc->add_option("--out", fc.out, "Summary CSV (one row per c)");
  bfc->add_option("--runs-out", fc.runs_out, "Per-run CSV");
  bfc->add_option("--workers", fc.workers)->check(CLI::PositiveNumber);

  SuiteArgs suite;
  auto* bs = bench->add_subcommand("suite", "Random starts on the standard test set");
  bs->add_option("--seed", suite.seed);
  bs->add_option("--runs", suite.runs)->check(CLI::PositiveNumber);
  bs->add_option("--attempt-cap", suite.attempt_cap)->check(CLI::PositiveNumber);
  bs->add_option("--eps", suite.eps)->check(CLI::PositiveNumber);
  bs->add_option("--time-cap", suite.time_cap)->check(CLI::PositiveNumber);
  bs->add_option("--out", suite.out, "Per-run CSV (stdout if omitted)");
  bs->add_option("--solvers", suite.solvers)->delimiter(',');
  bs->add_option("--workers", suite.workers)->check(CLI::PositiveNumber);

  ProfileArgs prof;
  auto* p = app.add_subcommand("profile", "Performance profile from a per-run CSV");
  p->add_option("--metric", prof.metric)->check(CLI::IsMember({"iterations", "time"}));
  p->add_option("--in", prof.in)->required();
  p->add_option("--out", prof.out)->required();
  p->add_option("--svg", prof.svg);
  p->add_option("--runs", prof.runs, "Successes needed for a cell to count as solved")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*s) return run_solve(solve);
    if (*bfc) return run_bench_fc(fc);
    if (*bs) return run_bench_suite(suite);
    if (*p) return run_profile(prof);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
