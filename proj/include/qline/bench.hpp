#pragma once

#include "qline/problems.hpp"
#include "qline/types.hpp"
#include "qline/usolve.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qline {

/// "bfgs" or "q<gamma>".
struct SolverSpec {
  enum class Kind { bfgs, qls };
  std::string name;
  Kind kind = Kind::qls;
  int gamma = 1;
  double q0 = 0.9;
};

SolverSpec bfgs_solver();
SolverSpec q_solver(int gamma, double q0 = 0.9);
/// Parses "bfgs", "q1", "q2", ...
SolverSpec solver_from_name(const std::string& name, double q0 = 0.9);

SolveResult run_solver(const SolverSpec& solver, const Problem& problem, const Vector& x0,
                       const SolverConfig& config);

/// Solver settings used by the benchmarks: Wolfe backtracking and an
/// eigenvalue floor of 0.05 for the q-Hessian modification.
SolverConfig bench_config(double grad_tolerance = 1e-5);
inline constexpr double kBenchDeltaFloor = 0.05;

/// converged, and within 1e-3 of a known minimizer or 1e-6 of the minimum value.
bool is_success(const Problem& problem, const SolveResult& result);

struct BenchmarkRow {
  std::string problem;
  std::string solver;
  int run_index = 0;
  std::uint64_t seed = 0;
  bool success = false;
  int iterations = 0;
  double elapsed_seconds = 0.0;
  Vector start_point;

  // Not serialized.
  std::string status;
  double min_cos_theta = 1.0;  // over the trace
  double descent_margin = 0.0;   // min over the trace of cos(theta) - 1/kappa
};

struct BenchmarkTable {
  std::vector<BenchmarkRow> rows;

  /// Orders rows by (problem, solver, run_index).
  void sort();
};

/// Per-run seed from (master seed, problem, solver, attempt): FNV-1a of the
/// names mixed through splitmix64.
std::uint64_t run_seed(std::uint64_t master_seed, const std::string& problem,
                       const std::string& solver, int attempt);

/// Uniform point in the box, drawn from mt19937_64(seed) with 53-bit doubles.
Vector random_start(const StartBox& box, std::uint64_t seed);

struct FcSummaryRow {
  double c = 0.0;
  std::vector<double> mean_iterations;  // one per solver, in solver order
  std::vector<double> mean_seconds;
};

struct FcOptions {
  std::vector<double> c_values = {0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9};
  std::vector<double> y_values = {0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9};
  double q0 = 0.9;
  std::vector<int> gammas = {1, 2, 3};
  SolverConfig config = bench_config();
  int workers = 1;
};

struct FcBenchmark {
  std::vector<std::string> solvers;
  BenchmarkTable runs;
  std::vector<FcSummaryRow> summary;
};

/// Starts (c, y) for every c and y; BFGS plus one q solver per gamma.
/// Means are over all runs of a (c, solver) cell.
FcBenchmark run_fc_benchmark(const FcOptions& options);

struct SuiteOptions {
  std::uint64_t master_seed = 42;
  int runs_required = 10;
  int attempt_cap = 200;
  SolverConfig config = bench_config();
  int workers = 1;
};

/// For each (problem, solver) draws starts from the problem's start box until
/// `runs_required` successes or `attempt_cap` attempts; every attempt is a row.
BenchmarkTable run_suite_benchmark(const std::vector<Problem>& suite,
                                   const std::vector<SolverSpec>& solvers,
                                   const SuiteOptions& options);

enum class ProfileMetric { iterations, time };
ProfileMetric metric_from_name(const std::string& name);

struct ProfileCurve {
  std::string solver;
  std::vector<std::pair<double, double>> points;  // (tau, fraction)
};

struct Profile {
  std::vector<ProfileCurve> curves;
  /// Problems dropped because no solver solved them.
  std::vector<std::string> excluded_problems;
};

/// Dolan-More profile. A (problem, solver) cell is solved when it has at least
/// `runs_required` successful rows; its measure is the mean over those rows.
/// Unsolved cells get ratio +inf. Curves are sampled at tau = 1 and at every
/// distinct finite ratio.
Profile performance_profile(const BenchmarkTable& table, ProfileMetric metric,
                            int runs_required = 1);

/// Fraction of the curve at tau (step function, right-continuous).
double profile_value(const ProfileCurve& curve, double tau);

// CSV and SVG output. Reals are written with %.17g.
void write_runs_csv(std::ostream& out, const BenchmarkTable& table);
BenchmarkTable read_runs_csv(std::istream& in);
void write_fc_summary_csv(std::ostream& out, const FcBenchmark& bench);
void write_profile_csv(std::ostream& out, const std::vector<ProfileCurve>& curves);
std::vector<ProfileCurve> read_profile_csv(std::istream& in);
void write_profile_svg(std::ostream& out, const std::vector<ProfileCurve>& curves,
                       const std::string& title);

/// Opens `path` for writing and calls `emit`; errors name the path.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& emit);

std::string format_real(double v);

}  // namespace qline
