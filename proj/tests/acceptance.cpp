// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion, with
// indented detail lines below it.
//
//   acceptance [--cli <path to qline>] [--workdir <dir>] [--strict]
//
// Exit status is 0 when every criterion was evaluated; with --strict it is 1
// if any criterion failed.

#include "oracles.hpp"
#include "qline/bench.hpp"
#include "qline/psdfactor.hpp"
#include "qline/qmatrix.hpp"
#include "qline/sqp.hpp"
#include "qline/usolve.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace qline;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
  void note(const std::string& what) { details.push_back(what); }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Reference iteration means: BFGS, Q1, Q2, Q3 per c = 0.1, 0.3, ..., 1.9.
const double kReference[10][4] = {{7.1, 5, 5, 4.9},   {7.3, 5, 4.9, 4.7}, {9.8, 5, 4.8, 4.5},
                               {8.1, 4.6, 4, 4},   {7.5, 4.1, 3.7, 3.3}, {8.0, 4.1, 3.8, 3.7},
                               {9.1, 4.3, 4.1, 4}, {9.1, 5.3, 4.7, 4.7}, {9.2, 5.8, 5.8, 5.5},
                               {9.8, 5.8, 5.6, 5.5}};

struct Shared {
  FcBenchmark fc;
  double fc_seconds = 0.0;
  BenchmarkTable suite;
};

Verdict criterion1(const Shared& s) {
  Verdict v;
  v.require(s.fc_seconds < 60.0, "fc benchmark took " + fmt("%.1f s", s.fc_seconds));
  int ok = 0;
  for (size_t ci = 0; ci < s.fc.summary.size(); ++ci) {
    const auto& row = s.fc.summary[ci];
    std::string line = "c=" + fmt("%.1f", row.c) + ":";
    for (size_t j = 0; j < 4; ++j) {
      const double got = row.mean_iterations[j];
      const double want = kReference[ci][j];
      const bool cell = std::abs(got - want) <= 2.0;
      ok += cell ? 1 : 0;
      line += " " + s.fc.solvers[j] + " " + fmt("%.1f", got) + " (" + fmt("%.1f", want) + ")" +
              (cell ? "" : "*");
      if (!cell) v.pass = false;
    }
    v.note(line);
  }
  v.note(std::to_string(ok) + "/40 cells within +-2 of the table (* = outside)");
  return v;
}

Verdict criterion2(const Shared& s) {
  Verdict v;
  int count = 0;
  for (const auto& row : s.fc.summary) {
    if (row.mean_iterations[3] <= row.mean_iterations[1] + 0.5) ++count;
  }
  v.note(std::to_string(count) + "/10 rows with Q3 <= Q1 + 0.5");
  v.require(count >= 8, "fewer than 8 rows");
  return v;
}

Verdict criterion3(const Shared& s) {
  Verdict v;
  int count = 0;
  for (const auto& row : s.fc.summary) {
    bool all = true;
    for (int g = 1; g <= 3; ++g) {
      if (!(row.mean_iterations[static_cast<size_t>(g)] < row.mean_iterations[0])) {
        all = false;
        v.require(false, "c=" + fmt("%.1f", row.c) + " q" + std::to_string(g) + " " +
                             fmt("%.1f", row.mean_iterations[static_cast<size_t>(g)]) +
                             " >= bfgs " + fmt("%.1f", row.mean_iterations[0]));
      }
    }
    count += all ? 1 : 0;
  }
  v.note(std::to_string(count) + "/10 rows where every q solver beats BFGS");
  return v;
}

Verdict criterion4() {
  Verdict v;
  std::mt19937_64 rng(4004);
  double worst_err = 0.0;
  int worst_iters = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const Matrix q = oracle::random_spd(rng, n);
    Vector b(n);
    for (int i = 0; i < n; ++i) b[i] = oracle::uniform(rng, -1, 1);
    Problem p;
    p.name = "quadratic";
    p.dimension = n;
    p.objective = [q, b](const Vector& x) { return 0.5 * x.dot(q * x) + b.dot(x); };
    p.gradient = [q, b](const Vector& x) { return Vector(q * x + b); };
    const double qq = oracle::uniform(rng, 0.1, 0.99);
    const Vector x0 = oracle::away_from_zero(rng, n, 0.1, 2.0);
    const double err = (q_hessian(p.gradient, x0, QValue(qq)).matrix - q).cwiseAbs().maxCoeff();
    worst_err = std::max(worst_err, err);
    const SolveResult r = solve_qls(p, x0, SolverConfig{}, QSchedule(qq, 1));
    worst_iters = std::max(worst_iters, r.iterations);
    v.require(r.status == SolveStatus::converged, "quadratic " + std::to_string(t) + " did not converge");
  }
  v.note("max |A_q - Q|inf = " + fmt("%.2e", worst_err) + ", max iterations = " +
         std::to_string(worst_iters));
  v.require(worst_err <= 1e-10, "q-Hessian error above 1e-10");
  v.require(worst_iters <= 3, "more than 3 iterations");
  return v;
}

Verdict criterion5() {
  Verdict v;
  std::mt19937_64 rng(5005);
  int chol = 0, recon = 0, inertia = 0, zero_rule = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const Matrix a = oracle::random_symmetric(rng, n);
    const double norm = oracle::inf_norm(a);
    const PsdModification m = psd_modify(a);
    const FactorizationBundle& f = m.factorization;
    const Matrix p = f.permutation_matrix();
    chol += Eigen::LLT<Matrix>(m.modified_matrix).info() == Eigen::Success ? 0 : 1;
    const Matrix rec = f.lower * f.block_diagonal * f.lower.transpose();
    recon += (p * a * p.transpose() - rec).cwiseAbs().maxCoeff() <= 1e-8 * norm ? 0 : 1;
    const auto want = oracle::sign_counts(oracle::eigenvalues(a), 1e-12 * norm);
    const auto got = oracle::sign_counts(f.block_eigenvalues, 1e-12 * norm);
    inertia += (want.positive == got.positive && want.negative == got.negative &&
                want.zero == got.zero)
                   ? 0
                   : 1;
    const bool all_above = f.block_eigenvalues.minCoeff() >= m.delta;
    const bool f_zero = m.shift.cwiseAbs().maxCoeff() == 0.0;
    zero_rule += (all_above == f_zero) ? 0 : 1;
  }
  v.require(chol == 0, std::to_string(chol) + " Cholesky failures");
  v.require(recon == 0, std::to_string(recon) + " reconstruction failures");
  v.require(inertia == 0, std::to_string(inertia) + " inertia mismatches");
  v.require(zero_rule == 0, std::to_string(zero_rule) + " F = 0 rule violations");

  auto m2 = [](double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
  };
  const double e1 = (psd_modify(Matrix::Identity(2, 2), 0.01).modified_matrix - Matrix::Identity(2, 2))
                        .cwiseAbs().maxCoeff();
  const double e2 = (psd_modify(m2(1, 0, 0, -1), 0.01).modified_matrix - m2(1, 0, 0, 0.01))
                        .cwiseAbs().maxCoeff();
  const double e3 = (psd_modify(m2(0, 1, 1, 0), 0.5).modified_matrix - m2(0.75, 0.25, 0.25, 0.75))
                        .cwiseAbs().maxCoeff();
  v.require(e1 <= 1e-12 && e2 <= 1e-12 && e3 <= 1e-12, "hand examples");
  v.note("1000 random matrices; hand example errors " + fmt("%.1e", e1) + ", " + fmt("%.1e", e2) +
         ", " + fmt("%.1e", e3));
  return v;
}

Verdict criterion6() {
  Verdict v;
  const Problem p = make_quartic(4);
  const SolveResult r = solve_qls(p, Vector::Ones(4), SolverConfig{}, QSchedule(0.9, 2));
  v.require(r.status == SolveStatus::converged, "quartic did not converge");
  std::vector<double> e;
  for (const auto& rec : r.trace) e.push_back(rec.x.norm());
  e.push_back(r.x_final.norm());
  v.require(e.size() >= 4, "fewer than three steps");
  if (e.size() < 4) return v;
  std::string ratios;
  for (size_t k = e.size() - 3; k < e.size(); ++k) {
    const double ratio = e[k] / e[k - 1];
    ratios += " " + fmt("%.2e", ratio);
    v.require(ratio < 0.1, "ratio " + fmt("%.3g", ratio));
  }
  v.note(std::to_string(r.iterations) + " iterations, last ratios" + ratios);
  return v;
}

Verdict criterion7(const Shared& s) {
  Verdict v;
  double margin = 0.0, min_cos = 1.0;
  size_t runs = 0;
  for (const auto* t : {&s.fc.runs, &s.suite}) {
    for (const auto& r : t->rows) {
      margin = std::min(margin, r.descent_margin);
      min_cos = std::min(min_cos, r.min_cos_theta);
      ++runs;
    }
  }
  v.note(std::to_string(runs) + " runs; min cos(theta) - 1/kappa = " + fmt("%.3e", margin) +
         ", min cos(theta) = " + fmt("%.3e", min_cos));
  v.require(margin >= -1e-10, "cos(theta) below 1/kappa");
  v.require(min_cos > 0.0, "non-descent direction");
  return v;
}

Verdict criterion8() {
  Verdict v;
  std::mt19937_64 rng(8008);
  std::vector<Problem> problems = standard_suite();
  for (double c = 0.1; c < 2.0; c += 0.2) problems.push_back(make_fc(c));
  double worst = 0.0;
  for (const auto& p : problems) {
    for (int t = 0; t < 20; ++t) {
      Vector x(p.dimension);
      for (;;) {
        for (int i = 0; i < p.dimension; ++i) {
          x[i] = p.start_box.center[i] + oracle::uniform(rng, -0.5, 0.5) * p.start_box.side;
        }
        // stay off the x = c seam of fc
        if (p.name.rfind("fc:", 0) != 0 || std::abs(x[0] - std::stod(p.name.substr(3))) > 1e-4) break;
      }
      const double err = check_gradient(p, x);
      worst = std::max(worst, err);
      v.require(err < 1e-5, p.name + " gradient error " + fmt("%.2e", err));
    }
  }
  v.note(std::to_string(problems.size()) + " problems x 20 points, max relative error " +
         fmt("%.2e", worst));
  return v;
}

Verdict criterion9() {
  Verdict v;
  const SqpResult r = solve_qsqp(circle_problem(), SolverConfig{}, QSchedule(0.9, 1));
  Vector xs(2);
  xs << -1, -1;
  v.require(r.status == SolveStatus::converged, "circle status " + to_string(r.status));
  v.require((r.x_final - xs).norm() < 1e-6, "circle solution");
  v.require(r.kkt_residual_final < 1e-5, "circle KKT residual");
  v.require(r.iterations <= 30, "circle took " + std::to_string(r.iterations) + " iterations");
  bool merit = true;
  for (const auto& rec : r.trace) merit = merit && rec.merit_next < rec.merit_value;
  v.require(merit, "merit not strictly decreasing");
  v.note("circle: " + std::to_string(r.iterations) + " iterations, |grad L| = " +
         fmt("%.2e", r.kkt_residual_final));

  bool bitwise = true;
  for (double c : {0.3, 0.5, 1.1}) {
    for (int gamma : {1, 2, 3}) {
      const Problem p = make_fc(c);
      Vector x0(2);
      x0 << c, 0.7;
      const SolveResult a = solve_qls(p, x0, SolverConfig{}, QSchedule(0.9, gamma));
      const SqpResult b = solve_qsqp(unconstrained(p, x0), SolverConfig{}, QSchedule(0.9, gamma));
      for (size_t k = 0; k < 3; ++k) {
        const Vector xa = k < a.trace.size() ? a.trace[k].x : a.x_final;
        const Vector xb = k < b.trace.size() ? b.trace[k].x : b.x_final;
        bitwise = bitwise && xa == xb;
      }
    }
  }
  v.require(bitwise, "unconstrained iterates differ from solve_qls");

  Matrix ai(1, 2);
  ai << -1, 0;
  Vector zero1 = Vector::Zero(1), g(2);
  g << 1, 0;
  const QpSolution s1 = qp_active_set(Matrix::Identity(2, 2), g, Matrix(0, 2), Vector(0), ai, zero1);
  g << -1, 0;
  const QpSolution s2 = qp_active_set(Matrix::Identity(2, 2), g, Matrix(0, 2), Vector(0), ai, zero1);
  Vector d2(2);
  d2 << 1, 0;
  v.require(s1.d_x == Vector::Zero(2) && s1.mu[0] == 1.0, "QP example with active constraint");
  v.require(s2.d_x == d2 && s2.mu[0] == 0.0, "QP example with inactive constraint");
  Matrix aeq(1, 2);
  aeq << 1, -1;
  Vector ones = Vector::Ones(2);
  const KktSolution k1 = kkt_solve(Matrix::Identity(2, 2), ones, aeq, Vector::Zero(1));
  v.require((k1.d + ones).norm() < 1e-14 && std::abs(k1.lambda[0]) < 1e-14, "KKT example");
  return v;
}

Verdict criterion10(const Shared& s) {
  Verdict v;
  BenchmarkTable hand;
  auto add = [&](const char* p, const char* sv, int it) {
    BenchmarkRow r;
    r.problem = p;
    r.solver = sv;
    r.iterations = it;
    r.success = true;
    hand.rows.push_back(r);
  };
  add("p1", "s1", 2);
  add("p1", "s2", 4);
  add("p2", "s1", 10);
  add("p2", "s2", 5);
  const Profile hp = performance_profile(hand, ProfileMetric::iterations);
  const ProfileCurve* c1 = nullptr;
  for (const auto& c : hp.curves)
    if (c.solver == "s1") c1 = &c;
  v.require(c1 && profile_value(*c1, 1.0) == 0.5, "P1(1) != 0.5");
  v.require(c1 && profile_value(*c1, 2.0) == 1.0, "P1(2) != 1");

  int curves = 0;
  for (const auto* t : {&s.fc.runs, &s.suite}) {
    for (auto metric : {ProfileMetric::iterations, ProfileMetric::time}) {
      for (int need : {1, 10}) {
        const Profile p = performance_profile(*t, metric, need);
        for (const auto& c : p.curves) {
          ++curves;
          double prev_tau = 0.0, prev_f = 0.0;
          for (const auto& [tau, f] : c.points) {
            v.require(tau > prev_tau && f >= prev_f && f <= 1.0 && tau >= 1.0,
                      "curve " + c.solver + " not a nondecreasing step function");
            prev_tau = tau;
            prev_f = f;
          }
        }
      }
    }
  }
  v.note("hand dataset exact; " + std::to_string(curves) + " benchmark curves nondecreasing");
  return v;
}

std::string strip_time_column(const std::string& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string field;
    int col = 0;
    while (std::getline(ss, field, ',')) {
      if (col != 6) out += field + ",";
      ++col;
    }
    out += "\n";
  }
  return out;
}

Verdict criterion11(const std::string& cli, const std::string& workdir) {
  Verdict v;
  if (cli.empty()) {
    v.require(false, "no --cli given");
    return v;
  }
  std::vector<std::string> files;
  for (int run = 0; run < 2; ++run) {
    const std::string out = workdir + "/determinism_" + std::to_string(run) + ".csv";
    const std::string cmd = "\"" + cli + "\" bench suite --seed 42 --workers " +
                            std::to_string(run == 0 ? 1 : 4) + " --out \"" + out + "\"";
    const int rc = std::system(cmd.c_str());
    v.require(rc == 0, "command failed: " + cmd);
    files.push_back(out);
  }
  const std::string a = strip_time_column(files[0]);
  const std::string b = strip_time_column(files[1]);
  v.require(!a.empty() && a == b, "non-time columns differ");
  v.note("two invocations (1 and 4 workers), " +
         std::to_string(std::count(a.begin(), a.end(), '\n')) + " lines identical");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, workdir = std::filesystem::temp_directory_path().string();
  bool strict = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) cli = argv[++i];
    else if (arg == "--workdir" && i + 1 < argc) workdir = argv[++i];
    else if (arg == "--strict") strict = true;
    else {
      std::fprintf(stderr, "usage: acceptance [--cli path] [--workdir dir] [--strict]\n");
      return 2;
    }
  }

  Shared shared;
  {
    const auto t0 = std::chrono::steady_clock::now();
    shared.fc = run_fc_benchmark(FcOptions{});
    shared.fc_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    SuiteOptions opt;
    opt.workers = 4;
    shared.suite = run_suite_benchmark(standard_suite(),
                                       {bfgs_solver(), q_solver(1), q_solver(2), q_solver(3)}, opt);
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"fc iteration means within +-2 of the reference", [&] { return criterion1(shared); }},
      {"Q3 <= Q1 + 0.5 on at least 8 of 10 rows", [&] { return criterion2(shared); }},
      {"every q solver beats BFGS on every row", [&] { return criterion3(shared); }},
      {"quadratic exactness", criterion4},
      {"positive-definite modification suite", criterion5},
      {"superlinear signature on the quartic", criterion6},
      {"cos(theta) >= 1/kappa on every benchmark run", [&] { return criterion7(shared); }},
      {"gradient checks", criterion8},
      {"SQP properties", criterion9},
      {"performance profile correctness", [&] { return criterion10(shared); }},
      {"bench suite determinism", [&] { return criterion11(cli, workdir); }},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s criterion %zu: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    for (const auto& d : v.details) std::printf("    %s\n", d.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<size_t>(failed),
              criteria.size());
  return strict && failed ? 1 : 0;
}
