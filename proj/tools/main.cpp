// Command-line front end: single solves, benchmark-table reproduction at
// configurable scale, the dense spectral-verification grid, and per-apply
// timing sweeps.  All numeric output is locale-independent CSV; errors are
// printed in scientific notation with six significant digits.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pintoc/dense.hpp"
#include "pintoc/kkt.hpp"
#include "pintoc/pcg.hpp"
#include "pintoc/precond.hpp"

using namespace pintoc;

namespace {

constexpr int kExitInvalidConfig = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitSpectrumViolations = 3;

struct RunConfig {
  std::string problem = "example1";
  double gamma = 1e-3;
  int N = 200;
  int m = 31;
  double T_final = 1.0;
  std::string precond = "palpha";
  double alpha = -1.0;  // negative: use the selection rule
  std::string spatial = "sine";
  int cycles = 1;
  double tol = 1e-8;
  int maxit = 500;
  int threads = 0;  // 0: hardware default
  std::string out;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void validate(const RunConfig& cfg) {
  if (cfg.gamma <= 0 || cfg.N <= 0 || cfg.m <= 0 || cfg.T_final <= 0 ||
      cfg.tol <= 0 || cfg.maxit <= 0 || cfg.cycles <= 0 || cfg.threads < 0)
    throw CLI::ValidationError("all numeric parameters must be positive");
  if (cfg.problem != "example1" && cfg.problem != "example2")
    throw CLI::ValidationError("problem must be example1 or example2");
  if (cfg.precond != "palpha" && cfg.precond != "msc" && cfg.precond != "none")
    throw CLI::ValidationError("precond must be palpha, msc or none");
  if (cfg.spatial != "sine" && cfg.spatial != "multigrid")
    throw CLI::ValidationError("spatial must be sine or multigrid");
  if (cfg.spatial == "multigrid") {
    int p = cfg.m + 1;
    while (p % 2 == 0) p /= 2;
    if (p != 1)
      throw CLI::ValidationError("multigrid requires m = 2^l - 1");
  }
}

ControlProblem make_problem(const RunConfig& cfg, double gamma, int N, int m) {
  const SpatialSolver solver =
      cfg.spatial == "sine" ? SpatialSolver::Sine : SpatialSolver::Multigrid;
  return cfg.problem == "example2" ? example2(N, m, gamma, solver)
                                   : example1(N, m, gamma, solver);
}

struct RunRow {
  int iterations = 0;
  double cpu_seconds = 0.0;
  double error = 0.0;
  bool converged = false;
};

RunRow run_one(const RunConfig& cfg, const ControlProblem& prob,
               const std::string& precond) {
  const DiscreteRhs rhs = assemble_rhs(prob);
  const Eigen::VectorXd b = schur_rhs(prob, rhs);
  const LinearOperator A = [&](const Eigen::VectorXd& v) { return apply_K(prob, v); };

  std::unique_ptr<MscPreconditioner> msc;
  std::unique_ptr<PinTPreconditioner> pint;
  LinearOperator Minv;
  if (precond == "palpha") {
    const double alpha = cfg.alpha > 0 ? cfg.alpha
                                       : choose_alpha(prob.tau(), prob.gamma,
                                                      prob.T_final);
    pint = std::make_unique<PinTPreconditioner>(
        prob, alpha, PinTPreconditioner::FactorOrder::TransposeLast, cfg.cycles);
    Minv = [&p = *pint](const Eigen::VectorXd& v) { return p.apply_inverse(v); };
  } else if (precond == "msc") {
    msc = std::make_unique<MscPreconditioner>(prob);
    Minv = [&p = *msc](const Eigen::VectorXd& v) { return p.apply_inverse(v); };
  } else {
    Minv = [](const Eigen::VectorXd& v) { return v; };
  }

  const auto [v, report] = pcg_solve(A, Minv, b, cfg.tol, cfg.maxit);
  const Solution sol = recover_solution(prob, v, rhs);
  return {report.iterations, report.wall_time,
          error_measure(sol.y, sol.p, prob), report.converged};
}

int cmd_solve(const RunConfig& cfg) {
  validate(cfg);
  apply_threads(cfg.threads);
  const ControlProblem prob = make_problem(cfg, cfg.gamma, cfg.N, cfg.m);
  const RunRow row = run_one(cfg, prob, cfg.precond);

  Output out(cfg.out);
  out.stream() << "gamma,N,J,NoU,preconditioner,iterations,cpu_seconds,error,converged\n"
               << sci(cfg.gamma) << ',' << cfg.N << ',' << prob.grid.J << ','
               << 2 * prob.unknowns() << ',' << cfg.precond << ','
               << row.iterations << ',' << sci(row.cpu_seconds) << ','
               << sci(row.error) << ',' << (row.converged ? 1 : 0) << '\n';
  return row.converged ? 0 : kExitNotConverged;
}

struct TableRow {
  double gamma;
  int N, m;
  int iter_palpha, iter_msc;
};

// Reference iteration counts of the two published benchmark tables
// (columns: gamma, N, m, circulant iterations, substitution iterations).
const std::vector<TableRow> kTable1 = {
    {1e-7, 200, 31, 4, 4},  {1e-7, 200, 63, 4, 4},  {1e-7, 200, 127, 4, 4},
    {1e-7, 400, 31, 4, 4},  {1e-7, 400, 63, 4, 4},  {1e-7, 400, 127, 4, 4},
    {1e-7, 800, 31, 4, 4},  {1e-7, 800, 63, 4, 4},  {1e-7, 800, 127, 4, 4},
    {1e-5, 200, 31, 6, 6},  {1e-5, 200, 63, 6, 6},  {1e-5, 200, 127, 6, 6},
    {1e-5, 400, 31, 7, 6},  {1e-5, 400, 63, 7, 6},  {1e-5, 400, 127, 7, 6},
    {1e-5, 800, 31, 7, 6},  {1e-5, 800, 63, 7, 6},  {1e-5, 800, 127, 7, 6},
    {1e-3, 200, 31, 11, 11}, {1e-3, 200, 63, 11, 11}, {1e-3, 200, 127, 11, 11},
    {1e-3, 400, 31, 12, 10}, {1e-3, 400, 63, 11, 11}, {1e-3, 400, 127, 11, 11},
    {1e-3, 800, 31, 12, 10}, {1e-3, 800, 63, 11, 11}, {1e-3, 800, 127, 11, 11},
    {1e-1, 200, 31, 7, 7},  {1e-1, 200, 63, 7, 7},  {1e-1, 200, 127, 7, 7},
    {1e-1, 400, 31, 8, 7},  {1e-1, 400, 63, 7, 7},  {1e-1, 400, 127, 7, 7},
    {1e-1, 800, 31, 8, 7},  {1e-1, 800, 63, 7, 7},  {1e-1, 800, 127, 7, 7},
    {1e1, 200, 31, 4, 4},   {1e1, 200, 63, 4, 4},   {1e1, 200, 127, 4, 4},
    {1e1, 400, 31, 4, 4},   {1e1, 400, 63, 4, 4},   {1e1, 400, 127, 4, 4},
    {1e1, 800, 31, 4, 4},   {1e1, 800, 63, 4, 4},   {1e1, 800, 127, 4, 4},
};

const std::vector<TableRow> kTable2 = {
    {1e-4, 100, 31, 24, 23}, {1e-4, 100, 63, 23, 23}, {1e-4, 100, 127, 23, 23},
    {1e-4, 200, 31, 25, 23}, {1e-4, 200, 63, 24, 23}, {1e-4, 200, 127, 24, 23},
    {1e-4, 400, 31, 25, 23}, {1e-4, 400, 63, 25, 23}, {1e-4, 400, 127, 25, 23},
    {1e-3, 100, 31, 15, 14}, {1e-3, 100, 63, 15, 14}, {1e-3, 100, 127, 15, 14},
    {1e-3, 200, 31, 15, 14}, {1e-3, 200, 63, 15, 14}, {1e-3, 200, 127, 15, 14},
    {1e-3, 400, 31, 15, 14}, {1e-3, 400, 63, 15, 14}, {1e-3, 400, 127, 15, 14},
    {1e-2, 100, 31, 11, 11}, {1e-2, 100, 63, 11, 11}, {1e-2, 100, 127, 11, 11},
    {1e-2, 200, 31, 11, 11}, {1e-2, 200, 63, 11, 11}, {1e-2, 200, 127, 11, 11},
    {1e-2, 400, 31, 11, 11}, {1e-2, 400, 63, 11, 11}, {1e-2, 400, 127, 11, 11},
    {1e-1, 100, 31, 7, 8},   {1e-1, 100, 63, 7, 8},   {1e-1, 100, 127, 7, 8},
    {1e-1, 200, 31, 7, 8},   {1e-1, 200, 63, 7, 8},   {1e-1, 200, 127, 7, 8},
    {1e-1, 400, 31, 8, 7},   {1e-1, 400, 63, 7, 8},   {1e-1, 400, 127, 7, 8},
    {1.0, 100, 31, 5, 6},    {1.0, 100, 63, 5, 6},    {1.0, 100, 127, 5, 6},
    {1.0, 200, 31, 5, 6},    {1.0, 200, 63, 5, 6},    {1.0, 200, 127, 5, 6},
    {1.0, 400, 31, 5, 5},    {1.0, 400, 63, 5, 6},    {1.0, 400, 127, 5, 6},
};

int cmd_reproduce(RunConfig cfg, int table, const std::string& scale) {
  cfg.problem = table == 1 ? "example1" : "example2";
  validate(cfg);
  apply_threads(cfg.threads);
  const std::vector<TableRow>& rows = table == 1 ? kTable1 : kTable2;

  Output out(cfg.out);
  out.stream() << "table,gamma,N,m,J,NoU,preconditioner,iterations,"
                  "expected_iterations,cpu_seconds,error,match\n";
  for (const TableRow& row : rows) {
    if (scale == "desk" && (row.N > 200 || row.m > 31)) continue;
    const ControlProblem prob = make_problem(cfg, row.gamma, row.N, row.m);
    for (const char* precond : {"palpha", "msc"}) {
      const RunRow res = run_one(cfg, prob, precond);
      const int expected =
          std::string(precond) == "palpha" ? row.iter_palpha : row.iter_msc;
      const bool match = res.converged && std::abs(res.iterations - expected) <= 2;
      out.stream() << table << ',' << sci(row.gamma) << ',' << row.N << ','
                   << row.m << ',' << prob.grid.J << ',' << 2 * prob.unknowns()
                   << ',' << precond << ',' << res.iterations << ',' << expected
                   << ',' << sci(res.cpu_seconds) << ',' << sci(res.error) << ','
                   << (match ? 1 : 0) << '\n';
    }
  }
  return 0;
}

int cmd_verify_spectrum(const RunConfig& cfg) {
  apply_threads(cfg.threads);
  const std::vector<VerificationRecord> records = run_verification_grid();
  int violations = 0;
  Output out(cfg.out);
  for (const auto& rec : records) {
    if (!rec.pass) ++violations;
    out.stream() << "check=" << rec.check << " N=" << rec.N << " m=" << rec.m
                 << " gamma=" << sci(rec.gamma) << " alpha=" << sci(rec.alpha)
                 << " min_eig=" << sci(rec.min_eig)
                 << " max_eig=" << sci(rec.max_eig) << " lo=" << rec.lo
                 << " hi=" << rec.hi << " pass=" << (rec.pass ? 1 : 0) << '\n';
  }
  out.stream() << "records=" << records.size() << " violations=" << violations
               << '\n';
  return violations == 0 ? 0 : kExitSpectrumViolations;
}

int cmd_bench(const RunConfig& cfg) {
  validate(cfg);
  apply_threads(cfg.threads);
  const std::vector<int> Ns = {64, 128, 256, 512};
  std::mt19937 rng(1);
  std::normal_distribution<double> dist;

  Output out(cfg.out);
  out.stream() << "kind,N,J,preconditioner,value\n";

  std::vector<double> t_pint, t_msc;
  for (int N : Ns) {
    const ControlProblem prob = make_problem(cfg, cfg.gamma, N, cfg.m);
    const double alpha = cfg.alpha > 0 ? cfg.alpha
                                       : choose_alpha(prob.tau(), prob.gamma,
                                                      prob.T_final);
    const PinTPreconditioner pint(
        prob, alpha, PinTPreconditioner::FactorOrder::TransposeLast, cfg.cycles);
    const MscPreconditioner msc(prob);
    Eigen::VectorXd w(prob.unknowns());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = dist(rng);

    auto best_of = [&](auto&& apply) {
      using clock = std::chrono::steady_clock;
      apply(w);  // warm-up
      double best = 1e300;
      for (int r = 0; r < 3; ++r) {
        const auto t0 = clock::now();
        const Eigen::VectorXd x = apply(w);
        best = std::min(best, std::chrono::duration<double>(clock::now() - t0).count());
        if (!x.allFinite()) return 1e300;
      }
      return best;
    };
    const double tp = best_of([&](const Eigen::VectorXd& v) { return pint.apply_inverse(v); });
    const double tm = best_of([&](const Eigen::VectorXd& v) { return msc.apply_inverse(v); });
    t_pint.push_back(tp);
    t_msc.push_back(tm);
    out.stream() << "apply_seconds," << N << ',' << prob.grid.J << ",palpha,"
                 << sci(tp) << '\n';
    out.stream() << "apply_seconds," << N << ',' << prob.grid.J << ",msc,"
                 << sci(tm) << '\n';
  }

  auto slope = [&](const std::vector<double>& t) {
    const int n = static_cast<int>(t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const double x = std::log(static_cast<double>(Ns[i]));
      const double y = std::log(t[i]);
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  out.stream() << "exponent,,," << "palpha," << sci(slope(t_pint)) << '\n';
  out.stream() << "exponent,,," << "msc," << sci(slope(t_msc)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free all-at-once solver for parabolic optimal control"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; command-line flags win");

  RunConfig cfg;
  auto add_common = [&](CLI::App* sub, bool with_problem) {
    if (with_problem)
      sub->add_option("--problem", cfg.problem, "example1 | example2");
    sub->add_option("--gamma", cfg.gamma, "Control regularization weight");
    sub->add_option("--N", cfg.N, "Number of time points");
    sub->add_option("--m", cfg.m, "Interior grid points per dimension");
    sub->add_option("--T", cfg.T_final, "Time horizon");
    sub->add_option("--precond", cfg.precond, "palpha | msc | none");
    sub->add_option("--alpha", cfg.alpha,
                    "Circulant parameter (omit to use the selection rule)");
    sub->add_option("--spatial", cfg.spatial, "sine | multigrid");
    sub->add_option("--cycles", cfg.cycles, "V-cycles per multigrid block solve");
    sub->add_option("--tol", cfg.tol, "Relative residual tolerance");
    sub->add_option("--maxit", cfg.maxit, "Iteration cap");
    sub->add_option("--threads", cfg.threads, "OpenMP threads (0 = hardware)");
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
  };

  CLI::App* solve = app.add_subcommand("solve", "Run a single solve, emit one CSV row");
  add_common(solve, true);

  int table = 1;
  std::string scale = "desk";
  CLI::App* reproduce =
      app.add_subcommand("reproduce", "Re-run the published benchmark tables");
  reproduce->add_option("--table", table, "1 | 2")->check(CLI::IsMember({1, 2}));
  reproduce->add_option("--scale", scale, "full | desk")
      ->check(CLI::IsMember({"full", "desk"}));
  add_common(reproduce, false);

  CLI::App* verify = app.add_subcommand(
      "verify-spectrum", "Dense eigenvalue windows on the verification grid");
  verify->add_option("--threads", cfg.threads, "OpenMP threads (0 = hardware)");
  verify->add_option("--out", cfg.out, "Output file (default stdout)");

  CLI::App* bench =
      app.add_subcommand("bench", "Per-apply timings over an N sweep at fixed J");
  add_common(bench, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (reproduce->parsed()) return cmd_reproduce(cfg, table, scale);
    if (verify->parsed()) return cmd_verify_spectrum(cfg);
    if (bench->parsed()) return cmd_bench(cfg);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
  return 0;
}
