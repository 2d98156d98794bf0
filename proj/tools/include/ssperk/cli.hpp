#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssperk/analysis.hpp"
#include "ssperk/controller.hpp"
#include "ssperk/optimizer.hpp"

namespace ssperk::cli {

[[nodiscard]] std::string_view version() noexcept;

/// "# ssperk <version> seed=<seed> args=<a b c>"
[[nodiscard]] std::string header_line(const std::vector<std::string>& args, std::uint64_t seed);

// analyze -------------------------------------------------------------------

[[nodiscard]] std::string analyze_json(const AnalysisReport& r, const std::string& header,
                                       int indent = 2);
[[nodiscard]] std::string analyze_text(const AnalysisReport& r);

// region --------------------------------------------------------------------

struct RegionWindow {
  double re_min = -6.0;
  double re_max = 2.0;
  double im_min = -4.0;
  double im_max = 4.0;
};

/// Header `re,im,abs_psi`, one row per lattice point.
void write_region_csv(std::ostream& os, const RegionGrid& grid);

// bench ---------------------------------------------------------------------

struct WorkPrecisionRow {
  std::string method;
  std::string problem;
  double tol = 0.0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t nfev = 0;
  double global_error = 0.0;
  double wall_ms = 0.0;
  std::string status;
  std::optional<double> relative_work;  ///< nfev / nfev of the baseline method
};

struct BenchPlan {
  std::vector<std::string> methods;
  std::vector<std::string> problems;
  std::vector<double> tolerances;
  ControllerKind controller = ControllerKind::PID;
  std::optional<std::string> relative_to;
  int threads = 0;  ///< 0: hardware concurrency
};

/// 1e-2, 1e-3, ..., 1e-7.
[[nodiscard]] std::vector<double> default_tolerances();

/// Throws Error(invalid_argument) for empty lists, unknown ids or a ladder
/// that is not strictly decreasing.
void validate(const BenchPlan& plan);

/// One row per (method, problem, tol), sorted by (problem, method, tol).
/// Failed runs are reported through `status`.
[[nodiscard]] std::vector<WorkPrecisionRow> run_bench(const BenchPlan& plan);

/// Header `method,problem,tol,accepted,rejected,nfev,global_error,wall_ms,status`
/// plus `relative_work` when any row carries it.
void write_bench_csv(std::ostream& os, const std::vector<WorkPrecisionRow>& rows);
/// Inverse of write_bench_csv; lines starting with '#' are skipped.
[[nodiscard]] std::vector<WorkPrecisionRow> read_bench_csv(std::istream& is);

// optimize ------------------------------------------------------------------

[[nodiscard]] std::string optimize_json(const std::string& method, const OptimizationReport& r,
                                        const std::string& header, int indent = 2);

// dispatcher ----------------------------------------------------------------

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitStiffness = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitNoSolution = 4;
inline constexpr int kExitStartup = 5;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ssperk::cli
