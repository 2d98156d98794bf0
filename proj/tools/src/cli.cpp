#include "ssperk/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssperk/catalog.hpp"
#include "ssperk/error.hpp"
#include "ssperk/integrator.hpp"
#include "ssperk/problems.hpp"

#ifndef SSPERK_VERSION
#define SSPERK_VERSION "0.0.0"
#endif

namespace ssperk::cli {

using ojson = nlohmann::ordered_json;

namespace {

std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson vector_json(const Eigen::VectorXd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += "\"\"";
    else if (ch == '\n' || ch == '\r') q += ' ';
    else q += ch;
  }
  return q + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  auto workers = static_cast<std::size_t>(threads > 0 ? threads : static_cast<int>(hw));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view version() noexcept { return SSPERK_VERSION; }

std::string header_line(const std::vector<std::string>& args, std::uint64_t seed) {
  std::string h = "# ssperk " + std::string(version()) + " seed=" + std::to_string(seed) + " args=";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) h += ' ';
    h += args[i];
  }
  return h;
}

// analyze -------------------------------------------------------------------

std::string analyze_json(const AnalysisReport& r, const std::string& header, int indent) {
  ojson j;
  j["header"] = header;
  j["id"] = r.id;
  j["p"] = r.p;
  j["p_tilde"] = r.p_tilde;
  j["ssp_main"] = r.ssp_main;
  j["ssp_embedded"] = r.ssp_embedded;
  j["delta_R"] = r.radii.delta_R;
  j["delta_I"] = r.radii.delta_I;
  j["delta_C"] = r.radii.delta_C;
  j["R_psi"] = r.radii.R_psi;
  const auto* e = r.errors ? &*r.errors : nullptr;
  auto field = [&](const char* key, double ErrorMeasures::*m) {
    j[key] = e ? number_or_null(e->*m) : ojson(nullptr);
  };
  field("A2", &ErrorMeasures::A2_main);
  field("Ainf", &ErrorMeasures::Ainf_main);
  field("A2_emb", &ErrorMeasures::A2_emb);
  field("Ainf_emb", &ErrorMeasures::Ainf_emb);
  field("B2", &ErrorMeasures::B2);
  field("Binf", &ErrorMeasures::Binf);
  field("C2", &ErrorMeasures::C2);
  field("Cinf", &ErrorMeasures::Cinf);
  field("D", &ErrorMeasures::D);
  j["non_defective"] = r.non_defective;
  j["exempt_conditions"] = r.exempt;
  return j.dump(indent);
}

std::string analyze_text(const AnalysisReport& r) {
  std::ostringstream os;
  auto line = [&](const char* key, const std::string& value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-14s", key);
    os << buf << value << '\n';
  };
  auto num = [](double v) { return fmt_double(v, "%.10g"); };
  line("id", r.id);
  line("p", std::to_string(r.p));
  line("p_tilde", std::to_string(r.p_tilde));
  line("ssp_main", num(r.ssp_main));
  line("ssp_embedded", num(r.ssp_embedded));
  line("delta_R", num(r.radii.delta_R));
  line("delta_I", num(r.radii.delta_I));
  line("delta_C", num(r.radii.delta_C));
  line("R_psi", num(r.radii.R_psi));
  if (r.errors) {
    const auto& e = *r.errors;
    line("A2", num(e.A2_main));
    line("Ainf", num(e.Ainf_main));
    line("A2_emb", num(e.A2_emb));
    line("Ainf_emb", num(e.Ainf_emb));
    line("B2", num(e.B2));
    line("Binf", num(e.Binf));
    line("C2", num(e.C2));
    line("Cinf", num(e.Cinf));
    line("D", num(e.D));
  }
  line("non_defective", r.non_defective ? "true" : "false");
  if (!r.exempt.empty()) {
    std::string ex;
    for (const auto& s : r.exempt) ex += (ex.empty() ? "" : " ") + s;
    line("exempt", ex);
  }
  return os.str();
}

// region --------------------------------------------------------------------

void write_region_csv(std::ostream& os, const RegionGrid& grid) {
  os << "re,im,abs_psi\n";
  for (std::size_t k = 0; k < grid.abs_psi.size(); ++k) {
    os << fmt_double(grid.re[k], "%.10g") << ',' << fmt_double(grid.im[k], "%.10g") << ','
       << fmt_double(grid.abs_psi[k], "%.12g") << '\n';
  }
}

// bench ---------------------------------------------------------------------

std::vector<double> default_tolerances() { return {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}; }

void validate(const BenchPlan& plan) {
  if (plan.methods.empty()) throw Error(ErrorCode::invalid_argument, "no methods given");
  if (plan.problems.empty()) throw Error(ErrorCode::invalid_argument, "no problems given");
  if (plan.tolerances.empty()) throw Error(ErrorCode::invalid_argument, "no tolerances given");
  for (std::size_t i = 0; i < plan.tolerances.size(); ++i) {
    if (!(plan.tolerances[i] > 0.0))
      throw Error(ErrorCode::invalid_argument, "tolerances must be positive");
    if (i > 0 && !(plan.tolerances[i] < plan.tolerances[i - 1]))
      throw Error(ErrorCode::invalid_argument, "tolerances must be strictly decreasing");
  }
  for (const auto& m : plan.methods) (void)parse_method_id(m);
  if (plan.relative_to) (void)parse_method_id(*plan.relative_to);
  const auto& known = problem_ids();
  for (const auto& p : plan.problems) {
    if (std::find(known.begin(), known.end(), p) == known.end())
      throw Error(ErrorCode::invalid_argument, "unknown problem '" + p + "'");
  }
}

std::vector<WorkPrecisionRow> run_bench(const BenchPlan& plan) {
  validate(plan);
  std::vector<std::string> methods = plan.methods;
  if (plan.relative_to &&
      std::find(methods.begin(), methods.end(), *plan.relative_to) == methods.end())
    methods.push_back(*plan.relative_to);

  std::vector<OdeSystem> problems;
  problems.reserve(plan.problems.size());
  for (const auto& p : plan.problems) problems.push_back(make_problem(p));

  std::vector<Eigen::VectorXd> refs(problems.size());
  std::vector<std::string> ref_errors(problems.size());
  parallel_for(problems.size(), plan.threads, [&](std::size_t i) {
    try {
      refs[i] = reference_solution(problems[i]);
    } catch (const std::exception& e) {
      ref_errors[i] = e.what();
    }
  });

  struct Job {
    std::size_t method;
    std::size_t problem;
    double tol;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (std::size_t m = 0; m < methods.size(); ++m)
      for (double tol : plan.tolerances) jobs.push_back({m, p, tol});

  std::vector<WorkPrecisionRow> rows(jobs.size());
  parallel_for(jobs.size(), plan.threads, [&](std::size_t k) {
    const Job& job = jobs[k];
    WorkPrecisionRow& row = rows[k];
    row.method = methods[job.method];
    row.problem = plan.problems[job.problem];
    row.tol = job.tol;
    row.global_error = std::numeric_limits<double>::quiet_NaN();
    auto t0 = std::chrono::steady_clock::now();
    try {
      const EmbeddedTableau tab = resolve_method(row.method);
      AdaptiveOptions opt;
      opt.atol = opt.rtol = job.tol;
      opt.controller = plan.controller;
      opt.record_log = false;
      const auto res = integrate_adaptive(problems[job.problem], tab, opt);
      row.wall_ms = elapsed_ms(t0);
      row.accepted = res.n_accepted;
      row.rejected = res.n_rejected;
      row.nfev = res.n_fev;
      row.status = std::string(to_string(res.status));
      if (!ref_errors[job.problem].empty()) {
        row.status = "error: reference failed: " + ref_errors[job.problem];
      } else if (res.ok()) {
        row.global_error = global_error(problems[job.problem], res.final_state, refs[job.problem]);
      }
    } catch (const std::exception& e) {
      row.wall_ms = elapsed_ms(t0);
      row.status = std::string("error: ") + e.what();
    }
  });

  if (plan.relative_to) {
    std::map<std::pair<std::string, double>, std::int64_t> base;
    for (const auto& r : rows)
      if (r.method == *plan.relative_to && r.status == "success") base[{r.problem, r.tol}] = r.nfev;
    for (auto& r : rows) {
      auto it = base.find({r.problem, r.tol});
      if (it != base.end() && it->second > 0 && r.status == "success")
        r.relative_work = static_cast<double>(r.nfev) / static_cast<double>(it->second);
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.problem != b.problem) return a.problem < b.problem;
    if (a.method != b.method) return a.method < b.method;
    return a.tol < b.tol;
  });
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<WorkPrecisionRow>& rows) {
  const bool relative =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.relative_work.has_value(); });
  os << "method,problem,tol,accepted,rejected,nfev,global_error,wall_ms,status";
  if (relative) os << ",relative_work";
  os << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.method) << ',' << csv_field(r.problem) << ',' << fmt_double(r.tol) << ','
       << r.accepted << ',' << r.rejected << ',' << r.nfev << ',' << fmt_double(r.global_error)
       << ',' << fmt_double(r.wall_ms, "%.3f") << ',' << csv_field(r.status);
    if (relative) os << ',' << (r.relative_work ? fmt_double(*r.relative_work) : "");
    os << '\n';
  }
}

std::vector<WorkPrecisionRow> read_bench_csv(std::istream& is) {
  std::vector<WorkPrecisionRow> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("method,problem,tol", 0) != 0)
        throw Error(ErrorCode::parse_error, "unexpected bench header: " + line);
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() < 9) throw Error(ErrorCode::parse_error, "short bench row: " + line);
    WorkPrecisionRow r;
    try {
      r.method = f[0];
      r.problem = f[1];
      r.tol = std::stod(f[2]);
      r.accepted = std::stoll(f[3]);
      r.rejected = std::stoll(f[4]);
      r.nfev = std::stoll(f[5]);
      r.global_error = std::strtod(f[6].c_str(), nullptr);
      r.wall_ms = std::stod(f[7]);
      r.status = f[8];
      if (f.size() > 9 && !f[9].empty()) r.relative_work = std::stod(f[9]);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::parse_error, "malformed bench row: " + line);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// optimize ------------------------------------------------------------------

std::string optimize_json(const std::string& method, const OptimizationReport& r,
                          const std::string& header, int indent) {
  ojson j;
  j["header"] = header;
  j["method"] = method;
  j["found"] = r.found;
  j["w_tilde"] = r.found ? vector_json(r.w) : ojson(nullptr);
  j["objective"] = r.found ? number_or_null(r.objective) : ojson(nullptr);
  ojson res = ojson::object();
  for (const auto& [name, value] : r.residuals) res[name] = value;
  j["residuals"] = res;
  ojson screen;
  screen["r"] = r.ssp_r ? ojson(*r.ssp_r) : ojson(nullptr);
  screen["feasible"] = r.ssp_feasible;
  j["ssp_screen"] = screen;
  j["non_defective"] = r.non_defective;
  j["seed"] = r.seed;
  j["evaluations"] = r.evaluations;
  j["starts"] = r.starts;
  j["message"] = r.message;
  return j.dump(indent);
}

// dispatcher ----------------------------------------------------------------

namespace {

struct SnapshotLayout {
  Grid1D grid;
  std::vector<std::string> fields;
};

SnapshotLayout snapshot_layout(const std::string& problem, const OdeSystem& sys) {
  if (problem == "advection")
    return {Grid1D(static_cast<int>(sys.dim()), -1.0, 1.0, Boundary::periodic), {"u"}};
  if (problem == "euler")
    return {Grid1D(static_cast<int>(sys.dim() / 3), 0.0, 1.0, Boundary::outflow),
            {"rho", "u", "p"}};
  throw Error(ErrorCode::invalid_argument, "snapshots need a grid problem (advection, euler)");
}

void write_snapshots(std::ostream& os, const SnapshotLayout& layout,
                     const std::vector<std::pair<double, Eigen::VectorXd>>& samples) {
  os << "t,x";
  for (const auto& f : layout.fields) os << ',' << f;
  os << '\n';
  const int n = layout.grid.n_cells;
  for (const auto& [t, u] : samples) {
    for (int i = 0; i < n; ++i) {
      os << fmt_double(t, "%.10g") << ',' << fmt_double(layout.grid.x(i), "%.10g");
      if (layout.fields.size() == 1) {
        os << ',' << fmt_double(u[i], "%.15g");
      } else {
        const auto w = to_primitive(u[3 * i], u[3 * i + 1], u[3 * i + 2]);
        os << ',' << fmt_double(w.rho, "%.15g") << ',' << fmt_double(w.u, "%.15g") << ','
           << fmt_double(w.p, "%.15g");
      }
      os << '\n';
    }
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::io_error, "cannot write " + path);
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

int exit_code(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::success: return kExitOk;
    case IntegrationStatus::stiffness_failure: return kExitStiffness;
    case IntegrationStatus::budget_failure: return kExitBudget;
    case IntegrationStatus::startup_failure: return kExitStartup;
  }
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Embedded SSP Runge-Kutta pairs: analysis, integration and benchmarks", "ssperk"};
  app.require_subcommand(1);

  bool json = false;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string frozen;
  app.add_flag("--json", json, "JSON instead of text where both exist");
  app.add_option("--seed", seed, "Random seed (optimizer and optimized pairs)");
  app.add_option("--out", out_path, "Write the primary output to this file");
  app.add_option("--frozen", frozen, "Load optimized weights from a JSON file");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Order, SSP, stability and error report");
  std::string an_method;
  analyze_cmd->add_option("method", an_method, "Method id")->required();

  // region
  auto* region_cmd = app.add_subcommand("region", "|psi| on a rectangular lattice as CSV");
  std::string rg_method;
  std::string rg_weights = "main";
  std::vector<double> rg_window;
  int nx = 201;
  int ny = 201;
  region_cmd->add_option("method", rg_method, "Method id")->required();
  region_cmd->add_option("--weights", rg_weights, "main or embedded")
      ->check(CLI::IsMember({"main", "embedded"}));
  region_cmd->add_option("--window", rg_window, "re_min re_max im_min im_max")->expected(4);
  region_cmd->add_option("--nx", nx, "Points along the real axis")->check(CLI::PositiveNumber);
  region_cmd->add_option("--ny", ny, "Points along the imaginary axis")->check(CLI::PositiveNumber);

  // integrate
  auto* integrate_cmd = app.add_subcommand("integrate", "Adaptive integration of a test problem");
  std::string in_method = "ssp2,2-b2";
  std::string in_problem = "vdp";
  std::optional<double> tol;
  std::optional<double> atol;
  std::optional<double> rtol;
  std::string controller = "pid";
  std::optional<double> k1;
  std::optional<double> k2;
  std::optional<double> k3;
  std::string trace;
  std::string snapshot;
  std::vector<double> at;
  bool advancing_order = false;
  std::int64_t max_steps = 10'000'000;
  integrate_cmd->add_option("--method", in_method, "Method id");
  integrate_cmd->add_option("--problem", in_problem, "Problem id")
      ->check(CLI::IsMember(problem_ids()));
  integrate_cmd->add_option("--tol", tol, "Sets both atol and rtol");
  integrate_cmd->add_option("--atol", atol, "Absolute tolerance");
  integrate_cmd->add_option("--rtol", rtol, "Relative tolerance");
  integrate_cmd->add_option("--controller", controller, "i, pi, pid or gustafsson");
  integrate_cmd->add_option("--k1", k1, "Controller gain k1");
  integrate_cmd->add_option("--k2", k2, "Controller gain k2");
  integrate_cmd->add_option("--k3", k3, "Controller gain k3");
  integrate_cmd->add_option("--trace", trace, "Step trace CSV (t,dt,err,accepted)");
  integrate_cmd->add_option("--snapshot", snapshot, "Solution snapshots CSV");
  integrate_cmd->add_option("--at", at, "Snapshot times");
  integrate_cmd->add_flag("--advancing-order", advancing_order,
                          "Use p instead of p_tilde in the controller exponents");
  integrate_cmd->add_option("--max-steps", max_steps, "Step budget");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Work-precision sweep as CSV");
  BenchPlan plan;
  std::string bench_controller = "pid";
  std::string relative_to;
  bench_cmd->add_option("--methods", plan.methods, "Method ids")->required();
  bench_cmd->add_option("--problems", plan.problems, "Problem ids")->required();
  bench_cmd->add_option("--tols", plan.tolerances, "Strictly decreasing tolerances");
  bench_cmd->add_option("--controller", bench_controller, "i, pi, pid or gustafsson");
  bench_cmd->add_option("--relative-to", relative_to, "Normalize nfev by this method");
  bench_cmd->add_option("--threads", plan.threads, "Parallel runs (0: all cores)");

  // optimize
  auto* optimize_cmd = app.add_subcommand("optimize", "Search embedded weights for a method");
  std::string op_method;
  OptimizationSpec spec;
  std::optional<double> require_ssp;
  optimize_cmd->add_option("method", op_method, "Method id")->required();
  optimize_cmd->add_option("--seeds", spec.seeds, "Number of starts")->check(CLI::PositiveNumber);
  optimize_cmd->add_option("--budget", spec.budget, "Objective evaluations over all starts");
  optimize_cmd->add_option("--require-ssp", require_ssp, "Demand SSP feasibility at r");
  optimize_cmd->add_option("--threads", spec.threads, "Worker threads (0: all cores)");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("ssperk");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string header = header_line(args, seed);

  try {
    if (!frozen.empty()) load_frozen_weights(frozen);
    OptimizedPairSettings pair_settings;
    pair_settings.seed = seed;
    set_optimized_pair_settings(pair_settings);

    if (analyze_cmd->parsed()) {
      const auto report = analyze(resolve_method(an_method));
      Output o(out_path, out);
      if (json) {
        o.stream() << analyze_json(report, header) << '\n';
      } else {
        o.stream() << header << '\n' << analyze_text(report);
      }
      return kExitOk;
    }

    if (region_cmd->parsed()) {
      const auto tab = resolve_method(rg_method);
      RegionWindow w;
      if (!rg_window.empty()) w = {rg_window[0], rg_window[1], rg_window[2], rg_window[3]};
      if (!(w.re_min <= w.re_max && w.im_min <= w.im_max))
        throw Error(ErrorCode::invalid_argument, "empty window");
      const Eigen::VectorXd& weights = rg_weights == "main" ? tab.b : tab.embedded();
      const auto grid = stability_region_grid(stability_polynomial(tab.A, weights), w.re_min,
                                              w.re_max, w.im_min, w.im_max, nx, ny);
      Output o(out_path, out);
      o.stream() << header << '\n';
      write_region_csv(o.stream(), grid);
      return kExitOk;
    }

    if (integrate_cmd->parsed()) {
      const auto tab = resolve_method(in_method);
      const auto problem = make_problem(in_problem);
      AdaptiveOptions opt;
      opt.atol = atol.value_or(tol.value_or(1e-4));
      opt.rtol = rtol.value_or(tol.value_or(1e-4));
      opt.controller = parse_controller(controller);
      if (k1 || k2 || k3) {
        auto g = default_gains(opt.controller);
        if (k1) g.k1 = *k1;
        if (k2) g.k2 = *k2;
        if (k3) g.k3 = *k3;
        opt.gains = g;
      }
      opt.control_order = advancing_order ? ControlOrder::advancing : ControlOrder::embedded;
      opt.max_steps = max_steps;
      opt.record_log = !trace.empty();
      std::optional<SnapshotLayout> layout;
      if (!snapshot.empty()) {
        layout = snapshot_layout(in_problem, problem);
        opt.output_times = at.empty() ? std::vector<double>{problem.t_end} : at;
      }

      const auto res = integrate_adaptive(problem, tab, opt);

      if (!trace.empty()) {
        Output t(trace, out);
        t.stream() << header << '\n' << "t,dt,err,accepted\n";
        for (const auto& s : res.step_log) {
          t.stream() << fmt_double(s.t) << ',' << fmt_double(s.dt) << ',' << fmt_double(s.err)
                     << ',' << (s.accepted ? 1 : 0) << '\n';
        }
      }
      if (layout) {
        Output s(snapshot, out);
        s.stream() << header << '\n';
        write_snapshots(s.stream(), *layout, res.samples);
      }

      ojson j;
      j["header"] = header;
      j["method"] = in_method;
      j["problem"] = in_problem;
      j["controller"] = std::string(to_string(opt.controller));
      j["atol"] = opt.atol;
      j["rtol"] = opt.rtol;
      j["status"] = std::string(to_string(res.status));
      j["steps"] = res.total_steps();
      j["accepted"] = res.n_accepted;
      j["rejected"] = res.n_rejected;
      j["nfev"] = res.n_fev;
      j["t_final"] = res.t_final;
      if (res.ok()) {
        j["l2_error"] = number_or_null(
            global_error(problem, res.final_state, reference_solution(problem)));
      } else {
        j["l2_error"] = nullptr;
        j["message"] = res.message;
      }
      Output o(out_path, out);
      o.stream() << j.dump(2) << '\n';
      if (!res.ok()) err << "integrate: " << to_string(res.status) << ": " << res.message << '\n';
      return exit_code(res.status);
    }

    if (bench_cmd->parsed()) {
      if (plan.tolerances.empty()) plan.tolerances = default_tolerances();
      plan.controller = parse_controller(bench_controller);
      if (!relative_to.empty()) plan.relative_to = relative_to;
      const auto rows = run_bench(plan);
      Output o(out_path, out);
      o.stream() << header << '\n';
      write_bench_csv(o.stream(), rows);
      return kExitOk;
    }

    if (optimize_cmd->parsed()) {
      const MethodId id = parse_method_id(op_method);
      spec.tableau = base_method(id);
      spec.target_order = spec.tableau.order - 1;
      spec.require_ssp_at = require_ssp;
      spec.seed = seed;
      const auto report = optimize_embedded(spec);
      Output o(out_path, out);
      o.stream() << optimize_json(to_string(id), report, header) << '\n';
      if (!report.found) {
        err << "optimize: no-solution: " << report.message << '\n';
        return kExitNoSolution;
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace ssperk::cli
