#include "commands.hpp"

#include "csv.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fracpoint::app {

namespace fs = std::filesystem;

namespace {

fs::path output_dir(const RunConfig& config, const CommandOptions& options) {
  return options.out.value_or(config.output_dir);
}

std::uint64_t seed(const RunConfig& config, const CommandOptions& options) {
  return options.seed.value_or(config.seed);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

class Log {
public:
  Log(Streams io, bool quiet) : io_(io), quiet_(quiet) {}

  template <typename... Args>
  void info(fmt::format_string<Args...> format, Args&&... args) const {
    if (!quiet_) io_.out << fmt::format(format, std::forward<Args>(args)...) << '\n';
  }
  template <typename... Args>
  void warn(fmt::format_string<Args...> format, Args&&... args) const {
    io_.err << "warning: " << fmt::format(format, std::forward<Args>(args)...) << '\n';
  }

private:
  Streams io_;
  bool quiet_;
};

ReportOptions report_options(const RunConfig& config, const CommandOptions& options) {
  ReportOptions out;
  out.seed = seed(config, options);
  return out;
}

}  // namespace

std::string format_report(const OptimalityReport& r) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& value) { out << key << '=' << value << '\n'; };
  line("cost", exact(r.cost));
  line("fixed_point_residual", exact(r.fixed_point_residual));
  line("gradient_l2_norm", exact(l2_norm(r.gradient)));
  line("tolerance_gradient", exact(r.tolerances.gradient));
  line("tolerance_active", exact(r.tolerances.active));
  line("sign_violations", std::to_string(r.sign_violations.total()));
  line("sign_violations_interior", std::to_string(r.sign_violations.interior));
  line("sign_violations_lower", std::to_string(r.sign_violations.lower));
  line("sign_violations_upper", std::to_string(r.sign_violations.upper));
  line("active_fraction_lower", exact(r.active_sets.lower));
  line("active_fraction_upper", exact(r.active_sets.upper));
  line("inactive_fraction", exact(r.active_sets.inactive));
  line("strongly_active_fraction", exact(r.active_sets.strongly_active));
  line("second_order_directions", std::to_string(r.second_order_samples.size()));
  line("degenerate_directions", std::to_string(r.degenerate_directions));
  line("second_order_min", exact(r.min_second_order()));
  line("growth_estimate", exact(r.growth_estimate));
  line("growth_radius", exact(r.growth_radius));
  line("growth_samples", std::to_string(r.growth_samples));
  return out.str();
}

std::string verification_json(const VerificationSummary& summary, const VerifyOptions& options) {
  nlohmann::ordered_json doc;
  doc["s"] = options.s;
  doc["theta"] = options.theta;
  doc["K"] = options.modes;
  doc["seed"] = options.seed;
  doc["passed"] = summary.passed();
  doc["counts"] = {{"pass", summary.count(ProbeStatus::pass)},
                   {"fail", summary.count(ProbeStatus::fail)},
                   {"inconclusive", summary.count(ProbeStatus::inconclusive)}};
  auto& probes = doc["probes"] = nlohmann::ordered_json::array();
  for (const auto& p : summary.probes) {
    nlohmann::ordered_json entry;
    entry["name"] = p.name;
    entry["status"] = to_string(p.status);
    entry["measured"] = std::isfinite(p.measured) ? nlohmann::ordered_json(p.measured) : nlohmann::ordered_json();
    entry["threshold"] = p.threshold;
    entry["detail"] = p.detail;
    probes.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

int verification_exit(const VerificationSummary& summary, Streams io, bool quiet) {
  const Log log(io, quiet);
  for (const auto& probe : summary.probes) {
    log.info("{:<13} {} ({})", to_string(probe.status), probe.name, probe.detail);
    if (probe.status == ProbeStatus::inconclusive) log.warn("{} is inconclusive: {}", probe.name, probe.detail);
  }
  log.info("{} passed, {} failed, {} inconclusive", summary.count(ProbeStatus::pass),
           summary.count(ProbeStatus::fail), summary.count(ProbeStatus::inconclusive));
  if (summary.passed()) return kOk;
  io.err << "error: verification failed:";
  for (const auto& probe : summary.probes) {
    if (probe.status == ProbeStatus::fail) io.err << ' ' << probe.name;
  }
  io.err << '\n';
  return kVerificationFailed;
}

int cmd_solve_state(const RunConfig& config, const CommandOptions& options, Streams io) {
  const Log log(io, options.quiet);
  const ControlProblem prob = build_problem(config);
  const GridFunction q = initial_control(config, prob);
  const auto solution = solve_semilinear(prob.forcing + q, prob.nonlinearity, prob.basis, prob.newton);
  const fs::path dir = output_dir(config, options);
  write_coefficients(dir / "state_coefficients.csv", solution.state);
  write_grid(dir / "state_grid.csv", synthesize(solution.state, prob.cells()));

  log.info("newton_iterations={}", solution.iterations);
  log.info("final_residual={}", exact(solution.residuals.back()));
  log.info("state_h2s_norm={}", exact(hr_norm(solution.state, 2.0 * prob.basis.s())));
  log.info("state_max_grid_norm={}", exact(synthesize(solution.state, prob.cells()).max_abs()));
  if (config.forcing.preset == ForcingPreset::manufactured) {
    const SpectralField exact_state = to_field(config.forcing.modes, config.modes);
    if (q.max_abs() == 0.0) {
      const double error = (solution.state.coeffs - exact_state.coeffs).cwiseAbs().maxCoeff();
      log.info("recovery_error={}", exact(error));
    } else {
      log.warn("initial control is nonzero; the manufactured state is not the solution");
    }
  }
  return kOk;
}

int cmd_solve_adjoint(const RunConfig& config, const CommandOptions& options, Streams io) {
  const Log log(io, options.quiet);
  const ControlProblem prob = build_problem(config);
  const GridFunction q = initial_control(config, prob);
  const SpectralField u = state(q, prob);
  const auto report = adjoint(q, u, prob);
  const fs::path dir = output_dir(config, options);
  write_coefficients(dir / "adjoint_coefficients.csv", report.solution);
  write_grid(dir / "adjoint_grid.csv", synthesize(report.solution, prob.cells()));

  log.info("measure_norm={}", exact(report.measure_norm.value_or(0.0)));
  log.info("rhs_dual_norm={}", exact(report.rhs_dual_norm));
  log.info("adjoint_norm={}", exact(report.solution_norm));
  log.info("stability_ratio={}", exact(report.stability_ratio));
  return kOk;
}

int cmd_optimize(const RunConfig& config, const CommandOptions& options, Streams io) {
  const Log log(io, options.quiet);
  const ControlProblem prob = build_problem(config);
  OptimizeOptions opt;
  opt.tolerance = config.tolerance;
  opt.max_iterations = config.max_iterations;
  const auto result = optimize(prob, initial_control(config, prob), opt);

  const fs::path dir = output_dir(config, options);
  const SpectralField u = state(result.control, prob);
  const auto p = adjoint(result.control, u, prob);
  write_grid(dir / "control_grid.csv", result.control);
  write_coefficients(dir / "state_coefficients.csv", u);
  write_coefficients(dir / "adjoint_coefficients.csv", p.solution);
  write_history(dir / "history.csv", result.history);

  const auto report = stationarity_report(result.control, prob, report_options(config, options));
  std::string text = format_report(report);
  text += "converged=" + std::string(result.converged ? "true" : "false") + "\n";
  text += "iterations=" + std::to_string(result.history.records.size()) + "\n";
  text += "optimizer_residual=" + exact(result.residual) + "\n";
  text += "control_l2_norm=" + exact(l2_norm(result.control)) + "\n";
  text += "state_h2s_norm=" + exact(hr_norm(u, 2.0 * prob.basis.s())) + "\n";
  text += "adjoint_norm=" + exact(p.solution_norm) + "\n";
  write_text(dir / "optimality_report.txt", text);

  log.info("cost={}", exact(report.cost));
  log.info("fixed_point_residual={}", exact(report.fixed_point_residual));
  log.info("iterations={}", result.history.records.size());
  if (!result.converged) {
    io.err << "error: optimizer did not converge: " << result.message << " (best iterate written to " << dir.string()
           << ")\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_verify(const RunConfig& config, const CommandOptions& options, Streams io) {
  VerifyOptions vo;
  vo.s = config.s;
  vo.theta = config.theta;
  vo.modes = config.modes;
  vo.seed = seed(config, options);
  vo.inject_hessian_sign_fault = config.inject_fault;
  const auto summary = run_verification_suite(vo);
  write_text(output_dir(config, options) / "verification.json", verification_json(summary, vo));
  return verification_exit(summary, io, options.quiet);
}

int cmd_report(const RunConfig& config, const CommandOptions& options, Streams io) {
  const Log log(io, options.quiet);
  const ControlProblem prob = build_problem(config);
  GridFunction q = initial_control(config, prob);
  if (options.control) {
    q = read_grid(*options.control);
    if (q.cells() != prob.cells()) {
      throw ConfigError(fmt::format("{}: control has {} cells per side, the config uses {}",
                                    options.control->string(), q.cells(), prob.cells()));
    }
  }
  const auto report = stationarity_report(q, prob, report_options(config, options));
  const fs::path dir = output_dir(config, options);
  write_text(dir / "optimality_report.txt", format_report(report));
  log.info("cost={}", exact(report.cost));
  log.info("fixed_point_residual={}", exact(report.fixed_point_residual));
  log.info("sign_violations={}", report.sign_violations.total());
  log.info("second_order_min={}", exact(report.min_second_order()));
  return kOk;
}

int run(const std::string& command, const fs::path& config_path, const CommandOptions& options, Streams io) {
  try {
    const RunConfig config = load_config(config_path);
    if (command == "solve-state") return cmd_solve_state(config, options, io);
    if (command == "solve-adjoint") return cmd_solve_adjoint(config, options, io);
    if (command == "optimize") return cmd_optimize(config, options, io);
    if (command == "verify") return cmd_verify(config, options, io);
    if (command == "report") return cmd_report(config, options, io);
    io.err << "error: unknown command '" << command << "'\n";
    return kConfig;
  } catch (const ConfigurationError& e) {
    io.err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    io.err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const SolverError& e) {
    io.err << "error: " << e.what() << '\n';
    return kSolver;
  } catch (const Error& e) {
    io.err << "error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kUnexpected;
  }
}

}  // namespace fracpoint::app
