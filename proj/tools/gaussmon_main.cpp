// gaussmon: steady-state analysis, transient comparison, measurement-record
// ensembles, parameter sweeps and the quasi-static squeezing protocol for a
// continuously monitored harmonic oscillator.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaussmon/dynamics.hpp"
#include "gaussmon/errors.hpp"
#include "gaussmon/io.hpp"
#include "gaussmon/kernels.hpp"
#include "gaussmon/model.hpp"
#include "gaussmon/parallel.hpp"
#include "gaussmon/steady_state.hpp"
#include "gaussmon/sweep.hpp"
#include "gaussmon/trajectories.hpp"
#include "gaussmon/version.hpp"

namespace {

using namespace gaussmon;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  double m = 1.0;
  double omega = 1.0;
  double hbar = 2.0;
  std::optional<double> k_x;
  std::optional<double> k_p;
  std::optional<double> q;
  std::optional<double> s;
  double eta_x = 1.0;
  double eta_p = 1.0;
  std::string params_file;
  std::string out_dir = ".";
};

void add_common_flags(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--params", flags->params_file,
                  "JSON parameter file (m, omega, hbar, k_x, k_p, eta_x, "
                  "eta_p); inline flags override");
  cmd->add_option("--m", flags->m, "oscillator mass");
  cmd->add_option("--omega", flags->omega, "oscillator angular frequency");
  cmd->add_option("--hbar", flags->hbar, "reduced Planck constant");
  auto* kx = cmd->add_option("--k-x", flags->k_x, "position strength");
  auto* kp = cmd->add_option("--k-p", flags->k_p, "momentum strength");
  auto* q = cmd->add_option("--q", flags->q, "strength product k_x*k_p");
  auto* s = cmd->add_option("--s", flags->s, "strength ratio k_x/k_p");
  kx->excludes(q)->excludes(s);
  kp->excludes(q)->excludes(s);
  cmd->add_option("--eta-x", flags->eta_x, "position detector efficiency");
  cmd->add_option("--eta-p", flags->eta_p, "momentum detector efficiency");
  cmd->add_option("--out", flags->out_dir, "output directory");
}

ModelParams resolve_params(const CLI::App& cmd, const CommonFlags& flags) {
  ModelParams params;
  if (!flags.params_file.empty()) {
    params = model_params_from_json(read_text_file(flags.params_file));
  }
  const auto take = [&](const char* name, double& slot, double fallback) {
    if (cmd.count(name) > 0) {
      slot = fallback;
    } else if (flags.params_file.empty()) {
      slot = fallback;
    }
  };
  take("--m", params.osc.mass, flags.m);
  take("--omega", params.osc.omega, flags.omega);
  take("--hbar", params.osc.hbar, flags.hbar);
  take("--eta-x", params.det.eta_x, flags.eta_x);
  take("--eta-p", params.det.eta_p, flags.eta_p);

  const bool have_coords = flags.q.has_value() || flags.s.has_value();
  const bool have_strengths = flags.k_x.has_value() || flags.k_p.has_value();
  if (have_coords) {
    StrengthCoords coords{flags.q.value_or(1.0), flags.s.value_or(1.0)};
    const Strengths k = strengths_from_coords(coords);
    params.det.k_x = k.k_x;
    params.det.k_p = k.k_p;
  } else if (have_strengths) {
    params.det.k_x = flags.k_x.value_or(1.0);
    params.det.k_p = flags.k_p.value_or(1.0);
  } else if (flags.params_file.empty()) {
    params.det.k_x = 1.0;
    params.det.k_p = 1.0;
  }
  params.validate();
  return params;
}

std::string out_path(const CommonFlags& flags, const std::string& name) {
  std::filesystem::create_directories(flags.out_dir);
  return (std::filesystem::path(flags.out_dir) / name).string();
}

nlohmann::json params_json(const ModelParams& p) {
  return nlohmann::json{
      {"m", p.osc.mass},         {"omega", p.osc.omega},
      {"hbar", p.osc.hbar},      {"k_x", p.det.k_x},
      {"k_p", p.det.k_p},        {"eta_x", p.det.eta_x},
      {"eta_p", p.det.eta_p},
  };
}

void write_metadata(const CommonFlags& flags, const std::string& command,
                    const ModelParams& params, nlohmann::json extra,
                    const std::vector<std::string>& outputs) {
  nlohmann::json meta{
      {"tool", "gaussmon"},
      {"version", kVersion},
      {"command", command},
      {"params", params_json(params)},
      {"simd", simd_mode_name(resolve_simd_mode(SimdMode::kAuto))},
      {"threads", resolve_thread_count(0)},
      {"outputs", outputs},
  };
  if (extra.is_object()) meta.update(extra);
  write_text_file(out_path(flags, command + "_meta.json"), meta.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// steady

int cmd_steady(const CLI::App& cmd, const CommonFlags& flags, bool to_file) {
  const ModelParams params = resolve_params(cmd, flags);
  const SteadyStateSolution sol =
      steady_state_covariance(params.osc, params.det);
  const PurityInterval interval = purity_interval(params.det);

  nlohmann::json report = nlohmann::json::parse(to_json_string(sol));
  report["purity_interval"] = {interval.lo, interval.hi};
  report["params"] = params_json(params);
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (to_file) {
    write_text_file(out_path(flags, "steady.json"), text);
    write_metadata(flags, "steady", params, {}, {"steady.json"});
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// transient

int cmd_transient(const CLI::App& cmd, const CommonFlags& flags, double v_x0,
                  double c0, double v_p0, double t_final, double dt) {
  const ModelParams params = resolve_params(cmd, flags);
  const SymMat2 sigma0{v_x0, c0, v_p0};
  if (!is_positive_definite(sigma0)) {
    throw InvalidArgumentError("initial covariance must be positive definite");
  }
  const SystemMatrices sys = build_system_matrices(params.osc, params.det);
  const SteadyStateSolution ss =
      steady_state_covariance(params.osc, params.det);
  const CovTrajectory path = integrate_riccati(sigma0, sys, t_final, dt);

  std::optional<TransientEvaluator> closed;
  std::string warning;
  try {
    closed.emplace(sigma0, ss, sys);
  } catch (const InvalidArgumentError& e) {
    warning = e.what();
    std::cerr << "warning: " << warning
              << "; writing the integrated path only\n";
  }

  std::string csv =
      closed ? "t,cf_v_x,cf_c,cf_v_p,rk4_v_x,rk4_c,rk4_v_p,dev_v_x,dev_c,"
               "dev_v_p\n"
             : "t,rk4_v_x,rk4_c,rk4_v_p\n";
  double max_dev = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const SymMat2& rk4 = path.covs[i];
    csv += format_double(path.times[i]);
    if (closed) {
      const SymMat2 cf = closed->at(path.times[i]);
      const SymMat2 dev = cf - rk4;
      max_dev = std::max(max_dev, max_abs(dev));
      for (double v : {cf.xx, cf.xp, cf.pp, rk4.xx, rk4.xp, rk4.pp, dev.xx,
                       dev.xp, dev.pp}) {
        csv += ',';
        csv += format_double(v);
      }
    } else {
      for (double v : {rk4.xx, rk4.xp, rk4.pp}) {
        csv += ',';
        csv += format_double(v);
      }
    }
    csv += '\n';
  }
  write_text_file(out_path(flags, "transient.csv"), csv);

  nlohmann::json extra{{"t_final", t_final},
                       {"dt", dt},
                       {"sigma0", {v_x0, c0, v_p0}},
                       {"closed_form", closed.has_value()}};
  if (closed) {
    extra["max_deviation"] = max_dev;
    std::cout << "max_deviation=" << format_double(max_dev) << "\n";
  } else {
    extra["warning"] = warning;
  }
  write_metadata(flags, "transient", params, extra, {"transient.csv"});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// trajectories

int cmd_trajectories(const CLI::App& cmd, const CommonFlags& flags,
                     std::size_t n_traj, double t_final, double dt,
                     std::uint64_t seed, double mu_x0, double mu_p0,
                     std::size_t max_files, std::size_t record_stride) {
  const ModelParams params = resolve_params(cmd, flags);
  const SystemMatrices sys = build_system_matrices(params.osc, params.det);
  const SteadyStateSolution ss =
      steady_state_covariance(params.osc, params.det);

  // Land the grid exactly on a step multiple.
  const auto n_steps = static_cast<std::size_t>(std::llround(t_final / dt));
  if (n_steps == 0) {
    throw InvalidArgumentError("t-final must cover at least one step");
  }
  const double t_grid = static_cast<double>(n_steps) * dt;
  const CovTrajectory path =
      integrate_riccati(ss.sigma_inf, sys, t_grid, dt);

  EnsembleOptions opt;
  opt.n_traj = n_traj;
  opt.seed = seed;
  opt.record_stride = record_stride;
  opt.keep_records = std::min(max_files, n_traj);
  const EnsembleResult res =
      simulate_ensemble({mu_x0, mu_p0}, path, sys, dt, opt);

  std::vector<std::string> outputs;
  for (std::size_t j = 0; j < res.records.size(); ++j) {
    char name[40];
    std::snprintf(name, sizeof(name), "trajectory_%04zu.csv", j);
    std::ostringstream os;
    write_csv(res.records[j], os);
    write_text_file(out_path(flags, name), os.str());
    outputs.emplace_back(name);
  }
  if (n_traj >= 2) {
    std::ostringstream os;
    write_csv(res.stats, os);
    write_text_file(out_path(flags, "ensemble.csv"), os.str());
    outputs.emplace_back("ensemble.csv");
  }

  write_metadata(flags, "trajectories", params,
                 {{"n", n_traj},
                  {"t_final", t_grid},
                  {"dt", dt},
                  {"seed", seed},
                  {"mu0", {mu_x0, mu_p0}},
                  {"record_stride", record_stride}},
                 outputs);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const CLI::App& cmd, const CommonFlags& flags, bool fig2,
              bool fig3, double q_min, double q_max, std::size_t q_count,
              double s_min, double s_max, std::size_t s_count) {
  SweepGrid grid;
  ModelParams params;
  if (fig2 || fig3) {
    grid = fig2 ? fig2_grid() : fig3_grid();
    params.osc = grid.osc;
    params.det = detector_from_coords({1.0, 1.0}, grid.eff);
  } else {
    params = resolve_params(cmd, flags);
    grid.q_values = log_spaced(q_min, q_max, q_count);
    grid.s_values = log_spaced(s_min, s_max, s_count);
    grid.osc = params.osc;
    grid.eff = {params.det.eta_x, params.det.eta_p};
  }

  const auto rows = purity_surface(grid);
  std::ostringstream os;
  write_csv(rows, os);
  write_text_file(out_path(flags, "surface.csv"), os.str());
  write_metadata(flags, "sweep", params,
                 {{"preset", fig2 ? "fig2" : (fig3 ? "fig3" : "none")},
                  {"q_count", grid.q_values.size()},
                  {"s_count", grid.s_values.size()},
                  {"rows", rows.size()}},
                 {"surface.csv"});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// protocol

int cmd_protocol(const CLI::App& cmd, const CommonFlags& flags, bool fig4,
                 double s_start, double s_end, std::size_t steps,
                 double q_fixed, double level, const std::string& format) {
  QuasiStaticProtocol proto;
  ModelParams params;
  if (fig4) {
    proto = fig4_protocol();
    params.osc = fig_oscillator();
    params.det = detector_from_coords({proto.q_fixed, proto.s_schedule[0]},
                                      fig_efficiencies());
  } else {
    params = resolve_params(cmd, flags);
    if (steps == 0) throw InvalidArgumentError("steps must be >= 1");
    auto schedule = log_spaced(std::min(s_start, s_end),
                               std::max(s_start, s_end), steps);
    if (s_start > s_end) std::reverse(schedule.begin(), schedule.end());
    proto.s_schedule = std::move(schedule);
    proto.q_fixed = q_fixed;
  }
  const Efficiencies eff{params.det.eta_x, params.det.eta_p};

  const auto points = run_quasi_static(proto, params.osc, eff, level);

  std::vector<std::string> outputs;
  if (format == "csv" || format == "both") {
    std::ostringstream os;
    write_protocol_csv(points, proto.q_fixed, os);
    write_text_file(out_path(flags, "protocol.csv"), os.str());
    outputs.emplace_back("protocol.csv");
  }
  if (format == "svg" || format == "both") {
    write_text_file(out_path(flags, "protocol.svg"), protocol_svg(points));
    outputs.emplace_back("protocol.svg");
  }

  // Squeeze summary: raw covariance and normalized correlation coefficient
  // at the last point, to identify which one a reader should compare.
  const auto& last = points.back().solution.sigma_inf;
  const double normalized = last.xp / std::sqrt(last.xx * last.pp);
  std::cout << "purity_start=" << format_double(points.front().solution.p_inf)
            << " purity_end=" << format_double(points.back().solution.p_inf)
            << "\ncovariance_end=" << format_double(last.xp)
            << " correlation_coefficient_end=" << format_double(normalized)
            << "\n";

  write_metadata(flags, "protocol", params,
                 {{"preset", fig4 ? "fig4" : "none"},
                  {"q_fixed", proto.q_fixed},
                  {"schedule_len", proto.s_schedule.size()},
                  {"level", level},
                  {"purity_start", points.front().solution.p_inf},
                  {"purity_end", points.back().solution.p_inf},
                  {"covariance_end", last.xp},
                  {"correlation_coefficient_end", normalized}},
                 outputs);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-state dynamics of a continuously monitored "
               "quantum harmonic oscillator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags steady_flags;
  auto* steady = app.add_subcommand(
      "steady", "closed-form stationary covariance, determinant and purity");
  add_common_flags(steady, &steady_flags);
  bool steady_to_file = false;
  steady->add_flag("--write", steady_to_file,
                   "also write steady.json and metadata to --out");

  CommonFlags tr_flags;
  auto* transient = app.add_subcommand(
      "transient", "closed-form transient against the integrated path");
  add_common_flags(transient, &tr_flags);
  double v_x0 = 0.0, c0 = 0.0, v_p0 = 0.0, tr_tfinal = 10.0, tr_dt = 1e-3;
  transient->add_option("--v-x0", v_x0, "initial position variance")
      ->required();
  transient->add_option("--c0", c0, "initial covariance")->required();
  transient->add_option("--v-p0", v_p0, "initial momentum variance")
      ->required();
  transient->add_option("--t-final", tr_tfinal, "integration horizon");
  transient->add_option("--dt", tr_dt, "integrator step");

  CommonFlags tj_flags;
  auto* traj = app.add_subcommand(
      "trajectories", "measurement-record ensemble with statistics");
  add_common_flags(traj, &tj_flags);
  std::size_t tj_n = 1, tj_max_files = 10, tj_stride = 1;
  double tj_tfinal = 5.0, tj_dt = 1e-3, mu_x0 = 0.0, mu_p0 = 0.0;
  std::uint64_t tj_seed = 0;
  traj->add_option("--n", tj_n, "number of trajectories");
  traj->add_option("--t-final", tj_tfinal, "horizon");
  traj->add_option("--dt", tj_dt, "step");
  traj->add_option("--seed", tj_seed, "ensemble seed");
  traj->add_option("--mu-x0", mu_x0, "initial mean position");
  traj->add_option("--mu-p0", mu_p0, "initial mean momentum");
  traj->add_option("--max-files", tj_max_files,
                   "cap on per-trajectory CSV files");
  traj->add_option("--record-stride", tj_stride,
                   "record every k-th step");

  CommonFlags sw_flags;
  auto* sweep = app.add_subcommand(
      "sweep", "stationary purity over a (q, s) strength grid");
  add_common_flags(sweep, &sw_flags);
  bool fig2 = false, fig3 = false;
  double q_min = 1e-3, q_max = 1e3, s_min = 1e-3, s_max = 1e3;
  std::size_t q_count = 101, s_count = 101;
  sweep->add_flag("--fig2", fig2, "bundled surface preset");
  sweep->add_flag("--fig3", fig3, "bundled ratio-cut preset");
  sweep->add_option("--q-min", q_min, "grid lower bound for q");
  sweep->add_option("--q-max", q_max, "grid upper bound for q");
  sweep->add_option("--q-count", q_count, "grid points in q");
  sweep->add_option("--s-min", s_min, "grid lower bound for s");
  sweep->add_option("--s-max", s_max, "grid upper bound for s");
  sweep->add_option("--s-count", s_count, "grid points in s");

  CommonFlags pr_flags;
  auto* protocol = app.add_subcommand(
      "protocol", "quasi-static squeeze with confidence ellipses");
  add_common_flags(protocol, &pr_flags);
  bool fig4 = false;
  double s_start = 3.0, s_end = 1e-4, level = kOneSigmaMass;
  std::size_t pr_steps = 21;
  std::string pr_format = "both";
  protocol->add_flag("--fig4", fig4, "bundled squeeze preset");
  protocol->add_option("--s-start", s_start, "first ratio in the schedule");
  protocol->add_option("--s-end", s_end, "last ratio in the schedule");
  protocol->add_option("--steps", pr_steps, "schedule length");
  protocol->add_option("--level", level, "ellipse probability mass");
  protocol->add_option("--format", pr_format, "csv, svg or both")
      ->check(CLI::IsMember({"csv", "svg", "both"}));

  try {
    app.parse(argc, argv);
    if (steady->parsed()) {
      return cmd_steady(*steady, steady_flags, steady_to_file);
    }
    if (transient->parsed()) {
      return cmd_transient(*transient, tr_flags, v_x0, c0, v_p0, tr_tfinal,
                           tr_dt);
    }
    if (traj->parsed()) {
      return cmd_trajectories(*traj, tj_flags, tj_n, tj_tfinal, tj_dt,
                              tj_seed, mu_x0, mu_p0, tj_max_files, tj_stride);
    }
    if (sweep->parsed()) {
      return cmd_sweep(*sweep, sw_flags, fig2, fig3, q_min, q_max, q_count,
                       s_min, s_max, s_count);
    }
    if (protocol->parsed()) {
      // The common --q flag doubles as the protocol's fixed product.
      return cmd_protocol(*protocol, pr_flags, fig4, s_start, s_end, pr_steps,
                          pr_flags.q.value_or(1.0), level, pr_format);
    }
    return kExitInvalid;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  } catch (const InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
