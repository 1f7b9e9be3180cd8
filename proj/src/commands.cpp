#include "asymmap/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace asymmap {

using nlohmann::json;

namespace {

json state_json(const RsState& s) {
  return {{"chi", s.chi}, {"p", s.p}, {"theta", s.theta}, {"theta0", s.theta0}, {"lambda", s.lambda}};
}

json diag_json(const SolverDiagnostics& d) {
  return {{"iterations", d.iterations},
          {"residual", d.residual},
          {"converged", d.converged},
          {"damping", d.damping},
          {"damping_halvings", d.damping_halvings},
          {"multiple_solutions", d.multiple_solutions}};
}

json prediction_json(const ReplicaPrediction& p) {
  json dw = json::object();
  for (std::size_t k = 0; k < p.distortions.size(); ++k) {
    dw[std::string(distortion_name(p.distortions[k].kind))] = p.weighted[k];
  }
  json blocks = json::array();
  for (const auto& b : p.per_block) {
    json dist = json::object();
    for (std::size_t k = 0; k < p.distortions.size(); ++k) {
      dist[std::string(distortion_name(p.distortions[k].kind))] = b.dist[k];
    }
    blocks.push_back({{"block", b.block}, {"fraction", b.fraction}, {"w", b.w}, {"se", b.se},
                      {"cz", b.cz}, {"distortion", dist}});
  }
  return {{"mse", p.mse}, {"D_w", dw}, {"per_block", blocks}, {"state", state_json(p.state)},
          {"diagnostics", diag_json(p.diag)}};
}

std::string prediction_csv(const ReplicaPrediction& p) {
  std::ostringstream os;
  os.precision(12);
  os << "block,fraction,w,se";
  for (const auto& d : p.distortions) os << ',' << distortion_name(d.kind);
  os << '\n';
  for (const auto& b : p.per_block) {
    os << b.block << ',' << b.fraction << ',' << b.w << ',' << b.se;
    for (double v : b.dist) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

double require_lambda(const RunConfig& cfg, const char* command) {
  if (!cfg.lambda) {
    throw ConfigError("lambda", std::string(command) + " needs 'lambda' or an enabled 'tune' section");
  }
  return *cfg.lambda;
}

const SweepConfig& require_sweep(const RunConfig& cfg, const char* command) {
  if (!cfg.sweep) throw ConfigError("sweep", std::string(command) + " needs a 'sweep' section");
  return *cfg.sweep;
}

json tune_json(const TuneResult& t) {
  return {{"lambda_star", t.lambda_star},
          {"mse_star", t.mse_star},
          {"at_lower_edge", t.at_lower_edge},
          {"at_upper_edge", t.at_upper_edge},
          {"evaluations", t.evaluations},
          {"failed_evaluations", t.failed_evaluations},
          {"state", state_json(t.solution.state)},
          {"diagnostics", diag_json(t.solution.diag)}};
}

json rate_json(const RateResult& r) {
  json j{{"status", std::string(rate_status_name(r.status))},
         {"lambda_star", r.lambda_star},
         {"mse", r.mse},
         {"probes", r.probes},
         {"state", state_json(r.solution.state)}};
  j["R_t"] = r.status == RateStatus::Ok ? json(r.rate) : json(std::string(rate_status_name(r.status)));
  return j;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

void check_finite(const json& j, const std::string& path) {
  if (j.is_null()) throw InternalError("null value in output at " + (path.empty() ? "<root>" : path));
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw InternalError("non-finite number in output at " + path);
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      check_finite(*it, path.empty() ? it.key() : path + "." + it.key());
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) check_finite(j[i], path + "[" + std::to_string(i) + "]");
  }
}

CommandResult cmd_predict(const RunConfig& cfg, std::size_t threads) {
  const auto ens = cfg.make_ensemble();
  CommandResult out;
  json j{{"command", "predict"}};
  double lambda;
  if (cfg.tune.enabled) {
    const auto t = tune_lambda(cfg.model, ens, cfg.penalties, cfg.tune_options());
    j["tune"] = tune_json(t);
    lambda = t.lambda_star;
  } else {
    lambda = require_lambda(cfg, "predict");
  }
  const auto opts = cfg.solve_options();
  auto sol = solve_rs(cfg.model, ens, cfg.penalties, lambda, opts);
  if (cfg.solver.multi_start) {
    auto grid = default_start_grid(cfg.model);
    if (opts.init_chi || opts.init_p) {
      grid.insert(grid.begin(), {opts.init_chi.value_or(1e-3), opts.init_p.value_or(cfg.model.second_moment())});
    }
    const auto ms = multi_start(cfg.model, ens, cfg.penalties, lambda, grid, opts, threads);
    sol.diag.multiple_solutions = ms.multiple;
    json all = json::array();
    for (const auto& s : ms.solutions) all.push_back({{"state", state_json(s.state)}, {"diagnostics", diag_json(s.diag)}});
    j["multi_start"] = {{"solutions", all}, {"multiple", ms.multiple}, {"dropped", ms.dropped}};
  }
  auto pred = predict(sol.state, cfg.model, cfg.penalties, cfg.distortions, opts.quadrature);
  pred.diag = sol.diag;
  j["lambda"] = lambda;
  j["state"] = state_json(sol.state);
  j["diagnostics"] = diag_json(sol.diag);
  j["prediction"] = prediction_json(pred);
  out.canonical = std::move(j);
  out.csv = prediction_csv(pred);
  return out;
}

CommandResult cmd_tune(const RunConfig& cfg, std::size_t) {
  const auto t = tune_lambda(cfg.model, cfg.make_ensemble(), cfg.penalties, cfg.tune_options());
  CommandResult out;
  out.canonical = {{"command", "tune"}, {"tune", tune_json(t)}};
  std::ostringstream os;
  os.precision(12);
  os << "lambda_star,mse_star,at_lower_edge,at_upper_edge\n"
     << t.lambda_star << ',' << t.mse_star << ',' << (t.at_lower_edge ? 1 : 0) << ','
     << (t.at_upper_edge ? 1 : 0) << '\n';
  out.csv = os.str();
  return out;
}

CommandResult cmd_rt(const RunConfig& cfg, std::size_t) {
  const auto& sw = require_sweep(cfg, "rt");
  const double mse0 = db_to_linear(sw.mse0_db);
  const auto r = threshold_rate(cfg.model, cfg.make_ensemble(), cfg.penalties, mse0, cfg.rate_options());
  CommandResult out;
  out.canonical = {{"command", "rt"}, {"mse0_db", sw.mse0_db}, {"mse0", mse0}, {"rate", rate_json(r)}};
  std::ostringstream os;
  os.precision(12);
  os << "R_t,lambda_star,mse_at_Rt,chi,p\n";
  if (r.status == RateStatus::Ok) {
    os << r.rate;
  } else {
    os << rate_status_name(r.status);
  }
  os << ',' << r.lambda_star << ',' << r.mse << ',' << r.solution.state.chi << ','
     << r.solution.state.p << '\n';
  out.csv = os.str();
  return out;
}

CommandResult cmd_sweep(const RunConfig& cfg, std::size_t threads) {
  const auto& sw = require_sweep(cfg, "sweep");
  if (sw.grid.empty()) throw ConfigError("sweep.grid", "sweep needs a c grid");
  std::vector<std::size_t> blocks = sw.c_blocks;
  if (blocks.empty()) {
    for (std::size_t j = 1; j < cfg.model.blocks.size(); ++j) blocks.push_back(j);
    if (blocks.empty()) blocks.push_back(0);
  }
  const double mse0 = db_to_linear(sw.mse0_db);
  const auto r = sweep_c(cfg.model, cfg.make_ensemble(), cfg.penalties, sw.grid, blocks, mse0,
                         cfg.rate_options(), threads);
  CommandResult out;
  json pts = json::array();
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& pt = r.points[i];
    json p{{"c", pt.axis}, {"rate", rate_json(pt.rate)}, {"converged", pt.converged},
           {"argmax", i == r.argmax}};
    if (pt.prediction) p["prediction"] = prediction_json(*pt.prediction);
    pts.push_back(std::move(p));
  }
  out.canonical = {{"command", "sweep"}, {"mse0_db", sw.mse0_db}, {"mse0", mse0},
                   {"c_blocks", blocks}, {"points", pts}, {"argmax_c", r.points[r.argmax].axis}};
  out.csv = sweep_csv(r);
  return out;
}

CommandResult cmd_validate(const RunConfig& cfg, std::size_t threads) {
  if (!cfg.simulate) throw ConfigError("simulate", "validate needs a 'simulate' section");
  if (cfg.ensemble.kind != EnsembleKind::MarcenkoPastur) {
    throw ConfigError("ensemble.kind", "validate simulates i.i.d. Gaussian matrices; use marcenko_pastur");
  }
  json j{{"command", "validate"}};
  auto spec = cfg.validation_spec();
  if (cfg.tune.enabled) {
    const auto t = tune_lambda(cfg.model, cfg.make_ensemble(), cfg.penalties, cfg.tune_options());
    j["tune"] = tune_json(t);
    spec.lambda = t.lambda_star;
  } else {
    spec.lambda = require_lambda(cfg, "validate");
  }
  const auto rep = run_validation(cfg.model, cfg.penalties, cfg.distortions, spec, threads);

  json blocks = json::array();
  for (const auto& b : rep.blocks) {
    json rows = json::object();
    for (std::size_t k = 0; k < rep.distortions.size(); ++k) {
      rows[std::string(distortion_name(rep.distortions[k].kind))] = {
          {"empirical", b.mean[k]}, {"stderr", b.stderr_[k]}, {"replica", b.replica[k]},
          {"delta", b.mean[k] - b.replica[k]}};
    }
    blocks.push_back({{"block", b.block}, {"size", b.size}, {"distortion", rows}, {"mse_z", b.mse_z}});
  }
  json laws = json::array();
  for (const auto& l : rep.laws) {
    laws.push_back({{"condition", l.condition},
                    {"samples", l.empirical.count},
                    {"decoupled_samples", l.decoupled.count},
                    {"tv", l.tv},
                    {"empirical_atom", l.empirical.normalized().atom},
                    {"decoupled_atom", l.decoupled.normalized().atom}});
  }
  j["lambda"] = spec.lambda;
  j["solver"] = std::string(solver_name(rep.solver));
  j["N"] = rep.n;
  j["K"] = rep.k;
  j["trials"] = rep.trials;
  j["seed"] = spec.seed;
  j["flagged"] = rep.flagged;
  j["mse"] = {{"empirical", rep.mse_mean}, {"stderr", rep.mse_stderr}, {"replica", rep.mse_replica},
              {"relative_delta", rep.mse_relative_delta}, {"max_block_z", rep.max_block_z}};
  j["blocks"] = blocks;
  j["laws"] = laws;
  j["prediction"] = prediction_json(rep.prediction);
  j["gates"] = {{"mse_relative", rep.gate_mse_relative}, {"block_sigma", rep.gate_block_sigma},
                {"tv", rep.gate_tv}, {"passed", rep.passed()}};

  CommandResult out;
  out.canonical = std::move(j);
  out.exit_code = rep.passed() ? kExitOk : kExitGate;
  if (!cfg.output.histograms_dir.empty()) {
    std::filesystem::create_directories(cfg.output.histograms_dir);
    for (std::size_t l = 0; l < rep.laws.size(); ++l) {
      std::ofstream f(std::filesystem::path(cfg.output.histograms_dir) /
                      ("law_" + std::to_string(l) + ".csv"));
      f << law_csv(rep.laws[l]);
    }
  }
  std::ostringstream os;
  os.precision(12);
  os << "block,size,mse_empirical,mse_stderr,mse_replica,mse_z\n";
  const auto sq = std::find_if(rep.distortions.begin(), rep.distortions.end(),
                               [](auto d) { return d.kind == DistortionKind::SquaredError; });
  for (const auto& b : rep.blocks) {
    os << b.block << ',' << b.size;
    if (sq != rep.distortions.end()) {
      const auto k = static_cast<std::size_t>(sq - rep.distortions.begin());
      os << ',' << b.mean[k] << ',' << b.stderr_[k] << ',' << b.replica[k] << ',' << b.mse_z;
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  out.csv = os.str();
  return out;
}

int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = load_config(opts.config);
    if (opts.seed) {
      if (!cfg.simulate) cfg.simulate = SimulateConfig{};
      cfg.simulate->seed = *opts.seed;
    }
    const std::size_t threads = std::max<std::size_t>(opts.threads, 1);
    CommandResult r;
    if (opts.command == "predict") {
      r = cmd_predict(cfg, threads);
    } else if (opts.command == "tune") {
      r = cmd_tune(cfg, threads);
    } else if (opts.command == "rt") {
      r = cmd_rt(cfg, threads);
    } else if (opts.command == "sweep") {
      r = cmd_sweep(cfg, threads);
    } else if (opts.command == "validate") {
      r = cmd_validate(cfg, threads);
    } else {
      err << "error: unknown command '" << opts.command << "'\n";
      return kExitConfig;
    }
    check_finite(r.canonical);

    const std::string format = opts.format.value_or(opts.command == "sweep" ? "csv" : "json");
    std::string text;
    if (format == "csv") {
      text = r.csv;
    } else if (format == "json") {
      json doc{{"canonical", r.canonical},
               {"meta", {{"timestamp", timestamp()}, {"threads", threads}, {"config", opts.config.string()}}}};
      text = doc.dump(2) + "\n";
    } else {
      err << "error: unknown format '" << format << "' (expected json or csv)\n";
      return kExitConfig;
    }
    std::filesystem::path dest = opts.out.value_or(cfg.output.path);
    if (dest.empty()) {
      out << text;
    } else {
      std::ofstream f(dest);
      if (!f) {
        err << "error: cannot write " << dest.string() << '\n';
        return kExitConfig;
      }
      f << text;
    }
    return r.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NoConvergenceError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const AccuracyError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const DegenerateEnsembleError& e) {
    err << "no convergence: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace asymmap
