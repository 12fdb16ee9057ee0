// Command-line surface: train / evaluate / oracle / fd-oracle / report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dhg/config.hpp"
#include "dhg/eval.hpp"
#include "dhg/oracle.hpp"
#include "dhg/train.hpp"

namespace {

using namespace dhg;

std::string fmt(double x, int precision = 6) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

int cmd_train(const std::string& config_path, std::int64_t seed_override,
              const std::string& out_override) {
  RunConfig config = load_run_config(config_path);
  if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
  if (!out_override.empty()) config.out_dir = out_override;

  TrainConfig tc = config.build_train_config();
  tc.out_dir = config.out_dir;
  std::filesystem::create_directories(config.out_dir);

  const bool actor_run = config.hjb;
  std::cout << "training " << config.problem << (config.hjb ? " (hjb)" : " (kolmogorov)")
            << " with " << to_string(config.gradient) << ", d=" << config.d
            << " N=" << config.n << " width=" << config.width << " T=" << config.iterations
            << " M=" << config.batch << " seed=" << config.seed << "\n";

  const TrainResult result = actor_run ? train_actor_critic(tc) : train_critic(tc);

  std::vector<std::string> artifacts = {"final.hgno", "final.opt", "log.csv"};
  if (actor_run) {
    artifacts.push_back("final_actor.hgno");
    artifacts.push_back("final_actor.opt");
  }
  write_manifest(config, config.out_dir, artifacts);

  if (!result.log.empty()) {
    const TrainLogRow& last = result.log.back();
    std::cout << "final residual L2 estimate: " << fmt(last.residual_l2) << "\n";
    if (last.actor_rmse >= 0.0) {
      std::cout << "final actor RMSE vs closed form: " << fmt(last.actor_rmse) << "\n";
    }
  }
  std::cout << "artifacts in " << config.out_dir << "\n";
  return 0;
}

void append_metrics_csv(const std::string& path, const RunConfig& config,
                        const MetricReport& critic, const MetricReport* actor,
                        double residual_norm) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream f(path, std::ios::app);
  if (fresh) {
    f << "problem,mode,gradient,seed,critic_me,critic_rmse,critic_re1,critic_re2,"
         "actor_me,actor_rmse,actor_re1,actor_re2,residual_l2\n";
  }
  f.precision(10);
  f << config.problem << ',' << (config.hjb ? "hjb" : "kolmogorov") << ','
    << to_string(config.gradient) << ',' << config.seed << ',' << critic.me << ','
    << critic.rmse << ',' << critic.re1 << ',' << critic.re2 << ',';
  if (actor != nullptr) {
    f << actor->me << ',' << actor->rmse << ',' << actor->re1 << ',' << actor->re2;
  } else {
    f << ",,,";
  }
  f << ',' << residual_norm << "\n";
}

int cmd_evaluate(const std::string& config_path, const std::string& checkpoint,
                 const std::string& actor_path, std::int64_t samples_override,
                 const std::string& out_override) {
  RunConfig config = load_run_config(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  if (samples_override > 0) config.eval_samples = static_cast<std::size_t>(samples_override);
  std::filesystem::create_directories(config.out_dir);

  const ProblemSpec spec = config.build_problem();
  const GaussianMeasure mu = config.build_measure();
  const std::vector<double> sigma_sq = spec.noise.mode_variances(config.n);
  const bool burgers_problem = spec.burgers();

  // Closed-form reference for the heat problems.
  std::optional<LQSolution> oracle;
  if (!burgers_problem) {
    oracle = config.hjb ? lq_solve(config.gamma, config.lambda, spec.xbar, sigma_sq, config.n)
                        : kolmogorov_solve(config.gamma, config.lambda, spec.xbar,
                                           spec.fixed_control, sigma_sq, config.n);
  }

  // Model: a trained checkpoint or the reference critic itself.
  std::optional<CriticNet> net;
  const bool use_reference = checkpoint == "oracle";
  if (use_reference) {
    if (burgers_problem) {
      throw ConfigError("evaluate: no closed-form reference critic for Burgers problems");
    }
  } else {
    net = deserialize_critic(read_file_bytes(checkpoint));
    if (net->d != config.d) {
      throw ConfigError("evaluate: checkpoint encoder d=" + std::to_string(net->d) +
                        " does not match config d=" + std::to_string(config.d));
    }
  }
  std::optional<ActorNet> actor;
  if (!actor_path.empty()) {
    actor = deserialize_actor(read_file_bytes(actor_path));
    if (actor->d != config.d) throw ConfigError("evaluate: actor encoder dim mismatch");
  }

  nlohmann::json out;
  out["problem"] = config.problem;
  out["mode"] = config.hjb ? "hjb" : "kolmogorov";
  out["gradient"] = to_string(config.gradient);
  out["seed"] = config.seed;
  out["samples"] = config.eval_samples;
  out["checkpoint"] = checkpoint;

  const std::vector<Probe> probes = config.build_probes();
  std::ostringstream probe_csv;
  probe_csv << "probe,model_value,reference_value,reference_std_error\n";
  probe_csv.precision(10);

  std::optional<MetricReport> critic_rep;
  std::optional<MetricReport> actor_rep;
  double residual_norm = -1.0;

  if (!burgers_problem) {
    ScalarFn predict;
    if (use_reference) {
      const LQSolution& sol = *oracle;
      predict = [&sol](const HVec& x) { return sol.value(x); };
    } else {
      const CriticNet& model = *net;
      predict = [&model](const HVec& x) { return critic_eval(model, x); };
    }
    const LQSolution& sol = *oracle;
    critic_rep = metrics(
        predict, [&sol](const HVec& x) { return sol.value(x); }, mu, config.eval_samples,
        config.seed);
    out["critic"] = {{"me", critic_rep->me},
                     {"rmse", critic_rep->rmse},
                     {"re1", critic_rep->re1},
                     {"re2", critic_rep->re2},
                     {"re1_defined", critic_rep->re1_defined},
                     {"re2_defined", critic_rep->re2_defined}};

    if (!use_reference) {
      residual_norm = residual_l2_norm(*net, actor ? &*actor : nullptr, spec, mu,
                                       config.eval_samples, config.seed);
      out["residual_l2"] = residual_norm;
      if (!config.hjb) {
        const BoundedInverseReport bir = bounded_inverse_report(
            *net, spec, *oracle, mu, config.eval_samples, config.seed, config.gamma);
        out["bounded_inverse"] = {{"rmse_vs_oracle", bir.rmse_vs_oracle},
                                  {"residual_norm", bir.residual_norm},
                                  {"certified_bound", bir.certified_bound},
                                  {"mc_slack", bir.mc_slack},
                                  {"pass", bir.pass},
                                  {"certified", bir.certified}};
      }
      const DerivativeErrors derr = derivative_error_norms(*net, *oracle, mu, mu,
                                                           config.op_samples, config.seed);
      out["derivative_errors"] = {{"value_l4", derr.value_l4},
                                  {"grad_l4", derr.grad_l4},
                                  {"hess_mu_mu", derr.hess_mu_mu},
                                  {"hess_op", derr.hess_op}};
    }
    if (actor) {
      const LQSolution control_sol =
          lq_solve(config.gamma, config.lambda, spec.xbar, sigma_sq, config.n);
      const ActorNet& a = *actor;
      actor_rep = metrics(
          FieldFn([&a](const HVec& x) { return actor_eval(a, x); }),
          FieldFn([&control_sol](const HVec& x) { return control_sol.control(x); }), mu,
          config.eval_samples, config.seed);
      out["actor"] = {{"me", actor_rep->me},
                      {"rmse", actor_rep->rmse},
                      {"re1", actor_rep->re1},
                      {"re2", actor_rep->re2}};
    }
    for (const Probe& probe : probes) {
      const double model_v =
          use_reference ? oracle->value(probe.point) : critic_eval(*net, probe.point);
      probe_csv << probe.name << ',' << model_v << ',' << oracle->value(probe.point) << ",0\n";
    }
  } else {
    // Burgers: reference values come from the finite-difference oracle.
    if (!use_reference) {
      residual_norm =
          residual_l2_norm(*net, nullptr, spec, mu, config.eval_samples, config.seed);
      out["residual_l2"] = residual_norm;
    }
    nlohmann::json probe_rows = nlohmann::json::array();
    for (const Probe& probe : probes) {
      FdParams prm;
      prm.gamma = config.gamma;
      prm.lambda = config.lambda;
      prm.seed = config.seed;
      prm.mc_count = spec.noise.empty() ? 1 : config.fd_paths;
      std::vector<double> grid;
      if (probe.fn) {
        grid.resize(prm.grid_points);
        for (std::size_t j = 1; j + 1 < prm.grid_points; ++j) {
          grid[j] = probe.fn(kTwoPi * static_cast<double>(j) /
                             static_cast<double>(prm.grid_points - 1));
        }
      } else {
        grid = grid_from_hvec(probe.point, prm.grid_points);
      }
      const FdResult fd = fd_burgers_value(grid, spec.noise, prm);
      const double model_v = critic_eval(*net, probe.point);
      probe_csv << probe.name << ',' << model_v << ',' << fd.estimate << ',' << fd.std_error
                << "\n";
      probe_rows.push_back({{"probe", probe.name},
                            {"model", model_v},
                            {"fd_estimate", fd.estimate},
                            {"fd_std_error", fd.std_error},
                            {"fd_paths", fd.paths}});
    }
    out["probe_table"] = probe_rows;
  }

  write_file_text(config.out_dir + "/metrics.json", out.dump(2) + "\n");
  write_file_text(config.out_dir + "/probe_table.csv", probe_csv.str());
  append_metrics_csv(config.out_dir + "/metrics.csv", config,
                     critic_rep.value_or(MetricReport{}),
                     actor_rep ? &*actor_rep : nullptr, residual_norm);
  write_manifest(config, config.out_dir, {"metrics.json", "probe_table.csv", "metrics.csv"});

  std::cout << out.dump(2) << "\n";
  std::cout << probe_csv.str();
  return 0;
}

int cmd_oracle(double gamma, double lambda, const std::string& noise_name, std::size_t modes,
               const std::string& kind, const std::string& xbar_text,
               const std::string& control_text, const std::string& out_path) {
  NoiseModel noise;
  if (noise_name == "tcc") {
    noise = NoiseModel::trace_class(modes);
  } else if (noise_name == "1d") {
    noise = NoiseModel::rank_one(modes);
  } else if (noise_name != "none") {
    throw ConfigError("oracle: --noise must be tcc, 1d, or none");
  }
  const std::vector<double> sigma_sq = noise.mode_variances(modes);
  const HVec xbar =
      xbar_text.empty() ? HVec(modes) : make_probe(xbar_text, modes).point;

  LQSolution sol;
  if (kind == "hjb") {
    sol = lq_solve(gamma, lambda, xbar, sigma_sq, modes);
  } else if (kind == "kolmogorov") {
    const HVec u =
        control_text.empty() ? HVec(modes) : make_probe(control_text, modes).point;
    sol = kolmogorov_solve(gamma, lambda, xbar, u, sigma_sq, modes);
  } else {
    throw ConfigError("oracle: --kind must be hjb or kolmogorov");
  }

  std::ostringstream csv;
  csv << "n,lambda_n,M,Q,R,sigma_sq\n";
  csv.precision(12);
  for (std::size_t i = 0; i < modes; ++i) {
    csv << (i + 1) << ',' << basis_eigenvalue(i + 1) << ',' << sol.m[i] << ',' << sol.q[i]
        << ',' << sol.r[i] << ',' << sol.sigma_sq[i] << "\n";
  }
  std::cout << csv.str();
  if (!out_path.empty()) write_file_text(out_path, csv.str());
  return 0;
}

int cmd_fd_oracle(const std::string& x0_text, const std::string& noise_name,
                  std::size_t grid_points, double dt, std::size_t steps, std::size_t paths,
                  std::uint64_t seed, double gamma, bool no_burgers, bool semi_implicit) {
  FdParams prm;
  prm.grid_points = grid_points;
  prm.dt = dt;
  prm.steps = steps;
  prm.mc_count = paths;
  prm.seed = seed;
  prm.gamma = gamma;
  prm.with_burgers = !no_burgers;
  prm.semi_implicit_diffusion = semi_implicit;

  NoiseModel noise;
  if (noise_name == "tcc") {
    noise = NoiseModel::trace_class(500);
  } else if (noise_name == "1d") {
    noise = NoiseModel::rank_one(500);
  } else if (noise_name != "none") {
    throw ConfigError("fd-oracle: --noise must be tcc, 1d, or none");
  }

  const Probe probe = make_probe(x0_text, 500);
  std::vector<double> grid(grid_points, 0.0);
  if (probe.fn) {
    for (std::size_t j = 1; j + 1 < grid_points; ++j) {
      grid[j] = probe.fn(kTwoPi * static_cast<double>(j) / static_cast<double>(grid_points - 1));
    }
  } else {
    grid = grid_from_hvec(probe.point, grid_points);
  }

  const FdResult res = fd_burgers_value(grid, noise, prm);
  if (res.cfl_warning) {
    std::cerr << "warning: explicit diffusion stability bound exceeded (dt*2/h^2 >= 1)\n";
  }
  std::cout << "estimate,std_error,paths,runtime_s\n";
  std::cout.precision(10);
  std::cout << res.estimate << ',' << res.std_error << ',' << res.paths << ','
            << res.runtime_s << "\n";
  return 0;
}

int cmd_report(const std::string& dir) {
  const std::string manifest_path = dir + "/manifest.json";
  nlohmann::json manifest = nlohmann::json::parse(read_file_text(manifest_path));

  std::ostringstream summary;
  summary << "key,value\n";
  summary << "config_hash," << manifest.at("config_hash").get<std::string>() << "\n";
  summary << "code_version," << manifest.at("code_version").get<std::string>() << "\n";
  summary << "seed," << manifest.at("seed") << "\n";

  const std::string log_path = dir + "/log.csv";
  if (std::filesystem::exists(log_path)) {
    std::ifstream f(log_path);
    std::string line, header, last;
    std::getline(f, header);
    while (std::getline(f, line)) {
      if (!line.empty()) last = line;
    }
    if (!last.empty()) {
      std::istringstream hs(header), ls(last);
      std::string hcol, lcol;
      while (std::getline(hs, hcol, ',') && std::getline(ls, lcol, ',')) {
        if (hcol == "wallclock_s") continue;  // not reproducible across runs
        summary << "log_final_" << hcol << ',' << lcol << "\n";
      }
    }
  }
  const std::string metrics_path = dir + "/metrics.json";
  if (std::filesystem::exists(metrics_path)) {
    const nlohmann::json m = nlohmann::json::parse(read_file_text(metrics_path));
    for (const char* section : {"critic", "actor"}) {
      if (m.contains(section)) {
        for (const auto& item : m.at(section).items()) {
          summary << section << '_' << item.key() << ',' << item.value() << "\n";
        }
      }
    }
    if (m.contains("residual_l2")) summary << "residual_l2," << m.at("residual_l2") << "\n";
  }
  write_file_text(dir + "/summary.csv", summary.str());
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residual-trained operator networks for Kolmogorov and HJB equations on "
               "L^2([0,2pi])"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, actor_path, out_dir;
  std::int64_t seed_override = -1, samples_override = -1;

  auto* train = app.add_subcommand("train", "run a training config");
  train->add_option("--config", config_path, "JSON run config")->required();
  train->add_option("--seed", seed_override, "override the config seed");
  train->add_option("--out", out_dir, "override the output directory");

  auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpoint");
  eval_cmd->add_option("--config", config_path, "JSON run config")->required();
  eval_cmd->add_option("--checkpoint", checkpoint, ".hgno file, or 'oracle' for the reference critic")
      ->required();
  eval_cmd->add_option("--actor", actor_path, "actor .hgno file");
  eval_cmd->add_option("--samples", samples_override, "override eval sample count");
  eval_cmd->add_option("--out", out_dir, "override the output directory");

  double gamma = 1.0, lambda = 1.0;
  std::string noise_name = "none", kind = "hjb", xbar_text, control_text, oracle_out;
  std::size_t modes = 25;
  auto* oracle_cmd = app.add_subcommand("oracle", "closed-form per-mode value tables");
  oracle_cmd->add_option("--gamma", gamma, "discount")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--lambda", lambda, "control cost weight")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--noise", noise_name, "tcc|1d|none");
  oracle_cmd->add_option("--modes", modes, "number of modes");
  oracle_cmd->add_option("--kind", kind, "hjb|kolmogorov");
  oracle_cmd->add_option("--xbar", xbar_text, "target (probe name or sparse csv)");
  oracle_cmd->add_option("--control", control_text, "fixed control for kolmogorov kind");
  oracle_cmd->add_option("--out", oracle_out, "also write the CSV here");

  std::string x0_text = "zero";
  std::size_t grid_points = 251, steps = 100000, paths = 1;
  double dt = 1e-4;
  std::uint64_t fd_seed = 0;
  bool no_burgers = false, semi_implicit = false;
  auto* fd_cmd = app.add_subcommand("fd-oracle", "Monte Carlo finite-difference value");
  fd_cmd->add_option("--x0", x0_text, "start point (probe name or sparse csv)");
  fd_cmd->add_option("--noise", noise_name, "tcc|1d|none");
  fd_cmd->add_option("--grid", grid_points, "grid points");
  fd_cmd->add_option("--dt", dt, "time step");
  fd_cmd->add_option("--steps", steps, "time steps");
  fd_cmd->add_option("--paths", paths, "Monte Carlo paths");
  fd_cmd->add_option("--seed", fd_seed, "noise seed");
  fd_cmd->add_option("--gamma", gamma, "discount");
  fd_cmd->add_flag("--no-burgers", no_burgers, "disable the advection term");
  fd_cmd->add_flag("--semi-implicit", semi_implicit, "implicit diffusion step");

  auto* report_cmd = app.add_subcommand("report", "summarize an artifact directory");
  report_cmd->add_option("--out", out_dir, "artifact directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, seed_override, out_dir);
    if (eval_cmd->parsed()) {
      return cmd_evaluate(config_path, checkpoint, actor_path, samples_override, out_dir);
    }
    if (oracle_cmd->parsed()) {
      return cmd_oracle(gamma, lambda, noise_name, modes, kind, xbar_text, control_text,
                        oracle_out);
    }
    if (fd_cmd->parsed()) {
      return cmd_fd_oracle(x0_text, noise_name, grid_points, dt, steps, paths, fd_seed, gamma,
                           no_burgers, semi_implicit);
    }
    if (report_cmd->parsed()) return cmd_report(out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DivergedError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
