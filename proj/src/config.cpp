#include "dhg/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace dhg {

Probe make_probe(const std::string& text, std::size_t n_modes) {
  Probe probe;
  probe.name = text;
  if (text.find(',') != std::string::npos) {
    probe.point = hvec_from_sparse_csv(text, n_modes);
    return probe;
  }
  if (text == "zero") {
    probe.point = HVec(n_modes);
    probe.fn = [](double) { return 0.0; };
    return probe;
  }
  // sin k -> basis mode 2k exactly.
  for (std::size_t k = 1; k <= 3; ++k) {
    if (text == "sin" + std::to_string(k)) {
      if (2 * k > n_modes) throw ConfigError("probe " + text + ": truncation too small");
      probe.point = unit_mode(2 * k, n_modes);
      probe.fn = [k](double xi) { return std::sin(static_cast<double>(k) * xi) / kSqrtPi; };
      return probe;
    }
  }
  if (text == "parabola") {
    probe.fn = [](double xi) { return xi * (kTwoPi - xi) / kTwoPi; };
  } else if (text == "one-minus-cos") {
    probe.fn = [](double xi) { return 1.0 - std::cos(xi); };
  } else if (text == "one-minus-cos2") {
    probe.fn = [](double xi) { return 1.0 - std::cos(2.0 * xi); };
  } else if (text == "const-invsqrt2pi") {
    probe.fn = [](double xi) {
      (void)xi;
      return 1.0 / std::sqrt(kTwoPi);
    };
  } else {
    throw ConfigError("probe: unknown name '" + text + "'");
  }
  probe.point = project_function(probe.fn, n_modes);
  return probe;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "problem",    "mode",        "gradient",   "d",          "N",
      "p",          "width",       "iterations", "batch",      "seed",
      "measure",    "measure_csv", "alpha_c",    "alpha_e",    "beta_c",
      "beta_e",     "gamma",       "lambda",     "xbar",       "control",
      "checkpoint_every", "eval_every", "eval_batch", "probes", "out_dir",
      "eval_samples", "op_samples", "fd_paths"};
  return keys;
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config: key '" + key + "' has the wrong type");
  }
}

HVec parse_point(const std::string& text, std::size_t n_modes) {
  if (text.empty() || text == "zero") return HVec(n_modes);
  return make_probe(text, n_modes).point;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
  for (const auto& item : j.items()) {
    if (known_keys().count(item.key()) == 0) {
      throw ConfigError("config: unknown key '" + item.key() + "'");
    }
  }
  RunConfig c;
  if (!j.contains("problem")) throw ConfigError("config: missing required key 'problem'");
  c.problem = j.at("problem").get<std::string>();
  const std::string mode = get_or<std::string>(j, "mode", "kolmogorov");
  if (mode == "hjb") {
    c.hjb = true;
  } else if (mode != "kolmogorov") {
    throw ConfigError("config: mode must be 'kolmogorov' or 'hjb'");
  }
  c.gradient = gradient_kind_from_string(get_or<std::string>(j, "gradient", "qhpde"));
  c.d = get_or<std::size_t>(j, "d", 25);
  c.n = get_or<std::size_t>(j, "N", 250);
  c.p = get_or<std::size_t>(j, "p", 0);
  c.width = get_or<std::size_t>(j, "width", 600);
  if (!j.contains("iterations")) throw ConfigError("config: missing required key 'iterations'");
  c.iterations = j.at("iterations").get<std::size_t>();
  c.batch = get_or<std::size_t>(j, "batch", 2000);
  c.seed = get_or<std::uint64_t>(j, "seed", 1);
  c.measure = get_or<std::string>(j, "measure", "");
  c.measure_csv = get_or<std::string>(j, "measure_csv", "");
  c.alpha_c = get_or<double>(j, "alpha_c", 0.0);
  c.alpha_e = get_or<double>(j, "alpha_e", 0.5);
  c.beta_c = get_or<double>(j, "beta_c", 0.0);
  c.beta_e = get_or<double>(j, "beta_e", 0.75);
  c.gamma = get_or<double>(j, "gamma", 1.0);
  c.lambda = get_or<double>(j, "lambda", 1.0);
  c.xbar = get_or<std::string>(j, "xbar", "zero");
  c.control = get_or<std::string>(j, "control", "zero");
  c.checkpoint_every = get_or<std::size_t>(j, "checkpoint_every", 0);
  c.eval_every = get_or<std::size_t>(j, "eval_every", 1000);
  c.eval_batch = get_or<std::size_t>(j, "eval_batch", 1000);
  c.probes = get_or<std::vector<std::string>>(j, "probes", {"zero"});
  c.out_dir = get_or<std::string>(j, "out_dir", "run-out");
  c.eval_samples = get_or<std::size_t>(j, "eval_samples", 100000);
  c.op_samples = get_or<std::size_t>(j, "op_samples", 2000);
  c.fd_paths = get_or<std::size_t>(j, "fd_paths", 200);

  if (const char* env = std::getenv("DHG_OUT"); env != nullptr && env[0] != '\0') {
    c.out_dir = env;
  }

  // Fail on module preconditions before any compute.
  if (c.d < 1 || c.d > c.n) throw ConfigError("config: need 1 <= d <= N (key 'd')");
  if (c.width < 1) throw ConfigError("config: 'width' must be positive");
  if (c.batch < 1) throw ConfigError("config: 'batch' must be positive");
  if (!(c.gamma > 0.0)) throw ConfigError("config: 'gamma' must be positive");
  if (!(c.lambda > 0.0)) throw ConfigError("config: 'lambda' must be positive");
  if (c.p != 0 && c.p > c.d) throw ConfigError("config: 'p' must be <= d");
  if (c.hjb && c.control != "zero" && !c.control.empty()) {
    throw ConfigError("config: 'control' must stay zero in hjb mode");
  }
  if (c.measure == "custom" && c.measure_csv.empty()) {
    throw ConfigError("config: measure 'custom' needs 'measure_csv'");
  }
  (void)c.build_problem();  // validates the preset name
  return c;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["problem"] = problem;
  j["mode"] = hjb ? "hjb" : "kolmogorov";
  j["gradient"] = to_string(gradient);
  j["d"] = d;
  j["N"] = n;
  j["p"] = p;
  j["width"] = width;
  j["iterations"] = iterations;
  j["batch"] = batch;
  j["seed"] = seed;
  j["measure"] = measure;
  j["measure_csv"] = measure_csv;
  j["alpha_c"] = alpha_c;
  j["alpha_e"] = alpha_e;
  j["beta_c"] = beta_c;
  j["beta_e"] = beta_e;
  j["gamma"] = gamma;
  j["lambda"] = lambda;
  j["xbar"] = xbar;
  j["control"] = control;
  j["checkpoint_every"] = checkpoint_every;
  j["eval_every"] = eval_every;
  j["eval_batch"] = eval_batch;
  j["probes"] = probes;
  j["out_dir"] = out_dir;
  j["eval_samples"] = eval_samples;
  j["op_samples"] = op_samples;
  j["fd_paths"] = fd_paths;
  return j;
}

double RunConfig::alpha_c_effective() const {
  if (alpha_c != 0.0) return alpha_c;
  return gradient == GradientKind::kDhgm ? 5.0 : 0.05;
}

double RunConfig::beta_c_effective() const {
  if (beta_c != 0.0) return beta_c;
  return gradient == GradientKind::kDhgm ? 5.0 : 0.05;
}

ProblemSpec RunConfig::build_problem() const {
  ProblemSpec spec = problem_preset(problem, d, n, hjb);
  spec.gamma = gamma;
  spec.lambda = lambda;
  spec.xbar = parse_point(xbar, n);
  if (!hjb) {
    HVec u = parse_point(control, n);
    if (norm(u) > 0.0) spec.fixed_control = u;
  }
  return spec;
}

GaussianMeasure RunConfig::build_measure() const {
  if (measure.empty()) return preset_measure(problem, n);
  if (measure == "tcc") return stationary_tcc(n);
  if (measure == "wn") return stationary_wn(n);
  if (measure == "burgers4") return burgers_training_measure(n);
  if (measure == "custom") {
    GaussianMeasure mu;
    mu.mean = HVec(n);
    const HVec table = hvec_from_sparse_csv(measure_csv, n);
    mu.variances = table.coeffs;
    for (double v : mu.variances) {
      if (v < 0.0) throw ConfigError("config: 'measure_csv' has a negative variance");
    }
    return mu;
  }
  throw ConfigError("config: unknown measure '" + measure + "'");
}

TrainConfig RunConfig::build_train_config() const {
  TrainConfig tc;
  tc.gradient = gradient;
  tc.iterations = iterations;
  tc.batch = batch;
  tc.problem = build_problem();
  tc.mu = build_measure();
  tc.width = width;
  tc.p = p;
  tc.alpha = LrSchedule{alpha_c_effective(), alpha_e, 20.0};
  tc.beta = LrSchedule{beta_c_effective(), beta_e, 20.0};
  tc.seed = seed;
  tc.eval_every = eval_every;
  tc.eval_batch = eval_batch;
  tc.checkpoint_every = checkpoint_every;
  tc.out_dir = out_dir;
  for (const auto& probe : build_probes()) tc.probes.emplace_back(probe.name, probe.point);
  return tc;
}

std::vector<Probe> RunConfig::build_probes() const {
  std::vector<Probe> out;
  for (const std::string& text : probes) out.push_back(make_probe(text, n));
  return out;
}

RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config: cannot parse '" + path + "': " + e.what());
  }
  return RunConfig::from_json(j);
}

std::uint64_t config_hash(const RunConfig& config) {
  const std::string dump = config.to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash_hex(const RunConfig& config) {
  std::ostringstream os;
  os << std::hex << config_hash(config);
  return os.str();
}

void write_manifest(const RunConfig& config, const std::string& out_dir,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json j;
  j["config_hash"] = config_hash_hex(config);
  j["code_version"] = kVersion;
  j["seed"] = config.seed;
  j["config"] = config.to_json();
  j["artifacts"] = artifacts;
  std::filesystem::create_directories(out_dir);
  write_file_text(out_dir + "/manifest.json", j.dump(2) + "\n");
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write '" + path + "'");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

std::string read_file_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw FormatError("cannot write '" + path + "'");
  f << text;
}

}  // namespace dhg
