#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dhg/measures.hpp"
#include "dhg/residual.hpp"
#include "dhg/train.hpp"

namespace dhg {

// A named evaluation point. `fn` is the closed form when one exists (used
// by the finite-difference oracle to avoid projection error); the
// coefficient vector is the basis projection at the configured truncation.
struct Probe {
  std::string name;
  HVec point;
  std::function<double(double)> fn;  // may be empty
};

// Named probes: zero, sin1..sin3, parabola, one-minus-cos, one-minus-cos2,
// const-invsqrt2pi; anything containing a comma parses as sparse CSV.
Probe make_probe(const std::string& text, std::size_t n_modes);

// One JSON document drives a run; unknown keys are rejected and messages
// name the offending key. DHG_OUT overrides out_dir.
struct RunConfig {
  std::string problem = "heat-tcc";
  bool hjb = false;
  GradientKind gradient = GradientKind::kQhpde;
  std::size_t d = 25;
  std::size_t n = 250;
  std::size_t p = 0;  // 0 = d
  std::size_t width = 600;
  std::size_t iterations = 0;
  std::size_t batch = 2000;
  std::uint64_t seed = 1;
  std::string measure;  // empty = preset default
  std::string measure_csv;
  double alpha_c = 0.0;  // 0 = default for the gradient kind
  double alpha_e = 0.5;
  double beta_c = 0.0;
  double beta_e = 0.75;
  double gamma = 1.0;
  double lambda = 1.0;
  std::string xbar = "zero";
  std::string control = "zero";
  std::size_t checkpoint_every = 0;
  std::size_t eval_every = 1000;
  std::size_t eval_batch = 1000;
  std::vector<std::string> probes = {"zero"};
  std::string out_dir = "run-out";
  std::size_t eval_samples = 100000;
  std::size_t op_samples = 2000;
  std::size_t fd_paths = 200;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double alpha_c_effective() const;
  double beta_c_effective() const;

  ProblemSpec build_problem() const;
  GaussianMeasure build_measure() const;
  TrainConfig build_train_config() const;
  std::vector<Probe> build_probes() const;
};

RunConfig load_run_config(const std::string& path);

// FNV-1a 64 over the canonical JSON dump.
std::uint64_t config_hash(const RunConfig& config);
std::string config_hash_hex(const RunConfig& config);

void write_manifest(const RunConfig& config, const std::string& out_dir,
                    const std::vector<std::string>& artifacts);

// File helpers shared by the CLI.
std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes);
std::string read_file_text(const std::string& path);
void write_file_text(const std::string& path, const std::string& text);

}  // namespace dhg
