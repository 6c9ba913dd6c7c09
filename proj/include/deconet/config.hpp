#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace deconet {

/// Settings for every subcommand. Read from an INI file; see README for keys.
struct RunConfig {
  // [run]
  std::uint64_t seed = 0;
  std::string out = "out";

  // [data]
  std::string source = "synthetic";  // synthetic | mnist
  std::size_t n = 100;
  std::size_t m = 25;
  std::size_t s = 2500;
  double noise_std = 1e-4;
  double train_frac = 0.8;
  std::string dataset;  // dataset directory used by train/acf/bounds
  std::string mnist_images;
  bool downsample = true;
  bool per_sample_eps = false;

  // [operator]
  std::size_t N = 500;
  std::string init = "normal";  // normal | beta
  double beta_a = 2.0;
  double beta_b = 2.0;

  // [schedule]
  std::size_t L = 10;
  double mu = 100.0;
  double alpha = 0.9;
  double beta = 0.9;
  double L_tilde = 1000.0;

  // [train]
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  std::size_t batch = 128;
  std::size_t patience = 10;
  std::size_t max_epochs = 200;
  std::optional<double> lambda_cap;

  // [acf]
  std::string acf_operator = "tv";  // haar | tv | file
  std::string acf_operator_path;
  std::size_t acf_iters = 10;
  std::string acf_theta = "acf";  // acf | geometric | constant
  double acf_t = 1.0;

  // [bounds]
  double delta = 0.05;
  std::optional<double> lambda;
  std::optional<double> a_norm;
  std::string checkpoint;
  std::vector<std::size_t> sweep_N;
  std::vector<std::size_t> sweep_L;
  std::vector<std::size_t> sweep_s;

  // [verify]
  std::size_t verify_trials = 50;
  std::string verify_families = "state_norm,state_lipschitz,decoder_lipschitz,gradient,clipping";
  std::string verify_fault = "none";  // none | g1_sign

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

RunConfig parse_config(const std::string& ini_text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical INI text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);
/// Apply "section.key=value".
void apply_override(RunConfig& c, const std::string& assignment);
/// FNV-1a of the canonical text.
std::string config_hash(const RunConfig& c);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace deconet
