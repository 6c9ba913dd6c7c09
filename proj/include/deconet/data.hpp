#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deconet/matrix.hpp"
#include "deconet/rng.hpp"

namespace deconet {

struct Dataset {
  Mat X;  // n x s signals
  Mat Y;  // m x s measurements
  std::string A_path;
  double eps = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  double B_in = 0.0;
  double B_out = 0.0;
  std::vector<double> eps_per_sample;
  std::string config_hash;

  std::size_t count() const noexcept { return X.cols(); }
};

/// n x s matrix of i.i.d. standard normals.
Mat gen_synthetic(std::size_t n, std::size_t s, std::uint64_t seed);

struct Measurement {
  Mat Y;
  double eps = 0.0;                 // mean per-sample residual norm
  std::vector<double> per_sample;  // ||y_i - A x_i||
};

/// Y = A X + E with E i.i.d. N(0, noise_std^2).
Measurement measure(const Mat& X, const Mat& A, double noise_std, std::uint64_t seed);

/// IDX image file as an (rows*cols) x count matrix scaled to [0, 1].
/// With `downsample`, each 2x2 pixel block is averaged first.
Mat load_idx_images(const std::filesystem::path& path, bool downsample = false);
Mat decode_idx_images(std::span<const unsigned char> bytes, bool downsample = false);
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);
std::vector<std::uint8_t> decode_idx_labels(std::span<const unsigned char> bytes);

/// Train/test column indices and the shuffled train batches.
struct BatchPlan {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::vector<std::size_t>> batches;  // indices into the full dataset
};

/// First floor(train_frac * s) columns train, the rest test; train order shuffled by seed.
BatchPlan split_and_batch(std::size_t s, double train_frac, std::size_t batch, std::uint64_t seed);

/// Shuffle 0..count-1 and cut into batches; the last batch may be short.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch, Rng& rng);

/// Split a dataset by the same rule as split_and_batch.
std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, double train_frac);

/// (max ||y_i||, max ||x_i||).
std::pair<double, double> estimate_bounds_constants(const Mat& X, const Mat& Y);

/// Writes X.dmat, Y.dmat and meta.json into dir.
void save_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace deconet
