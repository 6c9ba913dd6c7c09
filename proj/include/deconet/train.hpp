#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "deconet/matrix.hpp"
#include "deconet/network.hpp"

namespace deconet {

struct TrainOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  std::size_t batch = 128;
  std::size_t patience = 10;
  std::size_t max_epochs = 200;
  std::uint64_t shuffle_seed = 0;
  std::optional<double> lambda_cap;
};

struct TrainState {
  Mat W;
  Mat m;  // first moment
  Mat v;  // second moment
  std::size_t step = 0;
  double best_ege = 0.0;
  std::size_t since_improvement = 0;

  static TrainState start(Mat W);
};

/// Bias-corrected Adam update; projects W onto the spectral ball when `cap` is set.
TrainState adam_step(const TrainState& ts, const Mat& grad_W, double lr, double beta1,
                     double beta2, double eps_adam, std::optional<double> cap = std::nullopt);

struct EpochMetrics {
  std::size_t epoch = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double ege = 0.0;
  double grad_norm = 0.0;  // mean Frobenius norm of the batch gradients
  double w_spectral = 0.0;
};

struct TrainResult {
  Mat W;  // snapshot with the lowest EGE
  std::size_t best_epoch = 0;
  std::vector<EpochMetrics> history;
};

struct TrainData {
  Mat X_train, Y_train, X_test, Y_test;
};

/// Mini-batch Adam with EGE-based early stopping. `on_epoch` sees each row as it is produced.
TrainResult train(const Mat& W_init, const Mat& A, const TrainData& data, const DecoderConfig& cfg,
                  const TrainOptions& opts,
                  const std::function<void(const EpochMetrics&)>& on_epoch = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const EpochMetrics& e);

}  // namespace deconet
