#pragma once

#include <cstdint>
#include <vector>

#include "deconet/acf.hpp"
#include "deconet/matrix.hpp"
#include "deconet/schedule.hpp"

namespace deconet {

struct DecoderConfig {
  Schedule sched;  // sched.L layers, sched.mu
  double B_out = 1.0;
  double eps = 0.0;
  LayerFault fault = LayerFault::none;

  std::size_t L() const noexcept { return sched.L; }
  double mu() const noexcept { return sched.mu; }
  void validate() const;
};

/// Everything backward needs from a forward pass.
struct ForwardCache {
  std::vector<LayerTrace> layers;
  DualState final_state;
  Mat pre_clip;               // phi output before the norm clip
  std::vector<double> norms;  // column norms of pre_clip
  double B_out = 0.0;
  double theta_L = 1.0;
  std::uint64_t w_fingerprint = 0;
  std::size_t batch = 0;
};

struct ForwardResult {
  Mat Xhat;
  ForwardCache cache;
};

/// Decoder output psi(phi(f^L_W(Y))) with x0 = A^T y per column.
ForwardResult forward(const Mat& W, const Mat& Y, const DecoderConfig& cfg, const Mat& A);
/// Same output without keeping the cache.
Mat decode(const Mat& W, const Mat& Y, const DecoderConfig& cfg, const Mat& A);

/// Duals after each layer, k = 1..upto (upto <= L).
std::vector<DualState> layer_states(const Mat& W, const Mat& Y, const DecoderConfig& cfg,
                                    const Mat& A, std::size_t upto);

/// Stack a dual state into the p x s block [z1; z2; u1; u2].
Mat stack_state(const DualState& d);

/// Gradient of <grad_Xhat, Xhat> with respect to W.
Mat backward(const ForwardCache& cache, const Mat& grad_Xhat, const Mat& W, const Mat& A,
             const DecoderConfig& cfg);

/// Dense layer k: v' = D v + Theta sigma(v), sigma = (T(G1 v - b1), S(G2 v - b2), ...).
struct LayerMats {
  Mat G1;  // N x p
  Mat G2;  // m x p
  std::vector<double> theta_diag;  // p entries
  std::vector<double> d_diag;      // p entries
  double b1_coef = 0.0;  // b1 = b1_coef W x0
  double b2_coef = 0.0;  // b2 = b2_coef (y - A x0)
  double tau1 = 0.0;
  double tau2_coef = 0.0;  // soft threshold = tau2_coef * eps
  std::size_t k = 0;
  std::size_t p = 0;
};

/// Materialize layer k as dense blocks. Only meant for small problems.
LayerMats build_layer(const Mat& W, const Mat& A, const Schedule& sched, std::size_t k);

/// Apply a dense layer to the stacked state V (p x s).
Mat apply_layer(const LayerMats& lm, const Mat& W, const Mat& A, const Mat& Y, const Mat& V,
                double eps);

struct Loss {
  double value = 0.0;
  Mat grad;
};

/// (1/s) sum ||xhat_j - x_j||^2 and its gradient (2/s)(Xhat - X).
Loss mse_loss(const Mat& Xhat, const Mat& X);

/// |test - train|
double ege(double train_mse, double test_mse);

/// Mean squared reconstruction error of the decoder over the columns of X.
double decoder_mse(const Mat& W, const Mat& X, const Mat& Y, const DecoderConfig& cfg,
                   const Mat& A);

}  // namespace deconet
