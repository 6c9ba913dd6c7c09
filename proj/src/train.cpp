#include "deconet/train.hpp"

#include <cmath>
#include <limits>

#include "deconet/data.hpp"
#include "deconet/error.hpp"
#include "deconet/io.hpp"
#include "deconet/linalg.hpp"
#include "deconet/rng.hpp"

namespace deconet {

TrainState TrainState::start(Mat W) {
  TrainState ts;
  ts.m = Mat(W.rows(), W.cols());
  ts.v = Mat(W.rows(), W.cols());
  ts.W = std::move(W);
  ts.best_ege = std::numeric_limits<double>::infinity();
  return ts;
}

TrainState adam_step(const TrainState& ts, const Mat& grad_W, double lr, double beta1,
                     double beta2, double eps_adam, std::optional<double> cap) {
  require_same_shape(ts.W, grad_W, "adam_step");
  require_same_shape(ts.W, ts.m, "adam_step moments");
  require_same_shape(ts.W, ts.v, "adam_step moments");
  TrainState out = ts;
  out.step = ts.step + 1;
  const double t = static_cast<double>(out.step);
  const double bc1 = 1.0 - std::pow(beta1, t);
  const double bc2 = 1.0 - std::pow(beta2, t);
  auto w = out.W.data();
  auto m = out.m.data();
  auto v = out.v.data();
  auto g = grad_W.data();
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mh = m[i] / bc1;
    const double vh = v[i] / bc2;
    w[i] -= lr * mh / (std::sqrt(vh) + eps_adam);
  }
  if (cap) out.W = project_spectral_ball(out.W, *cap);
  return out;
}

TrainResult train(const Mat& W_init, const Mat& A, const TrainData& data, const DecoderConfig& cfg,
                  const TrainOptions& opts,
                  const std::function<void(const EpochMetrics&)>& on_epoch) {
  if (data.X_train.empty() || data.X_test.empty()) throw InvalidArgument("train: empty split");
  if (opts.batch < 1) throw InvalidArgument("train: batch must be at least 1");
  if (opts.max_epochs < 1) throw InvalidArgument("train: max_epochs must be at least 1");
  cfg.validate();

  TrainState ts = TrainState::start(W_init);
  TrainResult res;
  res.W = W_init;
  Rng shuffle(opts.shuffle_seed);
  const std::size_t s = data.X_train.cols();

  for (std::size_t epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    const auto batches = make_batches(s, opts.batch, shuffle);
    double grad_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Mat Xb = data.X_train.gather_cols(batches[b]);
      const Mat Yb = data.Y_train.gather_cols(batches[b]);
      const ForwardResult fr = forward(ts.W, Yb, cfg, A);
      const Loss loss = mse_loss(fr.Xhat, Xb);
      if (!std::isfinite(loss.value)) {
        throw DivergenceError("training loss became non-finite at epoch " +
                              std::to_string(epoch) + ", batch " + std::to_string(b) +
                              " (lr " + fmt_real(opts.lr) + ")");
      }
      const Mat g = backward(fr.cache, loss.grad, ts.W, A, cfg);
      grad_sum += frobenius_norm(g);
      ts = adam_step(ts, g, opts.lr, opts.beta1, opts.beta2, opts.eps_adam, opts.lambda_cap);
      if (!all_finite(ts.W)) {
        throw DivergenceError("W became non-finite at epoch " + std::to_string(epoch));
      }
    }

    EpochMetrics e;
    e.epoch = epoch;
    e.train_mse = decoder_mse(ts.W, data.X_train, data.Y_train, cfg, A);
    e.test_mse = decoder_mse(ts.W, data.X_test, data.Y_test, cfg, A);
    if (!std::isfinite(e.train_mse) || !std::isfinite(e.test_mse)) {
      throw DivergenceError("evaluation MSE became non-finite at epoch " + std::to_string(epoch));
    }
    e.ege = ege(e.train_mse, e.test_mse);
    e.grad_norm = grad_sum / static_cast<double>(batches.size());
    e.w_spectral = spectral_norm_best(ts.W).value;
    res.history.push_back(e);
    if (on_epoch) on_epoch(e);

    if (e.ege < ts.best_ege) {
      ts.best_ege = e.ege;
      ts.since_improvement = 0;
      res.W = ts.W;
      res.best_epoch = epoch;
    } else if (++ts.since_improvement >= opts.patience) {
      break;
    }
  }
  return res;
}

std::string metrics_csv_header() { return "epoch,train_mse,test_mse,ege,grad_norm,w_spectral\n"; }

std::string metrics_csv_row(const EpochMetrics& e) {
  return std::to_string(e.epoch) + "," + fmt_real(e.train_mse) + "," + fmt_real(e.test_mse) + "," +
         fmt_real(e.ege) + "," + fmt_real(e.grad_norm) + "," + fmt_real(e.w_spectral) + "\n";
}

}  // namespace deconet
