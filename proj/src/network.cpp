#include "deconet/network.hpp"

#include <cmath>
#include <string>

#include "deconet/error.hpp"
#include "deconet/io.hpp"
#include "deconet/kernels.hpp"
#include "deconet/linalg.hpp"
#include "deconet/operators.hpp"

namespace deconet {

namespace {

std::uint64_t fingerprint(const Mat& W) {
  const auto d = W.data();
  return fnv1a(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(d.data()),
                                              d.size() * sizeof(double))) ^
         (W.rows() * 0x9e3779b97f4a7c15ULL + W.cols());
}

void check_shapes(const Mat& W, const Mat& Y, const Mat& A) {
  if (W.cols() != A.cols()) throw DimensionError("W and A must have the same column count n");
  if (Y.rows() != A.rows()) throw DimensionError("Y must have m rows");
}

void require_finite(const Mat& m, const char* what, std::size_t layer) {
  if (!all_finite(m)) {
    throw DivergenceError(std::string("non-finite ") + what + " at layer " + std::to_string(layer));
  }
}

// Runs the L layers; fills traces when given.
DualState run_layers(const Mat& W, const Mat& Y, const DecoderConfig& cfg, const Mat& A,
                     const Mat& X0, std::size_t upto, std::vector<LayerTrace>* traces,
                     std::vector<DualState>* states) {
  const Schedule& s = cfg.sched;
  DualState d = DualState::zeros(W.rows(), A.rows(), Y.cols());
  if (traces) traces->resize(upto);
  for (std::size_t k = 0; k < upto; ++k) {
    const Mat x = k == 0 ? X0 : primal_from_duals(W, A, X0, s.mu, s.theta[k], d);
    dual_update(W, A, Y, x, cfg.eps, s.theta[k], s.t1[k], s.t2[k], d,
                traces ? &(*traces)[k] : nullptr, cfg.fault);
    require_finite(d.z1, "state", k + 1);
    require_finite(d.z2, "state", k + 1);
    if (states) states->push_back(d);
  }
  return d;
}

// Rescale columns longer than B onto the sphere of radius B.
void clip_columns(Mat& X, const std::vector<double>& norms, double B) {
  for (std::size_t j = 0; j < X.cols(); ++j) {
    if (norms[j] > B) {
      const double f = B / norms[j];
      for (std::size_t i = 0; i < X.rows(); ++i) X(i, j) *= f;
    }
  }
}

// Reverse of x = x0 + mu^-1 (W^T w1 - A^T w2): accumulates into gW and the w-gradients.
void primal_backward(const Mat& gx, const Mat& w1, const Mat& W, const Mat& A, double mu,
                     Mat& gW, Mat& gw1, Mat& gw2) {
  const double inv = 1.0 / mu;
  kernels::add_matmul_nt(gW, inv, w1, gx);
  kernels::add_matmul(gw1, inv, W, gx);
  kernels::add_matmul(gw2, -inv, A, gx);
}

}  // namespace

void DecoderConfig::validate() const {
  sched.validate();
  if (!(B_out > 0.0)) throw InvalidArgument("B_out must be positive");
  if (eps < 0.0) throw InvalidArgument("eps must be nonnegative");
}

ForwardResult forward(const Mat& W, const Mat& Y, const DecoderConfig& cfg, const Mat& A) {
  check_shapes(W, Y, A);
  cfg.validate();
  ForwardResult out;
  ForwardCache& c = out.cache;
  const Mat X0 = kernels::matmul_tn(A, Y);
  c.final_state = run_layers(W, Y, cfg, A, X0, cfg.L(), &c.layers, nullptr);
  c.theta_L = cfg.sched.theta[cfg.L()];
  c.pre_clip = primal_from_duals(W, A, X0, cfg.mu(), c.theta_L, c.final_state);
  require_finite(c.pre_clip, "decoder output", cfg.L());
  c.norms = col_norms(c.pre_clip);
  c.B_out = cfg.B_out;
  c.w_fingerprint = fingerprint(W);
  c.batch = Y.cols();
  out.Xhat = c.pre_clip;
  clip_columns(out.Xhat, c.norms, cfg.B_out);
  return out;
}

Mat decode(const Mat& W, const Mat& Y, const DecoderConfig& cfg, const Mat& A) {
  check_shapes(W, Y, A);
  cfg.validate();
  const Mat X0 = kernels::matmul_tn(A, Y);
  const DualState d = run_layers(W, Y, cfg, A, X0, cfg.L(), nullptr, nullptr);
  Mat X = primal_from_duals(W, A, X0, cfg.mu(), cfg.sched.theta[cfg.L()], d);
  require_finite(X, "decoder output", cfg.L());
  clip_columns(X, col_norms(X), cfg.B_out);
  return X;
}

std::vector<DualState> layer_states(const Mat& W, const Mat& Y, const DecoderConfig& cfg,
                                    const Mat& A, std::size_t upto) {
  check_shapes(W, Y, A);
  if (upto > cfg.L()) throw InvalidArgument("layer_states: more layers than configured");
  const Mat X0 = kernels::matmul_tn(A, Y);
  std::vector<DualState> states;
  run_layers(W, Y, cfg, A, X0, upto, nullptr, &states);
  return states;
}

Mat stack_state(const DualState& d) { return vstack(vstack(d.z1, d.z2), vstack(d.u1, d.u2)); }

Mat backward(const ForwardCache& cache, const Mat& grad_Xhat, const Mat& W, const Mat& A,
             const DecoderConfig& cfg) {
  if (cache.layers.size() != cfg.L()) throw CacheError("cache depth does not match L");
  if (cache.w_fingerprint != fingerprint(W)) throw CacheError("cache was built for a different W");
  if (grad_Xhat.rows() != W.cols() || grad_Xhat.cols() != cache.batch) {
    throw CacheError("gradient shape does not match the cached batch");
  }
  const double mu = cfg.mu();
  const std::size_t N = W.rows();
  const std::size_t m = A.rows();
  const std::size_t s = cache.batch;

  // Norm clip.
  Mat gx = grad_Xhat;
  for (std::size_t j = 0; j < s; ++j) {
    const double r = cache.norms[j];
    if (r > cache.B_out) {
      double xg = 0.0;
      for (std::size_t i = 0; i < gx.rows(); ++i) xg += cache.pre_clip(i, j) * gx(i, j);
      const double f = cache.B_out / r;
      const double g = xg / (r * r);
      for (std::size_t i = 0; i < gx.rows(); ++i) gx(i, j) = f * (gx(i, j) - cache.pre_clip(i, j) * g);
    }
  }

  Mat gW(N, W.cols());

  // Output map with theta_L.
  Mat gz1(N, s), gu1(N, s), gz2(m, s), gu2(m, s);
  {
    const DualState& d = cache.final_state;
    const double th = cache.theta_L;
    Mat w1(N, s);
    {
      auto wd = w1.data();
      auto ud = d.u1.data();
      auto zd = d.z1.data();
      for (std::size_t i = 0; i < wd.size(); ++i) wd[i] = (1.0 - th) * ud[i] + th * zd[i];
    }
    Mat gw1(N, s), gw2(m, s);
    primal_backward(gx, w1, W, A, mu, gW, gw1, gw2);
    gz1 = gw1;
    gz1 *= th;
    gu1 = gw1;
    gu1 *= 1.0 - th;
    gz2 = gw2;
    gz2 *= th;
    gu2 = gw2;
    gu2 *= 1.0 - th;
  }

  for (std::size_t kk = cache.layers.size(); kk-- > 0;) {
    const LayerTrace& t = cache.layers[kk];
    const double th = t.theta;
    const double a = 1.0 - th;

    // z' feeds u' = (1-theta) u + theta z'.
    Mat gp1(N, s), gp2(m, s);
    {
      auto g = gp1.data();
      auto zz = gz1.data();
      auto uu = gu1.data();
      auto p = t.p1.data();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = (zz[i] + th * uu[i]) * trunc_mask(p[i], t.tau1);
        uu[i] *= a;
      }
    }
    {
      auto g = gp2.data();
      auto zz = gz2.data();
      auto uu = gu2.data();
      auto p = t.p2.data();
      for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = (zz[i] + th * uu[i]) * soft_mask(p[i], t.tau2);
        uu[i] *= a;
      }
    }

    // p1 = w1 - c1 W x,  p2 = w2 - c2 (y - A x).
    Mat gw1 = gp1;
    Mat gw2 = gp2;
    kernels::add_matmul_nt(gW, -t.c1, gp1, t.x);
    Mat gxl = kernels::matmul_tn(W, gp1);
    gxl *= -t.c1;
    kernels::add_matmul_tn(gxl, t.c2, A, gp2);

    // x itself came from the duals (except at the first layer, where x = x0).
    if (kk > 0) primal_backward(gxl, t.w1, W, A, mu, gW, gw1, gw2);

    // w = (1-theta) u + theta z.
    auto assign = [th, a](Mat& gz, Mat& gu, const Mat& gw) {
      auto z = gz.data();
      auto u = gu.data();
      auto w = gw.data();
      for (std::size_t i = 0; i < z.size(); ++i) {
        z[i] = th * w[i];
        u[i] += a * w[i];
      }
    };
    assign(gz1, gu1, gw1);
    assign(gz2, gu2, gw2);
  }
  return gW;
}

LayerMats build_layer(const Mat& W, const Mat& A, const Schedule& sched, std::size_t k) {
  if (W.cols() != A.cols()) throw DimensionError("W and A must have the same column count n");
  if (k >= sched.L) throw InvalidArgument("build_layer: k must be below L");
  const std::size_t N = W.rows();
  const std::size_t m = A.rows();
  const std::size_t p = 2 * N + 2 * m;
  const double th = sched.theta[k];
  const double t1 = sched.t1[k];
  const double t2 = sched.t2[k];
  const double mu = sched.mu;
  const double c1 = t1 / (th * mu);
  const double c2 = t2 / (th * mu);

  const Mat WWt = kernels::matmul_nt(W, W);
  const Mat WAt = kernels::matmul_nt(W, A);
  const Mat AWt = kernels::matmul_nt(A, W);
  const Mat AAt = kernels::matmul_nt(A, A);

  LayerMats lm;
  lm.k = k;
  lm.p = p;
  lm.G1 = Mat(N, p);
  lm.G2 = Mat(m, p);
  // Column offsets of z1, z2, u1, u2.
  const std::size_t oz1 = 0, oz2 = N, ou1 = N + m, ou2 = 2 * N + m;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      const double base = (i == j ? 1.0 : 0.0) - c1 * WWt(i, j);
      lm.G1(i, oz1 + j) = th * base;
      lm.G1(i, ou1 + j) = (1.0 - th) * base;
    }
    for (std::size_t j = 0; j < m; ++j) {
      lm.G1(i, oz2 + j) = t1 / mu * WAt(i, j);
      lm.G1(i, ou2 + j) = (1.0 - th) * c1 * WAt(i, j);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < N; ++j) {
      lm.G2(i, oz1 + j) = t2 / mu * AWt(i, j);
      lm.G2(i, ou1 + j) = (1.0 - th) * c2 * AWt(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double base = (i == j ? 1.0 : 0.0) - c2 * AAt(i, j);
      lm.G2(i, oz2 + j) = th * base;
      lm.G2(i, ou2 + j) = (1.0 - th) * base;
    }
  }
  lm.theta_diag.assign(p, 1.0);
  lm.d_diag.assign(p, 0.0);
  for (std::size_t i = N + m; i < p; ++i) {
    lm.theta_diag[i] = th;
    lm.d_diag[i] = 1.0 - th;
  }
  lm.b1_coef = t1 / th;
  lm.b2_coef = t2 / th;
  lm.tau1 = t1 / th;
  lm.tau2_coef = t2 / th;
  return lm;
}

Mat apply_layer(const LayerMats& lm, const Mat& W, const Mat& A, const Mat& Y, const Mat& V,
                double eps) {
  const std::size_t N = W.rows();
  const std::size_t m = A.rows();
  if (V.rows() != lm.p || Y.cols() != V.cols()) throw DimensionError("apply_layer: bad state");
  const Mat X0 = kernels::matmul_tn(A, Y);
  Mat b1 = kernels::matmul(W, X0);
  b1 *= lm.b1_coef;
  Mat b2 = Y;
  kernels::add_matmul(b2, -1.0, A, X0);
  b2 *= lm.b2_coef;
  const Mat q1 = kernels::matmul(lm.G1, V) - b1;
  const Mat q2 = kernels::matmul(lm.G2, V) - b2;
  const double tau2 = lm.tau2_coef * eps;
  Mat out(lm.p, V.cols());
  for (std::size_t j = 0; j < V.cols(); ++j) {
    for (std::size_t i = 0; i < N; ++i) {
      const double sig = trunc_scalar(q1(i, j), lm.tau1);
      out(i, j) = lm.d_diag[i] * V(i, j) + lm.theta_diag[i] * sig;
      const std::size_t r = N + m + i;
      out(r, j) = lm.d_diag[r] * V(r, j) + lm.theta_diag[r] * sig;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double sig = soft_scalar(q2(i, j), tau2);
      const std::size_t r0 = N + i;
      out(r0, j) = lm.d_diag[r0] * V(r0, j) + lm.theta_diag[r0] * sig;
      const std::size_t r = 2 * N + m + i;
      out(r, j) = lm.d_diag[r] * V(r, j) + lm.theta_diag[r] * sig;
    }
  }
  return out;
}

Loss mse_loss(const Mat& Xhat, const Mat& X) {
  require_same_shape(Xhat, X, "mse_loss");
  const double s = static_cast<double>(X.cols());
  Loss l;
  l.grad = Xhat - X;
  double acc = 0.0;
  for (double v : l.grad.data()) acc += v * v;
  l.value = acc / s;
  l.grad *= 2.0 / s;
  return l;
}

double ege(double train_mse, double test_mse) { return std::abs(test_mse - train_mse); }

double decoder_mse(const Mat& W, const Mat& X, const Mat& Y, const DecoderConfig& cfg,
                   const Mat& A) {
  return mse_loss(decode(W, Y, cfg, A), X).value;
}

}  // namespace deconet
