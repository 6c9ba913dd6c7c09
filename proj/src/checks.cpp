#include "deconet/checks.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "deconet/bounds.hpp"
#include "deconet/data.hpp"
#include "deconet/error.hpp"
#include "deconet/kernels.hpp"
#include "deconet/linalg.hpp"
#include "deconet/network.hpp"

namespace deconet {

namespace {

void tally(FamilyResult& r, double measured, double allowed) {
  ++r.checks;
  const double ratio = allowed > 0.0 ? measured / allowed : (measured > 0.0 ? INFINITY : 0.0);
  r.worst_ratio = std::max(r.worst_ratio, ratio);
  if (measured > allowed) ++r.violations;
}

BoundInputs inputs_for(const BoundInstance& inst, std::size_t L, const CheckSizes& sz) {
  BoundInputs bi;
  bi.lambda = inst.lambda;
  bi.a_norm = inst.a_norm;
  bi.sched = resize_schedule(inst.sched, L);
  bi.L = L;
  bi.N = sz.N;
  bi.n = sz.n;
  bi.m = sz.m;
  bi.s = sz.s;
  bi.Y_fro = frobenius_norm(inst.Y);
  const auto [b_in, b_out] = estimate_bounds_constants(inst.X, inst.Y);
  bi.B_in = b_in;
  bi.B_out = b_out;
  return bi;
}

DecoderConfig decoder_for(const BoundInstance& inst, std::size_t L, double B_out, LayerFault fault) {
  DecoderConfig cfg;
  cfg.sched = resize_schedule(inst.sched, L);
  cfg.B_out = B_out;
  cfg.eps = inst.eps;
  cfg.fault = fault;
  return cfg;
}

// Two operators in the ball; odd trials give a near pair.
std::pair<Mat, Mat> sample_pair(Rng& rng, const BoundInstance& inst, const CheckSizes& sz,
                                std::size_t trial) {
  Mat W1 = random_with_norm(rng, sz.N, sz.n, inst.lambda * (0.3 + 0.7 * rng.uniform()));
  Mat W2;
  if (trial % 2 == 0) {
    W2 = random_with_norm(rng, sz.N, sz.n, inst.lambda * (0.3 + 0.7 * rng.uniform()));
  } else {
    W2 = W1;
    for (double& v : W2.data()) v += 1e-3 * rng.normal();
    W2 = project_spectral_ball(W2, inst.lambda);
  }
  return {std::move(W1), std::move(W2)};
}

// Largest singular value from a full SVD; robust to clustered spectra.
double svd_norm(const Mat& M) {
  Eigen::MatrixXd e(M.rows(), M.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) e(i, j) = M(i, j);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues()(0);
}

}  // namespace

Mat random_with_norm(Rng& rng, std::size_t N, std::size_t n, double radius) {
  Mat W(N, n);
  for (double& v : W.data()) v = rng.normal();
  W *= radius / spectral_norm(W).value;
  return W;
}

BoundInstance sample_instance(Rng& rng, const CheckSizes& sz) {
  for (;;) {
    BoundInstance inst;
    inst.A = gaussian_measurement(sz.m, sz.n, rng.next_u64());
    inst.a_norm = spectral_norm(inst.A).value;
    inst.X = gen_synthetic(sz.n, sz.s, rng.next_u64());
    const Measurement meas = measure(inst.X, inst.A, sz.noise_std, rng.next_u64());
    inst.Y = meas.Y;
    inst.eps = meas.eps;
    const double alpha = 0.5 + 0.45 * rng.uniform();
    const double beta = 0.5 + 0.45 * rng.uniform();
    inst.sched = build_geometric(sz.L, sz.mu, alpha, beta, sz.L_tilde);
    inst.lambda = 0.5 + 2.5 * rng.uniform();
    if (check_assumptions(inst.sched, inst.lambda, inst.a_norm).all_hold) return inst;
  }
}

FamilyResult check_state_norm(std::size_t trials, std::uint64_t seed, LayerFault fault) {
  FamilyResult r{"state_norm"};
  Rng rng(seed);
  const CheckSizes sz;
  for (std::size_t t = 0; t < trials; ++t) {
    const BoundInstance inst = sample_instance(rng, sz);
    const Mat W = random_with_norm(rng, sz.N, sz.n, inst.lambda * (0.3 + 0.7 * rng.uniform()));
    const BoundInputs bi = inputs_for(inst, sz.L, sz);
    const auto states = layer_states(W, inst.Y, decoder_for(inst, sz.L, bi.B_out, fault), inst.A, sz.L);
    for (std::size_t k = 1; k <= sz.L; ++k) {
      const double measured = frobenius_norm(stack_state(states[k - 1]));
      const NormBound nb = f_norm_bound(bi, k);
      tally(r, measured, nb.exact);
      tally(r, measured, nb.simplified);
    }
  }
  return r;
}

FamilyResult check_state_lipschitz(std::size_t trials, std::uint64_t seed, LayerFault fault) {
  FamilyResult r{"state_lipschitz"};
  Rng rng(seed);
  const CheckSizes sz;
  for (std::size_t t = 0; t < trials; ++t) {
    const BoundInstance inst = sample_instance(rng, sz);
    const auto [W1, W2] = sample_pair(rng, inst, sz, t);
    const double dw = spectral_norm(W1 - W2).value;
    for (std::size_t L : {1, 2, 5}) {
      const BoundInputs bi = inputs_for(inst, L, sz);
      const DecoderConfig cfg = decoder_for(inst, L, bi.B_out, fault);
      const Mat f1 = stack_state(layer_states(W1, inst.Y, cfg, inst.A, L).back());
      const Mat f2 = stack_state(layer_states(W2, inst.Y, cfg, inst.A, L).back());
      const double measured = frobenius_norm(f1 - f2);
      tally(r, measured, k_l_general(bi).K_L * dw);
      tally(r, measured, k_l_simplified(bi).K_L * dw);
    }
  }
  return r;
}

FamilyResult check_decoder_lipschitz(std::size_t trials, std::uint64_t seed, LayerFault fault) {
  FamilyResult r{"decoder_lipschitz"};
  Rng rng(seed);
  const CheckSizes sz;
  for (std::size_t t = 0; t < trials; ++t) {
    const BoundInstance inst = sample_instance(rng, sz);
    const auto [W1, W2] = sample_pair(rng, inst, sz, t);
    const double dw = frobenius_norm(W1 - W2);
    const BoundInputs bi = inputs_for(inst, sz.L, sz);
    const DecoderConfig cfg = decoder_for(inst, sz.L, bi.B_out, fault);
    const double measured = frobenius_norm(decode(W1, inst.Y, cfg, inst.A) - decode(W2, inst.Y, cfg, inst.A));
    const double allowed = (inst.lambda + inst.a_norm) / sz.mu * k_l_general(bi).K_L * dw;
    tally(r, measured, allowed);
  }
  return r;
}

FamilyResult check_gradient(std::size_t trials, std::uint64_t seed, LayerFault fault) {
  FamilyResult r{"gradient"};
  Rng rng(seed);
  CheckSizes sz;
  sz.n = 6;
  sz.m = 3;
  sz.N = 8;
  sz.s = 4;
  sz.L = 3;
  const double h = 1e-6;
  const double allowed = 1e-5;
  std::size_t done = 0;
  while (done < trials) {
    const BoundInstance inst = sample_instance(rng, sz);
    const Mat W = random_with_norm(rng, sz.N, sz.n, inst.lambda);
    const auto [b_in, b_out] = estimate_bounds_constants(inst.X, inst.Y);
    (void)b_in;
    DecoderConfig cfg = decoder_for(inst, sz.L, 0.8 * b_out, fault);
    const ForwardResult fr = forward(W, inst.Y, cfg, inst.A);
    // Skip draws where a finite-difference step could cross a kink.
    bool near_kink = false;
    for (const LayerTrace& lt : fr.cache.layers) {
      for (double v : lt.p1.data()) near_kink |= std::abs(std::abs(v) - lt.tau1) < 1e-4;
      for (double v : lt.p2.data()) near_kink |= std::abs(std::abs(v) - lt.tau2) < 1e-4;
    }
    for (double nv : fr.cache.norms) near_kink |= std::abs(nv - cfg.B_out) < 1e-4;
    if (near_kink) continue;
    ++done;

    Mat G(sz.n, sz.s);
    for (double& v : G.data()) v = rng.normal();
    const Mat grad = backward(fr.cache, G, W, inst.A, cfg);
    auto objective = [&](const Mat& Wp) {
      const Mat X = decode(Wp, inst.Y, cfg, inst.A);
      return dot(X.data(), G.data());
    };
    double gmax = 0.0;
    Mat fd(sz.N, sz.n);
    for (std::size_t i = 0; i < W.size(); ++i) {
      Mat Wp = W, Wm = W;
      Wp.data()[i] += h;
      Wm.data()[i] -= h;
      fd.data()[i] = (objective(Wp) - objective(Wm)) / (2.0 * h);
      gmax = std::max(gmax, std::abs(fd.data()[i]));
    }
    const double floor = std::max(1e-2 * gmax, 1e-12);
    double worst = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i) {
      const double err = std::abs(grad.data()[i] - fd.data()[i]);
      worst = std::max(worst, err / std::max(std::abs(fd.data()[i]), floor));
    }
    tally(r, worst, allowed);
  }
  return r;
}

FamilyResult check_clipping(std::size_t trials, std::uint64_t seed, LayerFault fault) {
  FamilyResult r{"clipping"};
  Rng rng(seed);
  const CheckSizes sz;
  for (std::size_t t = 0; t < trials; ++t) {
    const BoundInstance inst = sample_instance(rng, sz);
    const Mat W = random_with_norm(rng, sz.N, sz.n, 0.5 + 5.0 * rng.uniform());
    const auto [b_in, b_out] = estimate_bounds_constants(inst.X, inst.Y);
    (void)b_in;
    // Clip level drawn below and above the signal norms so both branches run.
    const double B = b_out * (0.2 + 1.3 * rng.uniform());
    const DecoderConfig cfg = decoder_for(inst, sz.L, B, fault);
    const Mat X = decode(W, inst.Y, cfg, inst.A);
    for (double nv : col_norms(X)) tally(r, nv, B + 1e-12);
  }
  return r;
}

FamilyResult check_block_norm(std::size_t trials, std::uint64_t seed) {
  FamilyResult r{"block_norm"};
  Rng rng(seed);
  const CheckSizes sz;
  for (std::size_t t = 0; t < trials; ++t) {
    const BoundInstance inst = sample_instance(rng, sz);
    const Mat W = random_with_norm(rng, sz.N, sz.n, inst.lambda * (0.3 + 0.7 * rng.uniform()));
    const BoundInputs bi = inputs_for(inst, sz.L, sz);
    const GammaSeq g = gamma_seq(bi);
    for (std::size_t k = 0; k < sz.L; ++k) {
      const LayerMats lm = build_layer(W, inst.A, inst.sched, k);
      const double lhs = 2.0 * svd_norm(lm.G1) + 2.0 * svd_norm(lm.G2) + 1.0;
      tally(r, lhs, g.gamma_k[k]);
      tally(r, g.gamma_k[k], g.gamma);
    }
  }
  return r;
}

FamilyResult run_family(const std::string& name, std::size_t trials, std::uint64_t seed,
                        LayerFault fault) {
  const std::uint64_t s = sub_seed(seed, name);
  if (name == "state_norm") return check_state_norm(trials, s, fault);
  if (name == "state_lipschitz") return check_state_lipschitz(trials, s, fault);
  if (name == "decoder_lipschitz") return check_decoder_lipschitz(trials, s, fault);
  if (name == "gradient") return check_gradient(trials, s, fault);
  if (name == "clipping") return check_clipping(trials, s, fault);
  if (name == "block_norm") return check_block_norm(trials, s);
  throw InvalidArgument("unknown verification family '" + name + "'");
}

}  // namespace deconet
