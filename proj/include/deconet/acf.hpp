#pragma once

#include <cstddef>
#include <vector>

#include "deconet/matrix.hpp"
#include "deconet/schedule.hpp"

namespace deconet {

/// Dual iterates, one column per sample: z1, u1 are N x s; z2, u2 are m x s.
struct DualState {
  Mat z1, u1, z2, u2;
  static DualState zeros(std::size_t N, std::size_t m, std::size_t s);
};

/// The smoothed analysis-l1 problem min ||Wx||_1 + mu/2 ||x - x0||^2
/// subject to the data constraint of radius eps, for a batch of columns.
struct AcfProblem {
  Mat A;   // m x n
  Mat W;   // N x n
  Mat Y;   // m x s
  Mat X0;  // n x s
  double mu = 100.0;
  double eps = 0.0;
};

/// Problem with x0 = A^T y per column.
AcfProblem make_problem(Mat A, Mat W, Mat Y, double mu, double eps);

struct AcfState {
  Mat x;  // x_k, consistent with the duals and theta
  DualState d;
  double theta = 1.0;
  std::size_t k = 0;
};

AcfState initial_state(const AcfProblem& prob);

/// Intermediate values of one dual update, kept for the backward pass.
struct LayerTrace {
  Mat x;   // primal point the update linearizes at
  Mat w1;  // (1-theta) u1 + theta z1
  Mat w2;
  Mat p1;  // argument of the truncation
  Mat p2;  // argument of the soft threshold
  double theta = 1.0;
  double tau1 = 0.0;  // truncation level t1 / theta
  double tau2 = 0.0;  // soft-threshold level eps t2 / theta
  double c1 = 0.0;    // t1 / theta
  double c2 = 0.0;    // t2 / theta
};

/// Deliberate mistakes for mutation testing.
enum class LayerFault { none, flip_g1_sign };

/// x0 + mu^-1 (W^T w1 - A^T w2) with w = (1-theta) u + theta z.
Mat primal_from_duals(const Mat& W, const Mat& A, const Mat& X0, double mu, double theta,
                      const DualState& d);

/// Advance the duals one iteration from the primal point x (in place).
void dual_update(const Mat& W, const Mat& A, const Mat& Y, const Mat& x, double eps,
                 double theta, double t1, double t2, DualState& d, LayerTrace* trace = nullptr,
                 LayerFault fault = LayerFault::none);

/// One iteration: dual update with (t1, t2, state.theta), then theta <- theta_next
/// and x <- x_{k+1}.
AcfState acf_step(const AcfState& state, const AcfProblem& prob, double t1, double t2,
                  double theta_next);
/// Same, with theta_next from the recursive rule.
AcfState acf_step(const AcfState& state, const AcfProblem& prob, double t1, double t2);

double next_acf_theta(double theta) noexcept;

struct AcfResult {
  Mat x_hat;
  std::vector<double> objective;  // smoothed objective of x_k, k = 0..iters
  std::vector<double> l1;         // ||W x_k||_1 summed over columns
  std::vector<double> residual;   // ||A x_k - y||_F
};

/// Objective ||W x||_1 + mu/2 ||x - x0||^2 summed over columns.
double smoothed_objective(const AcfProblem& prob, const Mat& x);

/// Run `iters` iterations with step sizes and theta from `sched` (needs sched.L >= iters).
AcfResult acf_solve(const AcfProblem& prob, const Schedule& sched, std::size_t iters);

/// Mean ||x_hat_i - x_i||^2 over the columns of X.
double acf_baseline_mse(const Mat& X, const Mat& Y, const Mat& A, const Mat& W, double mu,
                        double eps, const Schedule& sched, std::size_t iters);

}  // namespace deconet
