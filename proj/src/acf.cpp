#include "deconet/acf.hpp"

#include <cmath>
#include <string>

#include "deconet/error.hpp"
#include "deconet/kernels.hpp"
#include "deconet/linalg.hpp"
#include "deconet/operators.hpp"

namespace deconet {

namespace {

// (1-theta) u + theta z
Mat blend(const Mat& u, const Mat& z, double theta) {
  Mat w(u.rows(), u.cols());
  auto wd = w.data();
  auto ud = u.data();
  auto zd = z.data();
  const double a = 1.0 - theta;
  for (std::size_t i = 0; i < wd.size(); ++i) wd[i] = a * ud[i] + theta * zd[i];
  return w;
}

void check_problem(const AcfProblem& p) {
  const std::size_t n = p.A.cols();
  if (p.W.cols() != n) throw DimensionError("W and A disagree on n");
  if (p.Y.rows() != p.A.rows()) throw DimensionError("Y rows must equal m");
  if (p.X0.rows() != n || p.X0.cols() != p.Y.cols()) throw DimensionError("X0 must be n x s");
  if (!(p.mu > 0.0)) throw InvalidArgument("mu must be positive");
  if (p.eps < 0.0) throw InvalidArgument("eps must be nonnegative");
}

void check_state(const AcfState& st, const AcfProblem& p) {
  const std::size_t s = p.Y.cols();
  if (!st.x.same_shape(p.X0) || st.d.z1.rows() != p.W.rows() || st.d.z1.cols() != s ||
      st.d.z2.rows() != p.A.rows() || st.d.z2.cols() != s || !st.d.u1.same_shape(st.d.z1) ||
      !st.d.u2.same_shape(st.d.z2)) {
    throw DimensionError("ACF state does not match the problem");
  }
}

}  // namespace

DualState DualState::zeros(std::size_t N, std::size_t m, std::size_t s) {
  return {Mat(N, s), Mat(N, s), Mat(m, s), Mat(m, s)};
}

AcfProblem make_problem(Mat A, Mat W, Mat Y, double mu, double eps) {
  AcfProblem p;
  p.X0 = kernels::matmul_tn(A, Y);
  p.A = std::move(A);
  p.W = std::move(W);
  p.Y = std::move(Y);
  p.mu = mu;
  p.eps = eps;
  check_problem(p);
  return p;
}

AcfState initial_state(const AcfProblem& prob) {
  check_problem(prob);
  AcfState st;
  st.x = prob.X0;
  st.d = DualState::zeros(prob.W.rows(), prob.A.rows(), prob.Y.cols());
  st.theta = 1.0;
  st.k = 0;
  return st;
}

Mat primal_from_duals(const Mat& W, const Mat& A, const Mat& X0, double mu, double theta,
                      const DualState& d) {
  Mat x = X0;
  const double inv = 1.0 / mu;
  kernels::add_matmul_tn(x, inv, W, blend(d.u1, d.z1, theta));
  kernels::add_matmul_tn(x, -inv, A, blend(d.u2, d.z2, theta));
  return x;
}

void dual_update(const Mat& W, const Mat& A, const Mat& Y, const Mat& x, double eps,
                 double theta, double t1, double t2, DualState& d, LayerTrace* trace,
                 LayerFault fault) {
  const double c1 = t1 / theta;
  const double c2 = t2 / theta;
  const double tau1 = c1;
  const double tau2 = c2 * eps;

  Mat w1 = blend(d.u1, d.z1, theta);
  Mat w2 = blend(d.u2, d.z2, theta);

  // p1 = w1 - c1 W x
  Mat p1 = w1;
  kernels::add_matmul(p1, fault == LayerFault::flip_g1_sign ? c1 : -c1, W, x);
  // p2 = w2 - c2 (y - A x)
  Mat p2 = w2;
  {
    Mat r = Y;
    kernels::add_matmul(r, -1.0, A, x);
    auto pd = p2.data();
    auto rd = r.data();
    for (std::size_t i = 0; i < pd.size(); ++i) pd[i] -= c2 * rd[i];
  }

  const double a = 1.0 - theta;
  {
    auto pd = p1.data();
    auto zd = d.z1.data();
    auto ud = d.u1.data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
      zd[i] = trunc_scalar(pd[i], tau1);
      ud[i] = a * ud[i] + theta * zd[i];
    }
  }
  {
    auto pd = p2.data();
    auto zd = d.z2.data();
    auto ud = d.u2.data();
    for (std::size_t i = 0; i < pd.size(); ++i) {
      zd[i] = soft_scalar(pd[i], tau2);
      ud[i] = a * ud[i] + theta * zd[i];
    }
  }

  if (trace) {
    trace->x = x;
    trace->w1 = std::move(w1);
    trace->w2 = std::move(w2);
    trace->p1 = std::move(p1);
    trace->p2 = std::move(p2);
    trace->theta = theta;
    trace->tau1 = tau1;
    trace->tau2 = tau2;
    trace->c1 = c1;
    trace->c2 = c2;
  }
}

double next_acf_theta(double theta) noexcept {
  return 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (theta * theta)));
}

AcfState acf_step(const AcfState& state, const AcfProblem& prob, double t1, double t2,
                  double theta_next) {
  check_state(state, prob);
  AcfState next = state;
  dual_update(prob.W, prob.A, prob.Y, state.x, prob.eps, state.theta, t1, t2, next.d);
  next.theta = theta_next;
  next.k = state.k + 1;
  next.x = primal_from_duals(prob.W, prob.A, prob.X0, prob.mu, theta_next, next.d);
  if (!all_finite(next.x) || !all_finite(next.d.z1) || !all_finite(next.d.z2)) {
    throw DivergenceError("ACF iterate became non-finite at step " + std::to_string(next.k));
  }
  return next;
}

AcfState acf_step(const AcfState& state, const AcfProblem& prob, double t1, double t2) {
  return acf_step(state, prob, t1, t2, next_acf_theta(state.theta));
}

double smoothed_objective(const AcfProblem& prob, const Mat& x) {
  const Mat wx = kernels::matmul(prob.W, x);
  double l1 = 0.0;
  for (double v : wx.data()) l1 += std::abs(v);
  double sq = 0.0;
  auto xd = x.data();
  auto x0 = prob.X0.data();
  for (std::size_t i = 0; i < xd.size(); ++i) sq += (xd[i] - x0[i]) * (xd[i] - x0[i]);
  return l1 + 0.5 * prob.mu * sq;
}

AcfResult acf_solve(const AcfProblem& prob, const Schedule& sched, std::size_t iters) {
  if (iters < 1) throw InvalidArgument("acf_solve needs at least one iteration");
  if (sched.L < iters) throw InvalidArgument("schedule is shorter than the iteration count");
  AcfState st = initial_state(prob);
  AcfResult res;
  auto record = [&](const Mat& x) {
    const Mat wx = kernels::matmul(prob.W, x);
    double l1 = 0.0;
    for (double v : wx.data()) l1 += std::abs(v);
    Mat r = kernels::matmul(prob.A, x);
    r -= prob.Y;
    const double dist = frobenius_norm(x - prob.X0);
    res.l1.push_back(l1);
    res.objective.push_back(l1 + 0.5 * prob.mu * dist * dist);
    res.residual.push_back(frobenius_norm(r));
  };
  record(st.x);
  for (std::size_t k = 0; k < iters; ++k) {
    st.theta = sched.theta[k];
    st = acf_step(st, prob, sched.t1[k], sched.t2[k], sched.theta[k + 1]);
    record(st.x);
  }
  res.x_hat = std::move(st.x);
  return res;
}

double acf_baseline_mse(const Mat& X, const Mat& Y, const Mat& A, const Mat& W, double mu,
                        double eps, const Schedule& sched, std::size_t iters) {
  if (X.empty() || Y.empty()) throw InvalidArgument("acf_baseline_mse: empty dataset");
  if (X.cols() != Y.cols()) throw DimensionError("X and Y sample counts differ");
  const AcfProblem prob = make_problem(A, W, Y, mu, eps);
  const AcfResult res = acf_solve(prob, sched, iters);
  double total = 0.0;
  auto xh = res.x_hat.data();
  auto xd = X.data();
  for (std::size_t i = 0; i < xd.size(); ++i) total += (xh[i] - xd[i]) * (xh[i] - xd[i]);
  return total / static_cast<double>(X.cols());
}

}  // namespace deconet
