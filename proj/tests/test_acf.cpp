#include <doctest.h>

#include <cmath>

#include "deconet/acf.hpp"
#include "deconet/error.hpp"
#include "deconet/kernels.hpp"
#include "deconet/linalg.hpp"
#include "deconet/network.hpp"
#include "deconet/operators.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace deconet;

namespace {

struct Tiny {
  Mat A, W, X, Y;
};

Tiny tiny(gen::Source& g, std::size_t n, std::size_t m, std::size_t N, std::size_t s) {
  Tiny t;
  t.A = gaussian_measurement(m, n, g.engine()());
  t.W = g.matrix(N, n, 1.0 / std::sqrt(static_cast<double>(n)));
  t.X = g.matrix(n, s);
  t.Y = kernels::matmul(t.A, t.X);
  for (double& v : t.Y.data()) v += 0.01 * g.normal();
  return t;
}

double rel_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("zero data is a fixed point") {
  gen::Source g(41);
  Tiny t = tiny(g, 8, 4, 12, 3);
  const AcfProblem prob = make_problem(t.A, t.W, Mat(4, 3), 10.0, 0.1);
  AcfState st = initial_state(prob);
  for (int k = 0; k < 20; ++k) {
    st = acf_step(st, prob, 1.0, 1.0);
    CHECK(frobenius_norm(st.x) == 0.0);
    CHECK(frobenius_norm(st.d.z1) + frobenius_norm(st.d.z2) + frobenius_norm(st.d.u1) +
              frobenius_norm(st.d.u2) ==
          0.0);
  }
  const AcfResult r = acf_solve(prob, build_acf(10, 10.0), 10);
  CHECK(frobenius_norm(r.x_hat) == 0.0);
  CHECK(r.objective.back() == 0.0);
}

TEST_CASE("first step from zero") {
  gen::Source g(42);
  Tiny t = tiny(g, 8, 4, 12, 5);
  const double eps = 0.05;
  const AcfProblem prob = make_problem(t.A, t.W, t.Y, 10.0, eps);
  const AcfState st = acf_step(initial_state(prob), prob, 1.0, 1.0, 1.0);
  const Mat X0 = kernels::matmul_tn(t.A, t.Y);
  CHECK(st.x.same_shape(X0));
  const Mat Wx0 = kernels::matmul(t.W, X0);
  Mat r = t.Y;
  kernels::add_matmul(r, -1.0, t.A, X0);
  for (std::size_t i = 0; i < Wx0.size(); ++i) {
    CHECK(st.d.z1.data()[i] == trunc_scalar(-Wx0.data()[i], 1.0));
    CHECK(st.d.u1.data()[i] == st.d.z1.data()[i]);
  }
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(st.d.z2.data()[i] == -soft_scalar(r.data()[i], eps));
}

TEST_CASE("one layer of the network is one solver step") {
  gen::Source g(43);
  for (int trial = 0; trial < 10; ++trial) {
    Tiny t = tiny(g, 8, 4, 12, 6);
    DecoderConfig cfg;
    cfg.sched = build_geometric(1, 10.0, 0.9, 0.8, 100.0);
    cfg.eps = 0.05;
    cfg.B_out = 1e9;
    const Mat net = decode(t.W, t.Y, cfg, t.A);
    const AcfProblem prob = make_problem(t.A, t.W, t.Y, 10.0, cfg.eps);
    const AcfState st = acf_step(initial_state(prob), prob, 1.0, 1.0, cfg.sched.theta[1]);
    for (std::size_t i = 0; i < net.size(); ++i) CHECK(std::abs(net.data()[i] - st.x.data()[i]) <= 1e-12);
  }
}

TEST_CASE("zero operator leaves only the measurement terms") {
  gen::Source g(44);
  Tiny t = tiny(g, 8, 4, 12, 2);
  const AcfProblem prob = make_problem(t.A, Mat(12, 8), t.Y, 10.0, 0.0);
  AcfState st = initial_state(prob);
  for (int k = 0; k < 5; ++k) {
    st = acf_step(st, prob, 1.0, 1.0);
    CHECK(frobenius_norm(st.d.z1) == 0.0);
    Mat expect = prob.X0;
    Mat w2 = (1.0 - st.theta) * st.d.u2 + st.theta * st.d.z2;
    kernels::add_matmul_tn(expect, -1.0 / prob.mu, t.A, w2);
    for (std::size_t i = 0; i < expect.size(); ++i)
      CHECK(std::abs(expect.data()[i] - st.x.data()[i]) <= 1e-14);
  }
}

TEST_CASE("solver matches an independent transcription of the iteration") {
  gen::Source g(45);
  for (int trial = 0; trial < 10; ++trial) {
    Tiny t = tiny(g, 8, 4, 12, 1);
    const double eps = 0.02;
    const Schedule sched = trial % 2 ? build_acf(30, 10.0, 0.7) : build_geometric(30, 10.0, 0.9, 0.8, 200.0);
    const AcfResult r = acf_solve(make_problem(t.A, t.W, t.Y, 10.0, eps), sched, 30);
    const Eigen::VectorXd ref =
        oracle::unfolded_reference(oracle::to_eigen(t.W), oracle::to_eigen(t.A),
                                   oracle::to_eigen(t.Y).col(0), 10.0, eps, sched.t1, sched.t2,
                                   sched.theta, 30);
    CHECK(rel_dist(oracle::to_eigen(r.x_hat).col(0), ref) <= 1e-12);
  }
}

TEST_CASE("recursive theta stays in (0, 1] and decreases") {
  double th = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double nx = next_acf_theta(th);
    CHECK(nx > 0.0);
    CHECK(nx < th);
    th = nx;
  }
}

TEST_CASE("objective traces are finite and the solve rejects zero iterations") {
  gen::Source g(46);
  Tiny t = tiny(g, 8, 4, 12, 4);
  const AcfProblem prob = make_problem(t.A, t.W, t.Y, 10.0, 0.05);
  const AcfResult r = acf_solve(prob, build_acf(25, 10.0), 25);
  CHECK(r.objective.size() == 26);
  CHECK(r.residual.size() == 26);
  for (double v : r.objective) CHECK(std::isfinite(v));
  CHECK(r.objective.front() == doctest::Approx(smoothed_objective(prob, prob.X0)));
  CHECK_THROWS_AS(acf_solve(prob, build_acf(5, 10.0), 0), InvalidArgument);
  CHECK_THROWS_AS(acf_solve(prob, build_acf(5, 10.0), 6), InvalidArgument);
  CHECK_THROWS_AS(make_problem(t.A, Mat(12, 7), t.Y, 10.0, 0.05), DimensionError);
}

TEST_CASE("baseline MSE sanity runs") {
  const std::size_t n = 32;
  Mat X(n, 20);
  gen::Source g(47);
  for (std::size_t j = 0; j < 20; ++j) {
    const double a = g.normal(), b = g.normal();
    const std::size_t cut = g.index(4, n - 4);
    for (std::size_t i = 0; i < n; ++i) X(i, j) = i < cut ? a : b;
  }
  const Mat I = Mat::identity(n);
  const double mse = acf_baseline_mse(X, X, I, finite_difference(n).W, 1e4, 0.0, build_acf(10, 1e4), 10);
  CHECK(mse >= 0.0);
  CHECK(mse < 1e-3);

  const Mat A = gaussian_measurement(8, n, 3);
  Mat Y(8, 20);
  for (double& v : Y.data()) v = 1e-3 * g.normal();
  const double z = acf_baseline_mse(Mat(n, 20), Y, A, haar_redundant(n).W, 100.0, 1e-3, build_acf(10, 100.0), 10);
  CHECK(z >= 0.0);
  CHECK_THROWS_AS(acf_baseline_mse(Mat(n, 20), Mat(8, 19), A, haar_redundant(n).W, 100.0, 0.0,
                                   build_acf(10, 100.0), 10),
                  DimensionError);
}

TEST_CASE("primal-dual reference solves the constrained problem") {
  // Optimality of the reference: feasible, and no feasible move along ker(A) improves it.
  gen::Source g(48);
  for (int trial = 0; trial < 5; ++trial) {
    Tiny t = tiny(g, 8, 4, 12, 1);
    const Eigen::MatrixXd W = oracle::to_eigen(t.W), A = oracle::to_eigen(t.A);
    const Eigen::VectorXd y = oracle::to_eigen(t.Y).col(0);
    const Eigen::VectorXd x0 = A.transpose() * y;
    const double mu = 10.0, eps = 0.05;
    const auto r = oracle::primal_dual(W, A, y, x0, mu, eps, oracle::Constraint::l2);
    REQUIRE(r.converged);
    CHECK((y - A * r.x).norm() <= eps * (1 + 1e-6));
    auto f = [&](const Eigen::VectorXd& x) { return (W * x).lpNorm<1>() + mu / 2 * (x - x0).squaredNorm(); };
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    const Eigen::MatrixXd ker = svd.matrixV().rightCols(4);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd d = ker * Eigen::VectorXd::Random(4) * 1e-3;
      CHECK(f(r.x + d) >= f(r.x) - 1e-9);
    }
  }
}
