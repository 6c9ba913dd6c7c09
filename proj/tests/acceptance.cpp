// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
//   acceptance            run everything
//   acceptance --only 6   run one criterion (repeatable)

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "deconet/acf.hpp"
#include "deconet/bounds.hpp"
#include "deconet/commands.hpp"
#include "deconet/config.hpp"
#include "deconet/data.hpp"
#include "deconet/io.hpp"
#include "deconet/kernels.hpp"
#include "deconet/linalg.hpp"
#include "deconet/network.hpp"
#include "deconet/operators.hpp"
#include "deconet/train.hpp"
#include "fd_check.hpp"
#include "gen.hpp"
#include "oracles.hpp"

using namespace deconet;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double svd_norm(const Mat& m) { return oracle::svd_norm(oracle::to_eigen(m)); }

// Largest column norm excess over B seen by any decoder call in this process.
struct ClipTracker {
  std::size_t columns = 0;
  std::size_t violations = 0;
  double worst_excess = -INFINITY;
  void observe(const Mat& Xhat, double B) {
    for (double nrm : col_norms(Xhat)) {
      ++columns;
      worst_excess = std::max(worst_excess, nrm - B);
      if (nrm > B + 1e-12) ++violations;
    }
  }
};
ClipTracker g_clip;

Mat tracked_decode(const Mat& W, const Mat& Y, const DecoderConfig& cfg, const Mat& A) {
  Mat out = decode(W, Y, cfg, A);
  g_clip.observe(out, cfg.B_out);
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- 1 ---------------------------------------------------------------------

Verdict formulas() {
  const double tol = 1e-12;
  std::ostringstream d;
  bool ok = true;
  auto expect = [&](const char* name, double got, double want, double t) {
    const bool good = std::abs(got - want) <= t * std::max(1.0, std::abs(want));
    ok = ok && good;
    d << name << "=" << fmt(got) << (good ? "" : " (off)") << " ";
  };

  BoundInputs bi;
  bi.lambda = 1.0;
  bi.a_norm = 1.0;
  bi.L = 2;
  bi.sched = build_geometric(2, 100.0, 0.9, 0.9, 1000.0);
  const double gamma = gamma_seq(bi).gamma;
  expect("gamma", gamma, 13.0, tol);
  expect("zeta2", zeta(gamma, 2), 14.0, tol);
  expect("kappa2", kappa(gamma, 2), 156.0, tol);
  expect("kappa2_identity", kappa(gamma, 2), gamma * (gamma - 1.0), tol);

  BoundInputs one = bi;
  one.L = 1;
  one.a_norm = 1.3;
  one.Y_fro = 4.2;
  one.sched = build_geometric(1, 100.0, 0.9, 0.9, 1000.0);
  expect("K1", k_l_general(one).K_L, 2.0 * 1.3 * 4.2, tol);

  const double r = std::sqrt(100.0 / 1000.0);
  const double tp = geometric_theta_ratio(100.0, 1000.0);
  expect("theta_prime", tp, (1.0 - r) / (1.0 + r), tol);
  // The quoted six-digit value is a rounding of the closed form (0.5194938...).
  expect("theta_prime_quoted", tp, 0.519495, 2e-6);
  return {ok, d.str()};
}

// --- 2 ---------------------------------------------------------------------

Verdict gradient() {
  gen::Source g(2002);
  double worst = 0.0;
  for (int t = 0; t < 25; ++t) {
    const auto in = fdcheck::sample(g, 6, 3, 8, 4, 3);
    g_clip.observe(decode(in.W, in.Y, in.cfg, in.A), in.cfg.B_out);
    worst = std::max(worst, fdcheck::compare(in).max_rel_error);
  }
  return {worst <= 1e-5, "25 instances, max relative error " + fmt(worst) + " (limit 1e-5)"};
}

// --- 3, 4, 5 ---------------------------------------------------------------

struct Draw {
  Mat A, X, Y;
  double eps = 0, a_norm = 0, lambda = 0;
  Schedule sched;  // 5 layers
};

constexpr std::size_t kn = 10, km = 5, kN = 20, ks = 8, kL = 5;

Draw draw(gen::Source& g) {
  for (;;) {
    Draw d;
    d.A = gaussian_measurement(km, kn, g.engine()());
    d.a_norm = svd_norm(d.A);
    d.X = g.matrix(kn, ks);
    d.Y = kernels::matmul(d.A, d.X);
    Mat E = g.matrix(km, ks, 1e-4);
    d.Y += E;
    for (double v : col_norms(E)) d.eps += v / ks;
    d.sched = build_geometric(kL, 100.0, g.uniform(0.5, 0.95), g.uniform(0.5, 0.95), 1000.0);
    d.lambda = g.uniform(0.5, 3.0);
    if (check_assumptions(d.sched, d.lambda, d.a_norm).all_hold) return d;
  }
}

Mat in_ball(gen::Source& g, double radius) {
  Mat W = g.matrix(kN, kn);
  return (radius / svd_norm(W)) * W;
}

BoundInputs inputs(const Draw& d, std::size_t L) {
  BoundInputs bi;
  bi.lambda = d.lambda;
  bi.a_norm = d.a_norm;
  bi.sched = build_geometric(L, 100.0, d.sched.alpha, d.sched.beta, 1000.0);
  bi.L = L;
  bi.N = kN;
  bi.n = kn;
  bi.m = km;
  bi.s = ks;
  bi.Y_fro = frobenius_norm(d.Y);
  return bi;
}

DecoderConfig decoder(const Draw& d, std::size_t L) {
  DecoderConfig c;
  c.sched = build_geometric(L, 100.0, d.sched.alpha, d.sched.beta, 1000.0);
  c.eps = d.eps;
  c.B_out = 0.0;
  for (double v : col_norms(d.X)) c.B_out = std::max(c.B_out, v);
  return c;
}

Verdict lipschitz() {
  gen::Source g(3003);
  std::size_t checks = 0, viol_general = 0, viol_simple = 0;
  double worst_general = 0, worst_simple = 0;
  for (int t = 0; t < 200; ++t) {
    const Draw d = draw(g);
    const Mat W1 = in_ball(g, d.lambda * g.uniform(0.3, 1.0));
    Mat W2;
    if (t % 2 == 0) {
      W2 = in_ball(g, d.lambda * g.uniform(0.3, 1.0));
    } else {
      W2 = W1 + g.matrix(kN, kn, 1e-3);
      const double s = svd_norm(W2);
      if (s > d.lambda) W2 *= d.lambda / s;
    }
    const double dw = svd_norm(W1 - W2);
    const std::size_t L = std::array<std::size_t, 3>{1, 2, 5}[t % 3];
    const DecoderConfig cfg = decoder(d, L);
    const Mat f1 = stack_state(layer_states(W1, d.Y, cfg, d.A, L).back());
    const Mat f2 = stack_state(layer_states(W2, d.Y, cfg, d.A, L).back());
    g_clip.observe(decode(W1, d.Y, cfg, d.A), cfg.B_out);
    const double measured = frobenius_norm(f1 - f2);
    const BoundInputs bi = inputs(d, L);
    const double kg = k_l_general(bi).K_L * dw;
    const double kS = k_l_simplified(bi).K_L * dw;
    ++checks;
    worst_general = std::max(worst_general, measured / kg);
    worst_simple = std::max(worst_simple, measured / kS);
    if (measured > kg) ++viol_general;
    if (measured > kS) ++viol_simple;
  }
  return {viol_general == 0 && viol_simple == 0,
          std::to_string(checks) + " pairs, violations general/simplified " + std::to_string(viol_general) +
              "/" + std::to_string(viol_simple) + ", worst ratio " + fmt(worst_general) + "/" +
              fmt(worst_simple)};
}

Verdict norm_growth() {
  gen::Source g(4004);
  std::size_t checks = 0, viol = 0;
  double worst_exact = 0, worst_simple = 0;
  for (int t = 0; t < 200; ++t) {
    const Draw d = draw(g);
    const Mat W = in_ball(g, d.lambda * g.uniform(0.3, 1.0));
    const DecoderConfig cfg = decoder(d, kL);
    const auto states = layer_states(W, d.Y, cfg, d.A, kL);
    g_clip.observe(decode(W, d.Y, cfg, d.A), cfg.B_out);
    const BoundInputs bi = inputs(d, kL);
    for (std::size_t k = 1; k <= kL; ++k) {
      const double measured = frobenius_norm(stack_state(states[k - 1]));
      const NormBound nb = f_norm_bound(bi, k);
      ++checks;
      worst_exact = std::max(worst_exact, measured / nb.exact);
      worst_simple = std::max(worst_simple, measured / nb.simplified);
      if (measured > nb.exact || measured > nb.simplified) ++viol;
    }
  }
  return {viol == 0, std::to_string(checks) + " (draw, k) checks, violations " + std::to_string(viol) +
                         ", worst ratio exact/simplified " + fmt(worst_exact) + "/" + fmt(worst_simple)};
}

Verdict layer_blocks() {
  gen::Source g(5005);
  std::size_t checks = 0, first_viol = 0, second_viol = 0;
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const Draw d = draw(g);
    const Mat W = in_ball(g, d.lambda * g.uniform(0.3, 1.0));
    const Eigen::MatrixXd We = oracle::to_eigen(W), Ae = oracle::to_eigen(d.A);
    const BoundInputs bi = inputs(d, kL);
    const GammaSeq gs = gamma_seq(bi);
    for (std::size_t k = 0; k < kL; ++k) {
      const auto blocks = oracle::transcribe_layer(We, Ae, 100.0, d.sched.t1[k], d.sched.t2[k], d.sched.theta[k]);
      const double lhs = 2 * oracle::svd_norm(blocks.G1) + 2 * oracle::svd_norm(blocks.G2) + 1;
      ++checks;
      worst = std::max(worst, lhs / gs.gamma_k[k]);
      if (lhs > gs.gamma_k[k]) ++first_viol;
      if (gs.gamma_k[k] > gs.gamma) ++second_viol;
    }
  }
  return {first_viol == 0 && second_viol == 0,
          std::to_string(checks) + " layers; block-norm inequality violated " + std::to_string(first_viol) +
              " times (worst ratio " + fmt(worst) + "), Gamma_k <= gamma violated " +
              std::to_string(second_viol) + " times"};
}

// --- 6, 10 -----------------------------------------------------------------

RunConfig desk_config(std::uint64_t seed, const fs::path& root) {
  RunConfig c;
  c.seed = seed;
  c.n = 100;
  c.m = 25;
  c.N = 500;
  c.L = 10;
  c.s = 2500;
  c.train_frac = 0.8;
  c.noise_std = 1e-4;
  c.dataset = (root / ("data_" + std::to_string(seed))).string();
  c.out = c.dataset;
  return c;
}

struct DeskRun {
  double deconet_final = 0, deconet_best = 0, tv = 0, haar = 0;
  std::size_t epochs = 0;
};

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_text(p));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) cols.push_back(x);
    rows.push_back(cols);
  }
  return rows;
}

// Decoder outputs of a trained checkpoint on its test split, for the clipping tally.
void observe_checkpoint(const RunConfig& c, const fs::path& train_dir) {
  const Dataset ds = load_dataset(c.dataset);
  const Mat A = read_dmat(fs::path(c.dataset) / "A.dmat");
  auto [tr, te] = split_dataset(ds, c.train_frac);
  DecoderConfig dc;
  dc.sched = build_geometric(c.L, c.mu, c.alpha, c.beta, c.L_tilde);
  dc.B_out = tr.B_out;
  dc.eps = tr.eps;
  tracked_decode(read_dmat(train_dir / "W.dmat"), te.Y, dc, A);
}

DeskRun desk_run(std::uint64_t seed, const fs::path& root, bool with_acf) {
  std::ostringstream log;
  RunConfig c = desk_config(seed, root);
  if (cmd_datagen(c, {true}, log) != 0) throw Error("datagen failed");
  RunConfig t = c;
  t.out = (root / ("train_" + std::to_string(seed))).string();
  if (cmd_train(t, {true}, log) != 0) throw Error("train failed");
  DeskRun r;
  const auto rows = read_csv(fs::path(t.out) / "metrics.csv");
  r.epochs = rows.size();
  r.deconet_final = std::stod(rows.back().at(2));
  r.deconet_best = nlohmann::json::parse(read_text(fs::path(t.out) / "train.json"))["best"]["test_mse"];
  observe_checkpoint(c, t.out);
  if (!with_acf) return r;
  for (const char* op : {"tv", "haar"}) {
    RunConfig a = c;
    a.out = (root / ("acf_" + std::to_string(seed))).string();
    a.acf_operator = op;
    if (cmd_acf(a, {true}, log) != 0) throw Error("acf failed");
    const double mse = nlohmann::json::parse(read_text(fs::path(a.out) / ("acf_" + std::string(op) + ".json")))["test_mse"];
    (std::string(op) == "tv" ? r.tv : r.haar) = mse;
  }
  return r;
}

Verdict table_ordering() {
  const fs::path root = gen::scratch_dir("acceptance_desk");
  bool ok = true;
  std::ostringstream d;
  for (std::uint64_t seed : {1, 2, 3}) {
    const DeskRun r = desk_run(seed, root, true);
    const bool order = r.deconet_final < r.tv && r.tv < r.haar;
    const bool margin = 5.0 * r.deconet_final <= std::min(r.tv, r.haar);
    ok = ok && order && margin;
    d << "seed " << seed << ": deconet " << fmt(r.deconet_final) << " (best-EGE snapshot " << fmt(r.deconet_best)
      << ", " << r.epochs << " epochs), tv " << fmt(r.tv) << ", haar " << fmt(r.haar)
      << (order ? "" : " [order]") << (margin ? "" : " [margin]") << "; ";
  }
  return {ok, d.str()};
}

Verdict determinism() {
  const fs::path a = gen::scratch_dir("acceptance_det_a");
  const fs::path b = gen::scratch_dir("acceptance_det_b");
  desk_run(1, a, false);
  desk_run(1, b, false);
  const auto x = read_bytes(a / "train_1" / "metrics.csv");
  const auto y = read_bytes(b / "train_1" / "metrics.csv");
  return {!x.empty() && x == y, "metrics.csv " + std::to_string(x.size()) + " bytes, identical: " + (x == y ? "yes" : "no")};
}

// --- 7 ---------------------------------------------------------------------

Verdict oracle_equivalence() {
  gen::Source g(7007);
  const std::size_t n = 8, m = 4, N = 12;
  const double mu = 10.0;
  double worst = 0, worst_linf = 0;
  std::size_t within = 0, blown = 0;
  long max_iters = 0;
  for (int t = 0; t < 20; ++t) {
    const Mat A = gaussian_measurement(m, n, g.engine()());
    const Mat W = g.matrix(N, n, 1.0 / std::sqrt(double(n)));
    const Mat x = g.matrix(n, 1);
    const Mat e = g.matrix(m, 1, 1e-2);
    const Mat y = kernels::matmul(A, x) + e;
    const double eps = frobenius_norm(e);

    const AcfProblem prob = make_problem(A, W, y, mu, eps);
    const Eigen::VectorXd xs = oracle::to_eigen(acf_solve(prob, build_acf(5000, mu), 5000).x_hat).col(0);
    const Eigen::MatrixXd We = oracle::to_eigen(W), Ae = oracle::to_eigen(A);
    const Eigen::VectorXd ye = oracle::to_eigen(y).col(0);
    const Eigen::VectorXd x0 = Ae.transpose() * ye;
    const auto ref = oracle::primal_dual(We, Ae, ye, x0, mu, eps, oracle::Constraint::l2);
    max_iters = std::max(max_iters, ref.iterations);
    if (!ref.converged) return {false, "reference solver did not converge"};
    const double dist = (xs - ref.x).stableNorm() / ref.x.stableNorm();
    if (xs.lpNorm<Eigen::Infinity>() > 1e6 * (1 + ref.x.lpNorm<Eigen::Infinity>())) ++blown;
    worst = std::max(worst, dist);
    if (dist <= 1e-4) ++within;

    // Diagnostic: constant theta = 1 against the componentwise-constraint reference.
    const Eigen::VectorXd xc = oracle::to_eigen(acf_solve(prob, build_constant(5000, mu, 1.0, 1.0), 5000).x_hat).col(0);
    const auto linf = oracle::primal_dual(We, Ae, ye, x0, mu, eps, oracle::Constraint::linf);
    worst_linf = std::max(worst_linf, (xc - linf.x).norm() / linf.x.norm());
  }
  std::cout << "  diagnostic: theta=1 solver vs componentwise-constraint reference, worst relative distance "
            << fmt(worst_linf) << "\n";
  return {within == 20, std::to_string(within) + "/20 within 1e-4 of the reference minimizer, worst " +
                            fmt(worst) + ", " + std::to_string(blown) + " runaway (reference iterations <= " + std::to_string(max_iters) + ")"};
}

// --- 8 ---------------------------------------------------------------------

Verdict scaling_trend() {
  const std::size_t n = 20, m = 5, s_train = 2000, s_test = 2000, epochs = 20;
  const std::vector<std::size_t> ratios{2, 5, 10}, depths{5, 10, 15};
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<double> mean_ege, root_NL;
  std::ostringstream d;
  double a_norm_ref = 0, yfro = 0, b_in = 0, b_out = 0;
  for (std::size_t r : ratios) {
    for (std::size_t L : depths) {
      const std::size_t N = r * n;
      double acc = 0;
      for (std::uint64_t seed : seeds) {
        const Mat A = gaussian_measurement(m, n, sub_seed(seed, "measurement"));
        const Mat X = gen_synthetic(n, s_train + s_test, sub_seed(seed, "data"));
        const Measurement meas = measure(X, A, 1e-4, sub_seed(seed, "noise"));
        TrainData data{X.col_block(0, s_train), meas.Y.col_block(0, s_train), X.col_block(s_train, s_test),
                       meas.Y.col_block(s_train, s_test)};
        const auto [bi, bo] = estimate_bounds_constants(data.X_train, data.Y_train);
        double eps = 0;
        for (std::size_t j = 0; j < s_train; ++j) eps += meas.per_sample[j] / s_train;
        DecoderConfig cfg;
        cfg.sched = build_geometric(L, 100.0, 0.9, 0.9, 1000.0);
        cfg.B_out = bo;
        cfg.eps = eps;
        TrainOptions o;
        o.lr = 1e-3;
        o.batch = 128;
        o.max_epochs = epochs;
        o.patience = epochs;
        o.shuffle_seed = sub_seed(seed, "shuffle");
        const Mat W0 = init_learnable(n, N, InitScheme::normal, sub_seed(seed, "init")).W;
        const TrainResult res = train(W0, A, data, cfg, o);
        acc += res.history.at(res.best_epoch - 1).ege;
        tracked_decode(res.W, data.Y_test, cfg, A);
        if (seed == 1 && r == ratios.front() && L == depths.front()) {
          a_norm_ref = svd_norm(A);
          yfro = frobenius_norm(data.Y_train);
          b_in = bi;
          b_out = bo;
        }
      }
      mean_ege.push_back(acc / seeds.size());
      root_NL.push_back(std::sqrt(double(N * L)));
      d << "N=" << N << ",L=" << L << ":" << fmt(mean_ege.back()) << " ";
    }
  }
  const double rho = spearman(mean_ege, root_NL);

  BoundInputs base;
  base.lambda = 1.0;
  base.a_norm = a_norm_ref;
  base.n = n;
  base.m = m;
  base.s = s_train;
  base.Y_fro = yfro;
  base.B_in = b_in;
  base.B_out = b_out;
  base.L = depths.front();
  base.sched = build_geometric(base.L, 100.0, 0.9, 0.9, 1000.0);
  base.N = ratios.front() * n;
  std::vector<GridPoint> grid;
  for (std::size_t r : ratios)
    for (std::size_t L : depths) grid.push_back({r * n, L, s_train});
  const auto rows = scaling_curve(base, grid);
  bool monotone = true;
  for (std::size_t i = 0; i < ratios.size(); ++i)
    for (std::size_t j = 0; j < depths.size(); ++j) {
      const double b = rows[i * depths.size() + j].bound;
      if (j > 0 && !(b > rows[i * depths.size() + j - 1].bound)) monotone = false;
      if (i > 0 && !(b > rows[(i - 1) * depths.size() + j].bound)) monotone = false;
    }
  d << "| spearman " << fmt(rho) << " (need >= 0.7), bound monotone: " << (monotone ? "yes" : "no");
  return {rho >= 0.7 && monotone, d.str()};
}

// --- 9 ---------------------------------------------------------------------

Verdict clipping() {
  const fs::path root = gen::scratch_dir("acceptance_clip");
  RunConfig v;
  v.out = (root / "verify").string();
  v.verify_families = "clipping";
  std::ostringstream log;
  const int rc = cmd_verify(v, {true}, log);
  const auto j = nlohmann::json::parse(read_text(fs::path(v.out) / "verify.json"));
  const std::size_t verify_viol = j["families"][0]["violations"];

  // Decoder outputs at every size used above, with random and trained operators.
  gen::Source g(9009);
  for (auto [n, m, N, L] : {std::tuple{6, 3, 8, 3}, {10, 5, 20, 5}, {20, 5, 200, 15}, {100, 25, 500, 10}}) {
    for (int t = 0; t < 5; ++t) {
      const Mat A = gaussian_measurement(m, n, g.engine()());
      const Mat X = g.matrix(n, 64);
      const Mat Y = kernels::matmul(A, X);
      DecoderConfig cfg;
      cfg.sched = build_geometric(L, 100.0, 0.9, 0.9, 1000.0);
      cfg.B_out = g.uniform(0.1, 1.0) * frobenius_norm(X) / 8.0;
      cfg.eps = 1e-3;
      tracked_decode(g.matrix(N, n, g.uniform(0.1, 3.0)), Y, cfg, A);
    }
  }
  RunConfig c = desk_config(4, root);
  c.s = 500;
  c.max_epochs = 2;
  if (cmd_datagen(c, {true}, log) != 0) return {false, "datagen failed"};
  RunConfig t = c;
  t.out = (root / "train").string();
  if (cmd_train(t, {true}, log) != 0) return {false, "train failed"};
  observe_checkpoint(c, t.out);

  return {rc == 0 && verify_viol == 0 && g_clip.violations == 0,
          "verify clipping violations " + std::to_string(verify_viol) + "; " + std::to_string(g_clip.columns) +
              " decoder columns in this process, violations " + std::to_string(g_clip.violations) +
              ", max norm - B_out " + fmt(g_clip.worst_excess)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only.insert(std::stoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--only N]...\n";
      return 2;
    }
  }
  const std::vector<Criterion> all{
      {1, "formula values", 1, formulas},
      {2, "gradient vs finite differences", 30, gradient},
      {3, "Lipschitz-in-W bound", 120, lipschitz},
      {4, "layer norm growth bound", 60, norm_growth},
      {5, "layer block norms", 60, layer_blocks},
      {6, "desk ordering against ACF baselines", 900, table_ordering},
      {7, "ACF against a primal-dual reference", 120, oracle_equivalence},
      {8, "generalization gap scaling trend", 3600, scaling_trend},
      {9, "output clipping", 600, clipping},
      {10, "determinism of metrics.csv", 900, determinism},
  };
  int failures = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failures;
    std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.name << ": " << v.detail
              << " [" << fmt(secs) << " s of " << fmt(c.budget_s) << " s" << (in_time ? "" : ", over budget")
              << "]\n";
    std::cout.flush();
  }
  return failures == 0 ? 0 : 1;
}
