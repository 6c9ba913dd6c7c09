#include "deconet/commands.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "deconet/acf.hpp"
#include "deconet/bounds.hpp"
#include "deconet/checks.hpp"
#include "deconet/data.hpp"
#include "deconet/error.hpp"
#include "deconet/io.hpp"
#include "deconet/linalg.hpp"
#include "deconet/network.hpp"
#include "deconet/operators.hpp"
#include "deconet/rng.hpp"
#include "deconet/train.hpp"

namespace deconet {

namespace fs = std::filesystem;

namespace {

// Create the output directory and refuse to clobber existing artifacts without --force.
fs::path prepare_out(const RunConfig& cfg, const CommonFlags& flags,
                     std::initializer_list<const char*> outputs) {
  const fs::path dir = cfg.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
  if (!flags.force) {
    for (const char* name : outputs) {
      if (fs::exists(dir / name)) {
        throw IoError("refusing to overwrite " + (dir / name).string() + " (pass --force)");
      }
    }
  }
  return dir;
}

struct LoadedData {
  Dataset train;
  Dataset test;
  Mat A;
};

LoadedData load_split(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("data.dataset must name a dataset directory");
  const fs::path dir = cfg.dataset;
  const Dataset ds = load_dataset(dir);
  LoadedData out;
  out.A = read_dmat(dir / (ds.A_path.empty() ? std::string("A.dmat") : ds.A_path));
  if (out.A.cols() != ds.X.rows() || out.A.rows() != ds.Y.rows()) {
    throw FormatError("measurement matrix does not match the dataset");
  }
  std::tie(out.train, out.test) = split_dataset(ds, cfg.train_frac);
  return out;
}

Schedule decoder_schedule(const RunConfig& cfg) {
  return build_geometric(cfg.L, cfg.mu, cfg.alpha, cfg.beta, cfg.L_tilde);
}

void write_json(const fs::path& path, const nlohmann::json& j) { atomic_write(path, j.dump(2) + "\n"); }

}  // namespace

int cmd_datagen(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log) {
  cfg.validate();
  const fs::path dir = prepare_out(cfg, flags, {"A.dmat", "X.dmat", "Y.dmat", "meta.json"});
  Mat X;
  if (cfg.source == "synthetic") {
    X = gen_synthetic(cfg.n, cfg.s, sub_seed(cfg.seed, "data"));
  } else {
    if (cfg.mnist_images.empty()) throw ConfigError("data.mnist_images is required for source = mnist");
    const Mat all = load_idx_images(cfg.mnist_images, cfg.downsample);
    if (all.rows() != cfg.n) {
      throw ConfigError("data.n must equal the image size " + std::to_string(all.rows()));
    }
    if (all.cols() < cfg.s) throw ConfigError("the image file holds fewer than data.s images");
    X = all.col_block(0, cfg.s);
  }
  const Mat A = gaussian_measurement(cfg.m, cfg.n, sub_seed(cfg.seed, "measurement"));
  const Measurement meas = measure(X, A, cfg.noise_std, sub_seed(cfg.seed, "noise"));

  Dataset ds;
  ds.X = std::move(X);
  ds.Y = meas.Y;
  ds.A_path = "A.dmat";
  ds.eps = meas.eps;
  ds.noise_std = cfg.noise_std;
  ds.seed = cfg.seed;
  ds.config_hash = config_hash(cfg);
  if (cfg.per_sample_eps) ds.eps_per_sample = meas.per_sample;
  const auto split = split_dataset(ds, cfg.train_frac);
  std::tie(ds.B_in, ds.B_out) = estimate_bounds_constants(split.first.X, split.first.Y);

  write_dmat(dir / "A.dmat", A);
  save_dataset(dir, ds);
  log << "eps " << fmt_real(ds.eps) << "\nB_in " << fmt_real(ds.B_in) << "\nB_out "
      << fmt_real(ds.B_out) << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log) {
  cfg.validate();
  const fs::path dir = prepare_out(cfg, flags, {"metrics.csv", "W.dmat", "W.json", "train.json"});
  const LoadedData d = load_split(cfg);
  const std::size_t n = d.A.cols();
  if (cfg.N <= n) throw ConfigError("operator.N must exceed the signal length " + std::to_string(n));

  const std::uint64_t init_seed = sub_seed(cfg.seed, "init");
  const AnalysisOperator init = init_learnable(n, cfg.N, parse_init_scheme(cfg.init), init_seed,
                                               cfg.beta_a, cfg.beta_b);
  DecoderConfig dc;
  dc.sched = decoder_schedule(cfg);
  dc.B_out = d.train.B_out;
  dc.eps = d.train.eps;

  TrainOptions opts;
  opts.lr = cfg.lr;
  opts.beta1 = cfg.beta1;
  opts.beta2 = cfg.beta2;
  opts.eps_adam = cfg.eps_adam;
  opts.batch = cfg.batch;
  opts.patience = cfg.patience;
  opts.max_epochs = cfg.max_epochs;
  opts.shuffle_seed = sub_seed(cfg.seed, "shuffle");
  opts.lambda_cap = cfg.lambda_cap;

  const std::string hash = config_hash(cfg);
  std::string csv = metrics_csv_header();
  const TrainData td{d.train.X, d.train.Y, d.test.X, d.test.Y};
  TrainResult res;
  try {
    res = train(init.W, d.A, td, dc, opts, [&](const EpochMetrics& e) {
      csv += metrics_csv_row(e);
      atomic_write(dir / "metrics.csv", csv);
      log << "epoch " << e.epoch << " train " << fmt_real(e.train_mse) << " test "
          << fmt_real(e.test_mse) << " ege " << fmt_real(e.ege) << "\n";
    });
  } catch (const DivergenceError& e) {
    log << "training diverged: " << e.what() << "\n";
    return 3;
  }

  write_dmat(dir / "W.dmat", res.W);
  nlohmann::json side;
  side["kind"] = "learnable";
  side["n"] = n;
  side["N"] = cfg.N;
  side["seed"] = cfg.seed;
  side["init_seed"] = init_seed;
  side["scheme"] = {{"name", cfg.init}, {"a", cfg.beta_a}, {"b", cfg.beta_b}};
  side["epoch"] = res.best_epoch;
  side["config_hash"] = hash;
  write_json(dir / "W.json", side);

  nlohmann::json summary;
  summary["config_hash"] = hash;
  summary["best_epoch"] = res.best_epoch;
  summary["epochs_run"] = res.history.size();
  const auto best = std::find_if(res.history.begin(), res.history.end(),
                                 [&](const EpochMetrics& e) { return e.epoch == res.best_epoch; });
  if (best != res.history.end()) {
    summary["best"] = {{"train_mse", best->train_mse}, {"test_mse", best->test_mse}, {"ege", best->ege}};
  }
  summary["B_out"] = dc.B_out;
  summary["eps"] = dc.eps;
  write_json(dir / "train.json", summary);
  log << "best epoch " << res.best_epoch << "\n";
  return 0;
}

int cmd_acf(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log) {
  cfg.validate();
  if (cfg.acf_iters < 1) throw ConfigError("acf.iters must be at least 1");
  const std::string name = "acf_" + cfg.acf_operator + ".json";
  const fs::path dir = prepare_out(cfg, flags, {name.c_str()});
  const LoadedData d = load_split(cfg);
  const std::size_t n = d.A.cols();

  AnalysisOperator op;
  if (cfg.acf_operator == "haar") op = haar_redundant(n);
  else if (cfg.acf_operator == "tv") op = finite_difference(n);
  else {
    if (cfg.acf_operator_path.empty()) throw ConfigError("acf.operator_path is required for operator = file");
    op = load_operator(cfg.acf_operator_path);
  }
  if (op.W.cols() != n) throw ConfigError("operator width does not match the signal length");

  Schedule sched;
  if (cfg.acf_theta == "acf") sched = build_acf(cfg.acf_iters, cfg.mu, cfg.acf_t);
  else if (cfg.acf_theta == "geometric") {
    sched = build_geometric(cfg.acf_iters, cfg.mu, cfg.alpha, cfg.beta, cfg.L_tilde);
  } else {
    sched = build_constant(cfg.acf_iters, cfg.mu, cfg.acf_t, 1.0);
  }

  const AcfProblem prob = make_problem(d.A, op.W, d.test.Y, cfg.mu, d.train.eps);
  const AcfResult res = acf_solve(prob, sched, cfg.acf_iters);
  const Mat diff = res.x_hat - d.test.X;
  const double mse = frobenius_norm(diff) * frobenius_norm(diff) / static_cast<double>(d.test.count());

  const double per = 1.0 / static_cast<double>(d.test.count());
  auto scaled = [per](std::vector<double> v) {
    for (double& x : v) x *= per;
    return v;
  };
  nlohmann::json j;
  j["config_hash"] = config_hash(cfg);
  j["operator"] = cfg.acf_operator;
  j["iters"] = cfg.acf_iters;
  j["theta_rule"] = cfg.acf_theta;
  j["test_mse"] = mse;
  j["objective_mean"] = scaled(res.objective);
  j["l1_mean"] = scaled(res.l1);
  j["residual_fro"] = res.residual;
  write_json(dir / name, j);
  log << "acf " << cfg.acf_operator << " test_mse " << fmt_real(mse) << "\n";
  return 0;
}

int cmd_bounds(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log) {
  cfg.validate();
  const bool sweep = !cfg.sweep_N.empty() || !cfg.sweep_L.empty() || !cfg.sweep_s.empty();
  const fs::path dir = sweep ? prepare_out(cfg, flags, {"report.json", "sweep.csv"})
                             : prepare_out(cfg, flags, {"report.json"});
  const LoadedData d = load_split(cfg);

  BoundInputs bi;
  bi.N = cfg.N;
  if (!cfg.checkpoint.empty()) {
    const AnalysisOperator op = load_operator(cfg.checkpoint);
    bi.lambda = spectral_norm_best(op.W).value;
    bi.N = op.N;
  } else if (cfg.lambda) {
    bi.lambda = *cfg.lambda;
  } else {
    throw ConfigError("bounds need either bounds.checkpoint or bounds.lambda");
  }
  if (cfg.lambda_cap) bi.lambda = std::min(bi.lambda, *cfg.lambda_cap);
  bi.a_norm = cfg.a_norm ? *cfg.a_norm : spectral_norm_best(d.A).value;
  bi.sched = decoder_schedule(cfg);
  bi.L = cfg.L;
  bi.n = d.A.cols();
  bi.m = d.A.rows();
  bi.s = d.train.count();
  bi.Y_fro = frobenius_norm(d.train.Y);
  bi.B_in = d.train.B_in;
  bi.B_out = d.train.B_out;
  bi.delta = cfg.delta;
  bi.validate();

  const BoundReport rep = bound_report(bi);
  auto j = nlohmann::json::parse(report_json(rep, bi));
  j["config_hash"] = config_hash(cfg);
  write_json(dir / "report.json", j);
  log << "K_L general " << fmt_real(rep.K_L_general) << "\nK_L simplified "
      << fmt_real(rep.K_L_simplified) << "\ngen bound (thm5) " << fmt_real(rep.gen_bound_thm5) << "\n";

  if (sweep) {
    const auto Ns = cfg.sweep_N.empty() ? std::vector<std::size_t>{bi.N} : cfg.sweep_N;
    const auto Ls = cfg.sweep_L.empty() ? std::vector<std::size_t>{bi.L} : cfg.sweep_L;
    const auto ss = cfg.sweep_s.empty() ? std::vector<std::size_t>{bi.s} : cfg.sweep_s;
    std::vector<GridPoint> grid;
    for (std::size_t N : Ns)
      for (std::size_t L : Ls)
        for (std::size_t s : ss) grid.push_back({N, L, s});
    atomic_write(dir / "sweep.csv", curve_csv(scaling_curve(bi, grid)));
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, const CommonFlags& flags, std::ostream& log) {
  cfg.validate();
  const fs::path dir = prepare_out(cfg, flags, {"verify.json"});
  const LayerFault fault = cfg.verify_fault == "g1_sign" ? LayerFault::flip_g1_sign : LayerFault::none;
  std::vector<std::string> names;
  {
    std::stringstream ss(cfg.verify_families);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
      if (!item.empty()) names.push_back(item);
    }
  }
  if (names.empty()) throw ConfigError("verify.families is empty");

  bool all = true;
  nlohmann::json fams = nlohmann::json::array();
  for (const std::string& name : names) {
    const FamilyResult r = run_family(name, cfg.verify_trials, cfg.seed, fault);
    all = all && r.pass();
    fams.push_back({{"name", r.name},
                    {"checks", r.checks},
                    {"violations", r.violations},
                    {"worst_ratio", r.worst_ratio},
                    {"pass", r.pass()}});
    log << (r.pass() ? "PASS " : "FAIL ") << r.name << " checks=" << r.checks
        << " violations=" << r.violations << " worst_ratio=" << fmt_real(r.worst_ratio) << "\n";
  }
  nlohmann::json j;
  j["config_hash"] = config_hash(cfg);
  j["fault"] = cfg.verify_fault;
  j["families"] = fams;
  j["pass"] = all;
  write_json(dir / "verify.json", j);
  return all ? 0 : 1;
}

}  // namespace deconet
