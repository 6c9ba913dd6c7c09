#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "deconet/commands.hpp"
#include "deconet/config.hpp"
#include "deconet/data.hpp"
#include "deconet/error.hpp"
#include "deconet/io.hpp"
#include "deconet/linalg.hpp"
#include "deconet/operators.hpp"
#include "gen.hpp"

using namespace deconet;
namespace fs = std::filesystem;

namespace {

RunConfig small(const fs::path& root) {
  RunConfig c;
  c.seed = 1;
  c.n = 20;
  c.m = 5;
  c.s = 100;
  c.N = 40;
  c.L = 3;
  c.batch = 16;
  c.max_epochs = 3;
  c.out = (root / "data").string();
  c.dataset = c.out;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DECONET_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.seed = 77;
  c.lr = 3.25e-5;
  c.lambda_cap = 1.5;
  c.sweep_L = {5, 10, 15};
  c.acf_operator = "haar";
  c.mnist_images = "some path/with spaces";
  c.per_sample_eps = true;
  c.noise_std = 0.1;
  const std::string text = serialize_config(c);
  const RunConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  CHECK(back.lr == c.lr);
  CHECK(back.sweep_L == c.sweep_L);
  CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
  CHECK(config_hash(back) == config_hash(c));
  c.seed = 78;
  CHECK(config_hash(back) != config_hash(c));
}

TEST_CASE("config parsing errors and overrides") {
  CHECK_THROWS_AS(parse_config("[data]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[data]\nn = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[data]\nn = ten\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("seed = 4\n"), ConfigError);
  const RunConfig p = parse_config("[run]\nseed = 9\n[schedule]\nL = 4\nmu = 50\n");
  CHECK(p.seed == 9);
  CHECK(p.L == 4);
  CHECK(p.mu == 50);
  CHECK(p.n == RunConfig{}.n);

  RunConfig c;
  apply_override(c, "train.lr=0");
  CHECK(c.lr == 0.0);
  apply_override(c, "bounds.sweep_N=10,20");
  CHECK(c.sweep_N == std::vector<std::size_t>{10, 20});
  CHECK_THROWS_AS(apply_override(c, "train.lr"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "train.nope=1"), ConfigError);

  c = RunConfig{};
  c.m = c.n;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.L = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = RunConfig{};
  c.delta = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("datagen") {
  const auto root = gen::scratch_dir("cli_datagen");
  std::ostringstream log;
  RunConfig c = small(root);
  c.n = 100;
  c.m = 25;
  c.N = 500;
  c.s = 200;
  REQUIRE(cmd_datagen(c, {}, log) == 0);
  for (const char* f : {"A.dmat", "X.dmat", "Y.dmat", "meta.json"}) CHECK(fs::exists(fs::path(c.out) / f));
  CHECK(std::distance(fs::directory_iterator(c.out), fs::directory_iterator{}) == 4);
  const auto first = fnv1a(std::span<const unsigned char>(read_bytes(fs::path(c.out) / "Y.dmat")));
  CHECK(log.str().find("eps") != std::string::npos);

  CHECK_THROWS_AS(cmd_datagen(c, {}, log), IoError);
  REQUIRE(cmd_datagen(c, {true}, log) == 0);
  CHECK(fnv1a(std::span<const unsigned char>(read_bytes(fs::path(c.out) / "Y.dmat"))) == first);
  const auto meta = nlohmann::json::parse(read_text(fs::path(c.out) / "meta.json"));
  CHECK(meta["config_hash"] == config_hash(c));

  RunConfig bad = c;
  bad.m = 100;
  CHECK_THROWS_AS(cmd_datagen(bad, {true}, log), ConfigError);
}

TEST_CASE("train, acf, bounds and verify commands") {
  const auto root = gen::scratch_dir("cli_pipeline");
  std::ostringstream log;
  RunConfig c = small(root);
  REQUIRE(cmd_datagen(c, {}, log) == 0);

  RunConfig t = c;
  t.out = (root / "flat").string();
  t.lr = 0.0;
  REQUIRE(cmd_train(t, {}, log) == 0);
  std::istringstream csv(read_text(fs::path(t.out) / "metrics.csv"));
  std::string header, line;
  std::getline(csv, header);
  CHECK(header == "epoch,train_mse,test_mse,ege,grad_norm,w_spectral");
  std::vector<std::vector<std::string>> rows_flat;
  while (std::getline(csv, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) cols.push_back(x);
    rows_flat.push_back(cols);
  }
  REQUIRE(rows_flat.size() == 3);
  // grad_norm averages over differently shuffled batches; every other column must stay put.
  for (const auto& r : rows_flat)
    for (std::size_t k : {1u, 2u, 3u, 5u}) CHECK(r.at(k) == rows_flat[0].at(k));
  const auto side = nlohmann::json::parse(read_text(fs::path(t.out) / "W.json"));
  CHECK(side["config_hash"] == config_hash(t));
  CHECK(read_dmat(fs::path(t.out) / "W.dmat").rows() == 40);

  RunConfig t2 = c;
  t2.out = (root / "train2").string();
  t2.lr = 1e-3;
  REQUIRE(cmd_train(t2, {}, log) == 0);
  RunConfig t3 = t2;
  t3.out = (root / "train3").string();
  REQUIRE(cmd_train(t3, {}, log) == 0);
  CHECK(read_bytes(fs::path(t2.out) / "metrics.csv") == read_bytes(fs::path(t3.out) / "metrics.csv"));

  RunConfig a = c;
  a.out = (root / "acf").string();
  a.acf_operator = "tv";
  REQUIRE(cmd_acf(a, {}, log) == 0);
  const auto aj = nlohmann::json::parse(read_text(fs::path(a.out) / "acf_tv.json"));
  CHECK(aj["test_mse"].get<double>() >= 0.0);
  CHECK(aj["objective_mean"].size() == 11);
  a.acf_operator = "file";
  a.acf_operator_path = (fs::path(t2.out) / "W").string();
  REQUIRE(cmd_acf(a, {}, log) == 0);
  a.acf_iters = 0;
  CHECK_THROWS_AS(cmd_acf(a, {true}, log), ConfigError);

  RunConfig b = c;
  b.out = (root / "bounds").string();
  b.checkpoint = (fs::path(t2.out) / "W").string();
  b.sweep_L = {5, 10, 15};
  REQUIRE(cmd_bounds(b, {}, log) == 0);
  const auto rj = nlohmann::json::parse(read_text(fs::path(b.out) / "report.json"));
  CHECK(rj["K_L_general"].get<double>() > 0.0);
  std::istringstream sw(read_text(fs::path(b.out) / "sweep.csv"));
  std::getline(sw, header);
  CHECK(header == "N,L,s,bound,sqrt_NL_over_s");
  double prev = -1;
  int rows = 0;
  while (std::getline(sw, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) cols.push_back(x);
    const double bound = std::stod(cols.at(3));
    CHECK(bound > prev);
    prev = bound;
    ++rows;
  }
  CHECK(rows == 3);
  b.delta = 1.0;
  CHECK_THROWS_AS(cmd_bounds(b, {true}, log), ConfigError);
  b.delta = 0.05;
  b.checkpoint.clear();
  CHECK_THROWS_AS(cmd_bounds(b, {true}, log), ConfigError);
  b.lambda = 1.0;
  b.a_norm = 1.0;
  CHECK(cmd_bounds(b, {true}, log) == 0);

  RunConfig v = c;
  v.out = (root / "verify").string();
  v.verify_trials = 4;
  CHECK(cmd_verify(v, {}, log) == 0);
  const auto vj = nlohmann::json::parse(read_text(fs::path(v.out) / "verify.json"));
  CHECK(vj["pass"] == true);
  CHECK(vj["families"].size() == 5);

  v.verify_fault = "g1_sign";
  CHECK(cmd_verify(v, {true}, log) == 1);
  const auto fj = nlohmann::json::parse(read_text(fs::path(v.out) / "verify.json"));
  CHECK(fj["pass"] == false);
  for (const auto& f : fj["families"]) {
    if (f["name"] == "gradient") CHECK(f["pass"] == false);
  }
  v.L = 0;
  CHECK_THROWS_AS(cmd_verify(v, {true}, log), ConfigError);
}

TEST_CASE("acf on an identity measurement recovers piecewise-constant signals") {
  const auto root = gen::scratch_dir("cli_identity");
  const std::size_t n = 16, s = 40;
  Dataset ds;
  ds.X = Mat(n, s);
  gen::Source g(81);
  for (std::size_t j = 0; j < s; ++j) {
    const double lo = g.normal(), hi = g.normal();
    const std::size_t cut = g.index(3, n - 3);
    for (std::size_t i = 0; i < n; ++i) ds.X(i, j) = i < cut ? lo : hi;
  }
  ds.Y = ds.X;
  ds.A_path = "A.dmat";
  std::tie(ds.B_in, ds.B_out) = estimate_bounds_constants(ds.X, ds.Y);
  save_dataset(root / "data", ds);
  write_dmat(root / "data" / "A.dmat", Mat::identity(n));

  RunConfig c;
  c.n = n;
  c.m = n - 1;  // passes the m < n check; the stored A is what the command uses
  c.N = 2 * n;
  c.mu = 1e4;
  c.L_tilde = 1e5;
  c.dataset = (root / "data").string();
  c.out = (root / "acf").string();
  std::ostringstream log;
  REQUIRE(cmd_acf(c, {}, log) == 0);
  const auto j = nlohmann::json::parse(read_text(root / "acf" / "acf_tv.json"));
  CHECK(j["test_mse"].get<double>() < 1e-3);
}

TEST_CASE("command-line exit codes") {
  const auto root = gen::scratch_dir("cli_exit");
  const std::string out = (root / "d").string();
  const std::string base = "datagen --out " + out + " --set data.n=12 --set data.m=4 --set data.s=30 --set operator.N=24";
  CHECK(run_cli(base) == 0);
  CHECK(run_cli(base) == 3);
  CHECK(run_cli(base + " --force") == 0);
  CHECK(run_cli("datagen --out " + out + " --force --set data.m=12 --set data.n=12") == 2);
  CHECK(run_cli("verify --out " + out + " --set schedule.L=0") == 2);
  CHECK(run_cli("acf --out " + out + " --iters 0 --set data.dataset=" + out +
                " --set data.n=12 --set data.m=4 --set operator.N=24") == 2);
  CHECK(run_cli("bounds --out " + out + " --set bounds.delta=1 --set data.dataset=" + out) == 2);
  CHECK(run_cli("frobnicate") != 0);
}
