// Command-line front end: datagen, train, acf, bounds, verify.
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deconet/commands.hpp"
#include "deconet/config.hpp"
#include "deconet/error.hpp"

namespace {

struct Options {
  std::string config;
  std::int64_t seed = -1;
  std::string out;
  bool force = false;
  std::vector<std::string> sets;
  // acf
  std::string op;
  std::size_t iters = 0;
  bool iters_given = false;
  // bounds
  std::string checkpoint;
  // verify
  std::string fault;
  std::string families;
};

deconet::RunConfig resolve(const Options& o) {
  deconet::RunConfig c = o.config.empty() ? deconet::RunConfig{} : deconet::load_config(o.config);
  for (const auto& s : o.sets) deconet::apply_override(c, s);
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (!o.out.empty()) c.out = o.out;
  if (!o.op.empty()) c.acf_operator = o.op;
  if (o.iters_given) c.acf_iters = o.iters;
  if (!o.checkpoint.empty()) c.checkpoint = o.checkpoint;
  if (!o.fault.empty()) c.verify_fault = o.fault;
  if (!o.families.empty()) c.verify_families = o.families;
  return c;
}

void common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "root seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", o.out, "output directory (overrides run.out)");
  sub->add_flag("--force", o.force, "overwrite existing outputs");
  sub->add_option("--set", o.sets, "override a config key, e.g. --set train.lr=0");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis-sparsity compressed sensing: ACF solver, unfolded decoder, bounds"};
  app.require_subcommand(1);
  Options o;

  auto* datagen = app.add_subcommand("datagen", "generate a dataset (X, Y, A, meta.json)");
  common(datagen, o);
  auto* train = app.add_subcommand("train", "train the unfolded decoder");
  common(train, o);
  auto* acf = app.add_subcommand("acf", "run the ACF baseline on the test split");
  common(acf, o);
  acf->add_option("--operator", o.op, "haar, tv or file")->check(CLI::IsMember({"haar", "tv", "file"}));
  acf->add_option("--iters", o.iters, "iteration count")->each([&](const std::string&) { o.iters_given = true; });
  auto* bounds = app.add_subcommand("bounds", "evaluate the generalization bound chain");
  common(bounds, o);
  bounds->add_option("--checkpoint", o.checkpoint, "operator stem (W for W.dmat + W.json)");
  auto* verify = app.add_subcommand("verify", "run the randomized invariant checks");
  common(verify, o);
  verify->add_option("--fault", o.fault, "inject a deliberate error")->check(CLI::IsMember({"none", "g1_sign"}));
  verify->add_option("--families", o.families, "comma-separated family names");

  CLI11_PARSE(app, argc, argv);

  try {
    const deconet::RunConfig cfg = resolve(o);
    const deconet::CommonFlags flags{o.force};
    if (*datagen) return deconet::cmd_datagen(cfg, flags, std::cout);
    if (*train) return deconet::cmd_train(cfg, flags, std::cout);
    if (*acf) return deconet::cmd_acf(cfg, flags, std::cout);
    if (*bounds) return deconet::cmd_bounds(cfg, flags, std::cout);
    if (*verify) return deconet::cmd_verify(cfg, flags, std::cout);
  } catch (const deconet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const deconet::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const deconet::DimensionError& e) {
    std::cerr << "invalid dimensions: " << e.what() << "\n";
    return 2;
  } catch (const deconet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
