#include "deconet/config.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "deconet/error.hpp"
#include "deconet/io.hpp"

namespace deconet {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string to_text(const std::string& v) { return v; }
std::string to_text(double v) { return fmt_real(v); }
std::string to_text(bool v) { return v ? "true" : "false"; }
std::string to_text(std::uint64_t v) { return std::to_string(v); }
std::string to_text(const std::optional<double>& v) { return v ? fmt_real(*v) : std::string(); }
std::string to_text(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

void from_text(const std::string& key, const std::string& t, std::string& v) { (void)key; v = t; }

void from_text(const std::string& key, const std::string& t, double& v) {
  try {
    std::size_t pos = 0;
    v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": expected a number, got '" + t + "'");
  }
}

void from_text(const std::string& key, const std::string& t, std::uint64_t& v) {
  auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
    throw ConfigError("config key " + key + ": expected a nonnegative integer, got '" + t + "'");
  }
}

void from_text(const std::string& key, const std::string& t, bool& v) {
  if (t == "true" || t == "1" || t == "yes") v = true;
  else if (t == "false" || t == "0" || t == "no") v = false;
  else throw ConfigError("config key " + key + ": expected true/false, got '" + t + "'");
}

void from_text(const std::string& key, const std::string& t, std::optional<double>& v) {
  if (t.empty() || t == "none") {
    v.reset();
    return;
  }
  double d = 0.0;
  from_text(key, t, d);
  v = d;
}

void from_text(const std::string& key, const std::string& t, std::vector<std::size_t>& v) {
  v.clear();
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::uint64_t x = 0;
    from_text(key, item, x);
    v.push_back(x);
  }
}

// Calls f(key, field) for every field in file order.
template <class C, class F>
void visit(C& c, F&& f) {
  f("run.seed", c.seed);
  f("run.out", c.out);
  f("data.source", c.source);
  f("data.n", c.n);
  f("data.m", c.m);
  f("data.s", c.s);
  f("data.noise_std", c.noise_std);
  f("data.train_frac", c.train_frac);
  f("data.dataset", c.dataset);
  f("data.mnist_images", c.mnist_images);
  f("data.downsample", c.downsample);
  f("data.per_sample_eps", c.per_sample_eps);
  f("operator.N", c.N);
  f("operator.init", c.init);
  f("operator.beta_a", c.beta_a);
  f("operator.beta_b", c.beta_b);
  f("schedule.L", c.L);
  f("schedule.mu", c.mu);
  f("schedule.alpha", c.alpha);
  f("schedule.beta", c.beta);
  f("schedule.L_tilde", c.L_tilde);
  f("train.lr", c.lr);
  f("train.beta1", c.beta1);
  f("train.beta2", c.beta2);
  f("train.eps_adam", c.eps_adam);
  f("train.batch", c.batch);
  f("train.patience", c.patience);
  f("train.max_epochs", c.max_epochs);
  f("train.lambda_cap", c.lambda_cap);
  f("acf.operator", c.acf_operator);
  f("acf.operator_path", c.acf_operator_path);
  f("acf.iters", c.acf_iters);
  f("acf.theta", c.acf_theta);
  f("acf.t", c.acf_t);
  f("bounds.delta", c.delta);
  f("bounds.lambda", c.lambda);
  f("bounds.a_norm", c.a_norm);
  f("bounds.checkpoint", c.checkpoint);
  f("bounds.sweep_N", c.sweep_N);
  f("bounds.sweep_L", c.sweep_L);
  f("bounds.sweep_s", c.sweep_s);
  f("verify.trials", c.verify_trials);
  f("verify.families", c.verify_families);
  f("verify.fault", c.verify_fault);
}

void set_field(RunConfig& c, const std::string& key, const std::string& value) {
  bool found = false;
  visit(c, [&](const char* k, auto& field) {
    if (key == k) {
      from_text(key, trim(value), field);
      found = true;
    }
  });
  if (!found) throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n < 2 || m < 1 || s < 1 || N < 1 || L < 1) fail("counts n, m, s, N, L must be positive (n >= 2)");
  if (m >= n) fail("need m < n, got m=" + std::to_string(m) + " n=" + std::to_string(n));
  if (N <= n) fail("need N > n for a learnable operator, got N=" + std::to_string(N));
  if (!(mu > 1.0)) fail("schedule.mu must exceed 1");
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) fail("alpha, beta must lie in (0, 1)");
  if (!(L_tilde > mu)) fail("schedule.L_tilde must exceed mu");
  if (!(train_frac > 0.0 && train_frac < 1.0)) fail("data.train_frac must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) fail("bounds.delta must lie in (0, 1)");
  if (noise_std < 0.0) fail("data.noise_std must be nonnegative");
  if (lr < 0.0) fail("train.lr must be nonnegative");
  if (batch < 1 || max_epochs < 1) fail("train.batch and train.max_epochs must be positive");
  if (lambda_cap && !(*lambda_cap > 0.0)) fail("train.lambda_cap must be positive");
  if (source != "synthetic" && source != "mnist") fail("data.source must be synthetic or mnist");
  if (init != "normal" && init != "beta") fail("operator.init must be normal or beta");
  if (acf_operator != "haar" && acf_operator != "tv" && acf_operator != "file") {
    fail("acf.operator must be haar, tv or file");
  }
  if (acf_theta != "acf" && acf_theta != "geometric" && acf_theta != "constant") {
    fail("acf.theta must be acf, geometric or constant");
  }
  if (!(acf_t > 0.0 && acf_t <= 1.0)) fail("acf.t must lie in (0, 1]");
  if (verify_fault != "none" && verify_fault != "g1_sign") fail("verify.fault must be none or g1_sign");
}

RunConfig parse_config(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream in(ini_text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) throw ConfigError("config key '" + section + "' must be inside a section");
    for (const auto& [key, value] : body) set_field(c, section + "." + key, value.data());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_text(path));
  } catch (const IoError&) {
    throw ConfigError("cannot read config file " + path.string());
  }
}

std::string serialize_config(const RunConfig& c) {
  std::string out;
  std::string current;
  visit(c, [&](const char* k, const auto& field) {
    const std::string key = k;
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != current) {
      out += (out.empty() ? "" : "\n") + ("[" + section + "]\n");
      current = section;
    }
    out += key.substr(dot + 1) + " = " + to_text(field) + "\n";
  });
  return out;
}

void apply_override(RunConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value");
  set_field(c, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string config_hash(const RunConfig& c) { return hex64(fnv1a(serialize_config(c))); }

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace deconet
