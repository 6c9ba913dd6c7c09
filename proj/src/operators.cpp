#include "deconet/operators.hpp"

#include <json.hpp>

#include "deconet/error.hpp"
#include "deconet/io.hpp"
#include "deconet/rng.hpp"

namespace deconet {

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("threshold must be positive");
}

template <class F>
std::vector<double> map(std::span<const double> x, double tau, F f) {
  check_tau(tau);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], tau);
  return out;
}

void with_spectral(AnalysisOperator& op) { op.spectral = spectral_norm_best(op.W); }

}  // namespace

std::vector<double> soft_threshold(std::span<const double> x, double tau) { return map(x, tau, soft_scalar); }
std::vector<double> soft_threshold_grad(std::span<const double> x, double tau) {
  return map(x, tau, soft_mask);
}
std::vector<double> truncate(std::span<const double> x, double tau) { return map(x, tau, trunc_scalar); }
std::vector<double> truncate_grad(std::span<const double> x, double tau) {
  return map(x, tau, trunc_mask);
}

std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::learnable: return "learnable";
    case OperatorKind::haar_redundant: return "haar";
    case OperatorKind::finite_difference: return "tv";
  }
  return "?";
}

std::string to_string(InitScheme s) { return s == InitScheme::normal ? "normal" : "beta"; }

OperatorKind parse_operator_kind(const std::string& s) {
  if (s == "learnable") return OperatorKind::learnable;
  if (s == "haar") return OperatorKind::haar_redundant;
  if (s == "tv") return OperatorKind::finite_difference;
  throw InvalidArgument("unknown operator kind '" + s + "' (expected learnable, haar or tv)");
}

InitScheme parse_init_scheme(const std::string& s) {
  if (s == "normal") return InitScheme::normal;
  if (s == "beta") return InitScheme::beta;
  throw InvalidArgument("unknown init scheme '" + s + "' (expected normal or beta)");
}

AnalysisOperator haar_redundant(std::size_t n) {
  if (n < 2) throw DimensionError("haar_redundant needs n >= 2");
  const double h = 1.0 / std::sqrt(2.0);
  AnalysisOperator op;
  op.kind = OperatorKind::haar_redundant;
  op.n = n;
  op.N = 2 * n;
  op.W = Mat(2 * n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    op.W(i, i) += h;
    op.W(i, j) += h;
    op.W(n + i, i) += h;
    op.W(n + i, j) -= h;
  }
  with_spectral(op);
  return op;
}

AnalysisOperator finite_difference(std::size_t n) {
  if (n < 2) throw DimensionError("finite_difference needs n >= 2");
  AnalysisOperator op;
  op.kind = OperatorKind::finite_difference;
  op.n = n;
  op.N = n;
  op.W = Mat(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    op.W(i, (i + 1) % n) += 1.0;
    op.W(i, i) -= 1.0;
  }
  with_spectral(op);
  return op;
}

AnalysisOperator init_learnable(std::size_t n, std::size_t N, InitScheme scheme,
                                std::uint64_t seed, double a, double b) {
  if (n < 1 || N <= n) {
    throw DimensionError("learnable operator needs N > n, got N=" + std::to_string(N) +
                         " n=" + std::to_string(n));
  }
  if (scheme == InitScheme::beta && !(a > 0.0 && b > 0.0)) {
    throw InvalidArgument("beta init needs a > 0 and b > 0");
  }
  AnalysisOperator op;
  op.kind = OperatorKind::learnable;
  op.n = n;
  op.N = N;
  op.scheme = scheme;
  op.seed = seed;
  op.W = Mat(N, n);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  if (scheme == InitScheme::normal) {
    for (double& x : op.W.data()) x = rng.normal() * scale;
  } else {
    op.beta_a = a;
    op.beta_b = b;
    const double mean = a / (a + b);
    for (double& x : op.W.data()) x = (rng.beta(a, b) - mean) * scale;
  }
  return op;
}

AnalysisOperator learnable_from(Mat W) {
  AnalysisOperator op;
  op.kind = OperatorKind::learnable;
  op.N = W.rows();
  op.n = W.cols();
  op.W = std::move(W);
  return op;
}

void save_operator(const std::filesystem::path& stem, const AnalysisOperator& op) {
  auto mat = stem;
  mat += ".dmat";
  auto side = stem;
  side += ".json";
  write_dmat(mat, op.W);
  nlohmann::json j;
  j["kind"] = to_string(op.kind);
  j["n"] = op.n;
  j["N"] = op.N;
  j["seed"] = op.seed;
  j["scheme"] = {{"name", to_string(op.scheme)}, {"a", op.beta_a}, {"b", op.beta_b}};
  if (op.spectral) j["spectral_norm"] = op.spectral->value;
  atomic_write(side, j.dump(2) + "\n");
}

AnalysisOperator load_operator(const std::filesystem::path& stem) {
  auto mat = stem;
  mat += ".dmat";
  auto side = stem;
  side += ".json";
  AnalysisOperator op;
  op.W = read_dmat(mat);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(side));
    op.kind = parse_operator_kind(j.at("kind").get<std::string>());
    op.n = j.at("n").get<std::size_t>();
    op.N = j.at("N").get<std::size_t>();
    op.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("scheme")) {
      op.scheme = parse_init_scheme(j["scheme"].value("name", std::string("normal")));
      op.beta_a = j["scheme"].value("a", 0.0);
      op.beta_b = j["scheme"].value("b", 0.0);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(side.string() + ": " + e.what());
  }
  if (op.W.rows() != op.N || op.W.cols() != op.n) {
    throw FormatError(stem.string() + ": sidecar dimensions disagree with the matrix");
  }
  return op;
}

}  // namespace deconet
