#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deconet/linalg.hpp"
#include "deconet/matrix.hpp"

namespace deconet {

/// S(x, tau) = sign(x) max(0, |x| - tau)
inline double soft_scalar(double x, double tau) noexcept {
  const double a = std::abs(x) - tau;
  return a > 0.0 ? std::copysign(a, x) : 0.0;
}

/// T(x, tau) = sign(x) min(|x|, tau)
inline double trunc_scalar(double x, double tau) noexcept {
  return std::abs(x) < tau ? x : std::copysign(tau, x);
}

/// dS/dx, 0 at the kink.
inline double soft_mask(double x, double tau) noexcept { return std::abs(x) > tau ? 1.0 : 0.0; }
/// dT/dx, 0 at the kink.
inline double trunc_mask(double x, double tau) noexcept { return std::abs(x) < tau ? 1.0 : 0.0; }

std::vector<double> soft_threshold(std::span<const double> x, double tau);
std::vector<double> soft_threshold_grad(std::span<const double> x, double tau);
std::vector<double> truncate(std::span<const double> x, double tau);
std::vector<double> truncate_grad(std::span<const double> x, double tau);

enum class OperatorKind { learnable, haar_redundant, finite_difference };
enum class InitScheme { normal, beta };

std::string to_string(OperatorKind k);
std::string to_string(InitScheme s);
OperatorKind parse_operator_kind(const std::string& s);
InitScheme parse_init_scheme(const std::string& s);

/// An N x n analysis operator with the parameters that produced it.
struct AnalysisOperator {
  OperatorKind kind = OperatorKind::learnable;
  Mat W;
  std::size_t N = 0;
  std::size_t n = 0;
  std::optional<SpectralEstimate> spectral;
  // Provenance for learnable operators.
  InitScheme scheme = InitScheme::normal;
  std::uint64_t seed = 0;
  double beta_a = 0.0;
  double beta_b = 0.0;
};

/// One-level undecimated Haar frame with circular boundary, 2n x n.
AnalysisOperator haar_redundant(std::size_t n);
/// Circular first differences, n x n; row i is e_{i+1 mod n} - e_i.
AnalysisOperator finite_difference(std::size_t n);
/// Random N x n operator; normal entries N(0,1/n) or centred Beta(a,b)/sqrt(n).
AnalysisOperator init_learnable(std::size_t n, std::size_t N, InitScheme scheme,
                                std::uint64_t seed, double a = 2.0, double b = 2.0);
/// Wrap a trained matrix.
AnalysisOperator learnable_from(Mat W);

/// Writes `<stem>.dmat` and `<stem>.json`.
void save_operator(const std::filesystem::path& stem, const AnalysisOperator& op);
AnalysisOperator load_operator(const std::filesystem::path& stem);

}  // namespace deconet
