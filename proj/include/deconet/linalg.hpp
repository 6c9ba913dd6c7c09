#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "deconet/error.hpp"
#include "deconet/matrix.hpp"

namespace deconet {

struct SpectralEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;
};

struct SpectralOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  std::uint64_t seed = 0x5bd1e995ULL;
};

/// Power iteration did not reach the tolerance; `best` holds the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, SpectralEstimate best)
      : Error(msg), best(best) {}
  SpectralEstimate best;
};

/// Largest singular value by power iteration on the smaller Gram matrix.
///
/// The residual is ||G v - lambda v|| / lambda for the unit iterate v.
/// A zero matrix returns value 0 without iterating.
SpectralEstimate spectral_norm(const Mat& m, const SpectralOptions& opts = {});
/// Like spectral_norm, but returns the last iterate instead of throwing on non-convergence.
SpectralEstimate spectral_norm_best(const Mat& m, const SpectralOptions& opts = {});

double frobenius_norm(const Mat& m) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> v) noexcept;

/// Column norms of m.
std::vector<double> col_norms(const Mat& m);

/// Entries i.i.d. N(0,1) divided by sqrt(m).
Mat gaussian_measurement(std::size_t m, std::size_t n, std::uint64_t seed);

/// Scale W back onto the ball of spectral radius `cap`.
///
/// Matrices whose measured norm is within the power-iteration tolerance of
/// the cap are returned unchanged, which makes the projection idempotent.
Mat project_spectral_ball(const Mat& w, double cap, const SpectralOptions& opts = {});

void write_dmat(const std::filesystem::path& path, const Mat& m);
Mat read_dmat(const std::filesystem::path& path);
/// Encode/decode the DMAT byte layout in memory.
std::vector<unsigned char> encode_dmat(const Mat& m);
Mat decode_dmat(std::span<const unsigned char> bytes);

}  // namespace deconet
