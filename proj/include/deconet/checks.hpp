#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deconet/acf.hpp"
#include "deconet/matrix.hpp"
#include "deconet/rng.hpp"
#include "deconet/schedule.hpp"

namespace deconet {

/// Outcome of one family of randomized checks.
struct FamilyResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // largest measured / allowed
  bool pass() const noexcept { return violations == 0 && checks > 0; }
};

struct CheckSizes {
  std::size_t n = 10, m = 5, N = 20, s = 8, L = 5;
  double mu = 100.0;
  double L_tilde = 1000.0;
  double noise_std = 1e-4;
};

/// A random measurement problem with a schedule and radius that satisfy the layer assumptions.
struct BoundInstance {
  Mat A, X, Y;
  double eps = 0.0;
  double a_norm = 0.0;
  double lambda = 0.0;
  Schedule sched;
};

BoundInstance sample_instance(Rng& rng, const CheckSizes& sz);

/// Random N x n matrix with spectral norm exactly `radius` (up to power-iteration tolerance).
Mat random_with_norm(Rng& rng, std::size_t N, std::size_t n, double radius);

FamilyResult check_state_norm(std::size_t trials, std::uint64_t seed, LayerFault fault = LayerFault::none);
FamilyResult check_state_lipschitz(std::size_t trials, std::uint64_t seed, LayerFault fault = LayerFault::none);
FamilyResult check_decoder_lipschitz(std::size_t trials, std::uint64_t seed, LayerFault fault = LayerFault::none);
FamilyResult check_gradient(std::size_t trials, std::uint64_t seed, LayerFault fault = LayerFault::none);
FamilyResult check_clipping(std::size_t trials, std::uint64_t seed, LayerFault fault = LayerFault::none);
FamilyResult check_block_norm(std::size_t trials, std::uint64_t seed);

/// Runs the named family; throws InvalidArgument for unknown names.
FamilyResult run_family(const std::string& name, std::size_t trials, std::uint64_t seed,
                        LayerFault fault);

}  // namespace deconet
