#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace deconet {

enum class ThetaRule { geometric, acf, constant };

/// Per-layer step sizes t1, t2, theta and the smoothing weight mu.
///
/// The arrays hold L+1 entries, k = 0..L: layers use k < L and the output
/// map needs theta[L].
struct Schedule {
  double mu = 100.0;
  std::size_t L = 0;
  std::vector<double> t1;
  std::vector<double> t2;
  std::vector<double> theta;
  double alpha = 0.9;
  double beta = 0.9;
  double theta_prime = 0.0;
  double L_tilde = 0.0;
  ThetaRule rule = ThetaRule::geometric;

  /// Throws InvalidArgument if an invariant is broken.
  void validate() const;
};

/// theta' = (1 - sqrt(mu/L_tilde)) / (1 + sqrt(mu/L_tilde))
double geometric_theta_ratio(double mu, double L_tilde);

/// t1[k] = alpha^k, t2[k] = beta^k, theta[k] = theta'^k.
Schedule build_geometric(std::size_t L, double mu, double alpha, double beta, double L_tilde);

/// theta[0] = 1, theta[k+1] = 2 / (1 + sqrt(1 + 4/theta[k]^2)); L+1 entries.
std::vector<double> build_acf_theta(std::size_t L);

/// Recursive theta with constant step sizes t1 = t2 = t.
Schedule build_acf(std::size_t L, double mu, double t = 1.0);

/// Constant theta and step sizes.
Schedule build_constant(std::size_t L, double mu, double t, double theta);

/// (c1, c2) = (t1[k], t2[k]) / (theta[k] mu) for 0 <= k < L, and (0, 0) at k = -1.
std::pair<double, double> c_coeffs(const Schedule& s, long k);

struct AssumptionRow {
  std::size_t k = 0;
  double c1_lambda = 0.0;
  double c1_lambda_sq = 0.0;
  double c2_a_sq = 0.0;
  bool holds = true;
};

struct AssumptionReport {
  std::vector<AssumptionRow> rows;
  bool all_hold = true;
};

/// Checks c1 Lambda <= 1, c1 Lambda^2 <= 1 and c2 ||A||^2 <= 1 for every layer.
AssumptionReport check_assumptions(const Schedule& s, double lambda, double a_norm);

}  // namespace deconet
