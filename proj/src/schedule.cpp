#include "deconet/schedule.hpp"

#include <cmath>
#include <string>

#include "deconet/error.hpp"

namespace deconet {

namespace {

void check_common(std::size_t L, double mu) {
  if (L < 1) throw InvalidArgument("schedule needs L >= 1");
  if (!(mu > 1.0)) throw InvalidArgument("schedule needs mu > 1");
}

bool in_unit(double v) { return v > 0.0 && v <= 1.0; }

}  // namespace

void Schedule::validate() const {
  if (!(mu > 1.0)) throw InvalidArgument("schedule: mu must exceed 1");
  if (L < 1) throw InvalidArgument("schedule: L must be at least 1");
  if (t1.size() != L + 1 || t2.size() != L + 1 || theta.size() != L + 1) {
    throw InvalidArgument("schedule: arrays must hold L+1 entries");
  }
  if (theta[0] != 1.0 || t1[0] != 1.0 || t2[0] != 1.0) {
    throw InvalidArgument("schedule: t1[0], t2[0] and theta[0] must be 1");
  }
  for (std::size_t k = 0; k <= L; ++k) {
    if (!in_unit(t1[k]) || !in_unit(t2[k]) || !in_unit(theta[k])) {
      throw InvalidArgument("schedule: entry " + std::to_string(k) + " outside (0, 1]");
    }
  }
}

double geometric_theta_ratio(double mu, double L_tilde) {
  if (!(L_tilde > mu)) throw InvalidArgument("geometric schedule needs L_tilde > mu");
  const double r = std::sqrt(mu / L_tilde);
  return (1.0 - r) / (1.0 + r);
}

Schedule build_geometric(std::size_t L, double mu, double alpha, double beta, double L_tilde) {
  check_common(L, mu);
  if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    throw InvalidArgument("geometric schedule needs alpha, beta in (0, 1)");
  }
  Schedule s;
  s.mu = mu;
  s.L = L;
  s.alpha = alpha;
  s.beta = beta;
  s.L_tilde = L_tilde;
  s.theta_prime = geometric_theta_ratio(mu, L_tilde);
  s.rule = ThetaRule::geometric;
  s.t1.resize(L + 1);
  s.t2.resize(L + 1);
  s.theta.resize(L + 1);
  for (std::size_t k = 0; k <= L; ++k) {
    const double e = static_cast<double>(k);
    s.t1[k] = std::pow(alpha, e);
    s.t2[k] = std::pow(beta, e);
    s.theta[k] = std::pow(s.theta_prime, e);
  }
  s.validate();
  return s;
}

std::vector<double> build_acf_theta(std::size_t L) {
  if (L < 1) throw InvalidArgument("build_acf_theta needs L >= 1");
  std::vector<double> th(L + 1);
  th[0] = 1.0;
  for (std::size_t k = 0; k < L; ++k) {
    th[k + 1] = 2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (th[k] * th[k])));
  }
  return th;
}

Schedule build_acf(std::size_t L, double mu, double t) {
  check_common(L, mu);
  if (!in_unit(t)) throw InvalidArgument("ACF step size must lie in (0, 1]");
  Schedule s;
  s.mu = mu;
  s.L = L;
  s.rule = ThetaRule::acf;
  s.t1.assign(L + 1, t);
  s.t2.assign(L + 1, t);
  s.t1[0] = s.t2[0] = 1.0;
  s.theta = build_acf_theta(L);
  s.validate();
  return s;
}

Schedule build_constant(std::size_t L, double mu, double t, double theta) {
  check_common(L, mu);
  if (!in_unit(t)) throw InvalidArgument("step size must lie in (0, 1]");
  Schedule s;
  s.mu = mu;
  s.L = L;
  s.rule = ThetaRule::constant;
  s.t1.assign(L + 1, t);
  s.t2.assign(L + 1, t);
  s.t1[0] = s.t2[0] = 1.0;
  s.theta.assign(L + 1, theta);
  s.theta[0] = 1.0;
  s.validate();
  return s;
}

std::pair<double, double> c_coeffs(const Schedule& s, long k) {
  if (k == -1) return {0.0, 0.0};
  if (k < 0 || static_cast<std::size_t>(k) >= s.L) {
    throw InvalidArgument("c_coeffs: layer index " + std::to_string(k) + " outside [-1, " +
                          std::to_string(s.L) + ")");
  }
  const double d = s.theta[k] * s.mu;
  return {s.t1[k] / d, s.t2[k] / d};
}

AssumptionReport check_assumptions(const Schedule& s, double lambda, double a_norm) {
  if (lambda < 0.0 || a_norm < 0.0) throw InvalidArgument("norms must be nonnegative");
  AssumptionReport rep;
  for (std::size_t k = 0; k < s.L; ++k) {
    const auto [c1, c2] = c_coeffs(s, static_cast<long>(k));
    AssumptionRow row;
    row.k = k;
    row.c1_lambda = c1 * lambda;
    row.c1_lambda_sq = c1 * lambda * lambda;
    row.c2_a_sq = c2 * a_norm * a_norm;
    row.holds = row.c1_lambda <= 1.0 && row.c1_lambda_sq <= 1.0 && row.c2_a_sq <= 1.0;
    rep.all_hold = rep.all_hold && row.holds;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace deconet
