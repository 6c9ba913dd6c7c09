#include "deconet/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <json.hpp>

#include "deconet/error.hpp"
#include "deconet/io.hpp"

namespace deconet {

namespace {

double c1_at(const BoundInputs& bi, long k) { return c_coeffs(bi.sched, k).first; }
double c2_at(const BoundInputs& bi, long k) { return c_coeffs(bi.sched, k).second; }

double rho(const BoundInputs& bi) { return (bi.lambda + bi.a_norm) / bi.sched.mu; }

double delta_term(const BoundInputs& bi) {
  return std::sqrt(2.0 * std::log(4.0 / bi.delta) / static_cast<double>(bi.s));
}

// sqrt(log(e (1 + x))) without overflow in x.
double sqrt_log_e(double x) { return std::sqrt(1.0 + std::log1p(x)); }

}  // namespace

void BoundInputs::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  if (L < 1 || N < 1 || n < 1 || m < 1 || s < 1) throw InvalidArgument("counts must be positive");
  if (lambda < 0.0 || a_norm < 0.0 || Y_fro < 0.0) throw InvalidArgument("norms must be nonnegative");
  if (!(B_in >= 0.0) || !(B_out > 0.0)) throw InvalidArgument("B_out must be positive and B_in nonnegative");
  if (sched.L < L) throw InvalidArgument("schedule has fewer layers than L");
}

GammaSeq gamma_seq(const BoundInputs& bi) {
  GammaSeq g;
  const double lam = bi.lambda;
  const double a = bi.a_norm;
  for (std::size_t k = 0; k < bi.L; ++k) {
    const auto [c1, c2] = c_coeffs(bi.sched, static_cast<long>(k));
    g.gamma_k.push_back(2.0 * (c1 * lam * lam + c2 * a * a + 2.0 * a * lam * (c1 + c2)) + 1.0);
  }
  g.gamma = 4.0 * (lam + a + 1.0) + 1.0;
  return g;
}

double q_coeff(const BoundInputs& bi, long k) {
  if (k < 0) return 0.0;
  const auto [c1, c2] = c_coeffs(bi.sched, k);
  return bi.a_norm * (c1 * bi.lambda + c2 * bi.a_norm) + c2;
}

double zeta(double gamma, std::size_t k) {
  return (std::pow(gamma, static_cast<double>(k)) - 1.0) / (gamma - 1.0);
}

NormBound f_norm_bound(const BoundInputs& bi, std::size_t k) {
  if (k > bi.L) throw InvalidArgument("f_norm_bound: k exceeds L");
  const GammaSeq g = gamma_seq(bi);
  const double scale = 2.0 * bi.sched.mu * bi.Y_fro;
  NormBound nb;
  if (k == 0) return nb;
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double prod = 1.0;
    for (std::size_t j = i; j < k; ++j) prod *= g.gamma_k[j];
    sum += q_coeff(bi, static_cast<long>(i) - 1) * prod;
  }
  nb.exact = scale * (sum + q_coeff(bi, static_cast<long>(k) - 1));
  nb.simplified = scale * (bi.a_norm + 1.0) * (zeta(g.gamma, k) + 1.0);
  return nb;
}

KLGeneral k_l_general(const BoundInputs& bi) {
  const std::size_t L = bi.L;
  const GammaSeq g = gamma_seq(bi);
  const double gmax = *std::max_element(g.gamma_k.begin(), g.gamma_k.end());
  KLGeneral out;
  out.Delta.resize(L);
  for (std::size_t k = 0; k < L; ++k) out.Delta[k] = f_norm_bound(bi, k).exact;
  out.E.assign(L + 1, 0.0);
  const double lam = bi.lambda;
  const double a = bi.a_norm;
  for (std::size_t k = 1; k <= L; ++k) {
    const long j = static_cast<long>(k) - 1;
    const double c1 = c1_at(bi, j);
    const double c2 = c2_at(bi, j);
    out.E[k] = 2.0 * out.Delta[k - 1] * (2.0 * lam * c1 + a * (c1 + c2)) +
               2.0 * bi.sched.mu * c1 * a * bi.Y_fro;
  }
  for (std::size_t k = 1; k <= L; ++k) {
    out.K_L += std::pow(gmax, static_cast<double>(L - k)) * out.E[k];
  }
  double K = 0.0;
  for (std::size_t k = 1; k <= L; ++k) K = (k == 1 ? 0.0 : gmax * K) + out.E[k];
  out.K_L_recursive = K;
  return out;
}

double kappa(double gamma, std::size_t L) {
  const double g = gamma;
  const double l = static_cast<double>(L);
  const double gm1 = g - 1.0;
  return std::pow(g, l) * ((l - 1.0) / (g * gm1) + g * (g - 2.0) / (gm1 * gm1)) -
         g * g * (g - 2.0) / (gm1 * gm1);
}

KLSimplified k_l_simplified(const BoundInputs& bi) {
  const double g = gamma_seq(bi).gamma;
  const double a = bi.a_norm;
  const double mu = bi.sched.mu;
  KLSimplified out;
  out.kappa_L = kappa(g, bi.L);
  out.K_L = 2.0 * mu * bi.Y_fro *
            (a * (static_cast<double>(bi.L) - 1.0 + 1.0 / mu) + 2.0 * (a + 1.0) * (a + 3.0) * out.kappa_L);
  return out;
}

double log_covering(const BoundInputs& bi, double K_L, double eps_cover) {
  if (!(eps_cover > 0.0)) throw InvalidArgument("covering radius must be positive");
  const double nn = static_cast<double>(bi.N) * static_cast<double>(bi.n);
  return nn * std::log1p(2.0 * bi.lambda * (bi.lambda + bi.a_norm) * K_L / (bi.sched.mu * eps_cover));
}

double log_covering_ball(const BoundInputs& bi, double eps_cover) {
  if (!(eps_cover > 0.0)) throw InvalidArgument("covering radius must be positive");
  const double nn = static_cast<double>(bi.N) * static_cast<double>(bi.n);
  return nn * std::log1p(2.0 * bi.lambda / eps_cover);
}

double dudley_integral(const BoundInputs& bi, double K_L) {
  const double s = static_cast<double>(bi.s);
  const double upper = std::sqrt(s) * bi.B_out / 2.0;
  const double b = 2.0 * bi.lambda * rho(bi) * K_L;
  if (b == 0.0) return 0.0;
  const double nn = static_cast<double>(bi.N) * static_cast<double>(bi.n);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double integral = integrator.integrate(
      [&](double e) { return e <= 0.0 ? 0.0 : std::sqrt(nn * std::log1p(b / e)); }, 0.0, upper);
  return 16.0 * (bi.B_in + bi.B_out) / s * integral;
}

double gen_bound(const BoundInputs& bi, BoundVariant variant, KLSource source) {
  bi.validate();
  const double K = source == KLSource::general ? k_l_general(bi).K_L : k_l_simplified(bi).K_L;
  const double s = static_cast<double>(bi.s);
  const double nn_s = std::sqrt(static_cast<double>(bi.N) * static_cast<double>(bi.n) / s);
  const double lr = bi.lambda * rho(bi);
  switch (variant) {
    case BoundVariant::thm3: {
      const double sum = bi.B_in + bi.B_out;
      return 8.0 * sum * bi.B_out * nn_s * sqrt_log_e(4.0 * lr * K / (std::sqrt(s) * bi.B_out)) +
             4.0 * sum * sum * delta_term(bi);
    }
    case BoundVariant::thm5: {
      const double B = std::max(bi.B_in, bi.B_out);
      return 16.0 * B * B * nn_s * sqrt_log_e(4.0 * lr * K / (std::sqrt(s) * B)) +
             16.0 * B * B * delta_term(bi);
    }
    case BoundVariant::thm5_as_printed: {
      const double B = std::max(bi.B_in, bi.B_out);
      const double a = bi.a_norm;
      const double p = bi.lambda * (bi.lambda + a) * a;
      const double q = p * (1.0 / bi.sched.mu - 1.0);
      const double r = 2.0 * p * (a + 1.0) * (a + 3.0);
      const double kap = kappa(gamma_seq(bi).gamma, bi.L);
      const double arg = bi.Y_fro * (p + q * static_cast<double>(bi.L) + r * kap) / (std::sqrt(s) * B);
      return 16.0 * B * B * nn_s * sqrt_log_e(arg) + 16.0 * B * delta_term(bi);
    }
  }
  return 0.0;
}

BoundReport bound_report(const BoundInputs& bi) {
  bi.validate();
  BoundReport r;
  const GammaSeq g = gamma_seq(bi);
  r.gamma_k = g.gamma_k;
  r.gamma = g.gamma;
  for (std::size_t k = 0; k < bi.L; ++k) r.Q_k.push_back(q_coeff(bi, static_cast<long>(k)));
  for (std::size_t k = 0; k <= bi.L; ++k) {
    r.zeta.push_back(zeta(g.gamma, k));
    const NormBound nb = f_norm_bound(bi, k);
    r.f_bound_exact.push_back(nb.exact);
    r.f_bound_simplified.push_back(nb.simplified);
  }
  const KLGeneral kg = k_l_general(bi);
  const KLSimplified ks = k_l_simplified(bi);
  r.Delta = kg.Delta;
  r.E = kg.E;
  r.K_L_general = kg.K_L;
  r.K_L_simplified = ks.K_L;
  r.kappa_L = ks.kappa_L;
  r.log_cover = log_covering(bi, kg.K_L, std::sqrt(static_cast<double>(bi.s)) * bi.B_out / 2.0);
  r.dudley = dudley_integral(bi, kg.K_L);
  r.gen_bound_thm3 = gen_bound(bi, BoundVariant::thm3, KLSource::general);
  r.gen_bound_thm5 = gen_bound(bi, BoundVariant::thm5, KLSource::simplified);
  r.gen_bound_thm5_as_printed = gen_bound(bi, BoundVariant::thm5_as_printed, KLSource::simplified);
  r.assumptions_hold = check_assumptions(bi.sched, bi.lambda, bi.a_norm).all_hold;
  return r;
}

std::string report_json(const BoundReport& r, const BoundInputs& bi) {
  nlohmann::json j;
  j["inputs"] = {{"lambda", bi.lambda}, {"a_norm", bi.a_norm}, {"L", bi.L},     {"N", bi.N},
                 {"n", bi.n},           {"m", bi.m},           {"s", bi.s},     {"Y_fro", bi.Y_fro},
                 {"B_in", bi.B_in},     {"B_out", bi.B_out},   {"delta", bi.delta},
                 {"mu", bi.sched.mu}};
  j["gamma_k"] = r.gamma_k;
  j["gamma"] = r.gamma;
  j["Q_k"] = r.Q_k;
  j["zeta"] = r.zeta;
  j["f_bound_exact"] = r.f_bound_exact;
  j["f_bound_simplified"] = r.f_bound_simplified;
  j["Delta"] = r.Delta;
  j["E"] = r.E;
  j["K_L_general"] = r.K_L_general;
  j["K_L_simplified"] = r.K_L_simplified;
  j["kappa_L"] = r.kappa_L;
  j["log_covering_at_radius"] = r.log_cover;
  j["dudley_integral"] = r.dudley;
  j["gen_bound_thm3"] = r.gen_bound_thm3;
  j["gen_bound_thm5"] = r.gen_bound_thm5;
  j["gen_bound_thm5_as_printed"] = r.gen_bound_thm5_as_printed;
  j["assumptions_hold"] = r.assumptions_hold;
  return j.dump(2) + "\n";
}

Schedule resize_schedule(const Schedule& s, std::size_t L) {
  switch (s.rule) {
    case ThetaRule::geometric: return build_geometric(L, s.mu, s.alpha, s.beta, s.L_tilde);
    case ThetaRule::acf: return build_acf(L, s.mu, s.t1[1]);
    case ThetaRule::constant: return build_constant(L, s.mu, s.t1[1], s.theta[1]);
  }
  return s;
}

std::vector<CurveRow> scaling_curve(const BoundInputs& base, const std::vector<GridPoint>& grid) {
  if (grid.empty()) throw InvalidArgument("scaling_curve: empty grid");
  const double y_per_sample = base.Y_fro / std::sqrt(static_cast<double>(base.s));
  std::vector<CurveRow> rows;
  for (const GridPoint& g : grid) {
    BoundInputs bi = base;
    bi.N = g.N;
    bi.L = g.L;
    bi.s = g.s;
    bi.sched = resize_schedule(base.sched, g.L);
    bi.Y_fro = y_per_sample * std::sqrt(static_cast<double>(g.s));
    CurveRow row;
    row.at = g;
    row.bound = gen_bound(bi, BoundVariant::thm5, KLSource::simplified);
    row.sqrt_NL_over_s = std::sqrt(static_cast<double>(g.N) * static_cast<double>(g.L) /
                                   static_cast<double>(g.s));
    rows.push_back(row);
  }
  return rows;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string out = "N,L,s,bound,sqrt_NL_over_s\n";
  for (const CurveRow& r : rows) {
    out += std::to_string(r.at.N) + "," + std::to_string(r.at.L) + "," + std::to_string(r.at.s) +
           "," + fmt_real(r.bound) + "," + fmt_real(r.sqrt_NL_over_s) + "\n";
  }
  return out;
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("spearman needs two equal-length series");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace deconet
