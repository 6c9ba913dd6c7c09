#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "deconet/schedule.hpp"

namespace deconet {

struct BoundInputs {
  double lambda = 1.0;  // spectral radius of the operator ball
  double a_norm = 1.0;  // ||A||_2
  Schedule sched;       // at least L layers
  std::size_t L = 1;
  std::size_t N = 1, n = 1, m = 1, s = 1;
  double Y_fro = 1.0;
  double B_in = 1.0;
  double B_out = 1.0;
  double delta = 0.05;

  void validate() const;
};

struct GammaSeq {
  std::vector<double> gamma_k;  // k = 0..L-1
  double gamma = 0.0;
};

/// Per-layer growth factors Gamma_k and their uniform bound gamma = 4(Lambda + ||A|| + 1) + 1.
GammaSeq gamma_seq(const BoundInputs& bi);

/// Q_k = ||A|| (c1 Lambda + c2 ||A||) + c2, with Q_{-1} = 0.
double q_coeff(const BoundInputs& bi, long k);

/// zeta_k = (gamma^k - 1) / (gamma - 1)
double zeta(double gamma, std::size_t k);

struct NormBound {
  double exact = 0.0;
  double simplified = 0.0;
};

/// Bounds on ||f^k_W(Y)||_F for 1 <= k <= L (k = 0 gives exact 0).
NormBound f_norm_bound(const BoundInputs& bi, std::size_t k);

struct KLGeneral {
  double K_L = 0.0;
  double K_L_recursive = 0.0;  // same quantity accumulated layer by layer
  std::vector<double> E;       // E[k], k = 1..L (E[0] unused, 0)
  std::vector<double> Delta;   // Delta[k], k = 0..L-1
};

/// Lipschitz constant in W of the L-layer map, from the per-layer recursion.
KLGeneral k_l_general(const BoundInputs& bi);

/// kappa_L for the simplified form.
double kappa(double gamma, std::size_t L);

struct KLSimplified {
  double K_L = 0.0;
  double kappa_L = 0.0;
};

/// 2 mu ||Y|| [||A|| (L - 1 + 1/mu) + 2 (||A|| + 1)(||A|| + 3) kappa_L]
KLSimplified k_l_simplified(const BoundInputs& bi);

/// Log covering number of the decoder outputs at radius eps_cover, for a given K_L.
double log_covering(const BoundInputs& bi, double K_L, double eps_cover);
/// Log covering number of the operator ball alone.
double log_covering_ball(const BoundInputs& bi, double eps_cover);

/// 16 (B_in + B_out)/s times the entropy integral, evaluated by quadrature.
double dudley_integral(const BoundInputs& bi, double K_L);

enum class BoundVariant { thm3, thm5, thm5_as_printed };
enum class KLSource { general, simplified };

/// Generalization gap bound. thm5 uses B = max(B_in, B_out) for both constants.
double gen_bound(const BoundInputs& bi, BoundVariant variant, KLSource source);

struct BoundReport {
  std::vector<double> gamma_k;
  double gamma = 0.0;
  std::vector<double> Q_k;
  std::vector<double> zeta;            // k = 0..L
  std::vector<double> f_bound_exact;   // k = 0..L
  std::vector<double> f_bound_simplified;
  std::vector<double> Delta;
  std::vector<double> E;
  double K_L_general = 0.0;
  double K_L_simplified = 0.0;
  double kappa_L = 0.0;
  double log_cover = 0.0;
  double dudley = 0.0;
  double gen_bound_thm3 = 0.0;
  double gen_bound_thm5 = 0.0;
  double gen_bound_thm5_as_printed = 0.0;
  bool assumptions_hold = false;
};

BoundReport bound_report(const BoundInputs& bi);
std::string report_json(const BoundReport& r, const BoundInputs& bi);

struct GridPoint {
  std::size_t N = 1, L = 1, s = 1;
};

struct CurveRow {
  GridPoint at;
  double bound = 0.0;
  double sqrt_NL_over_s = 0.0;
};

/// Composed (thm5) bound over a grid; ||Y||_F is rescaled to keep ||Y||_F / sqrt(s) fixed and
/// the schedule is rebuilt for each L with the base schedule's rule.
std::vector<CurveRow> scaling_curve(const BoundInputs& base, const std::vector<GridPoint>& grid);
std::string curve_csv(const std::vector<CurveRow>& rows);

/// Schedule of a different depth with the same construction rule.
Schedule resize_schedule(const Schedule& s, std::size_t L);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace deconet
