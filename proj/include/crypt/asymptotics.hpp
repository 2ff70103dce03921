#pragma once

#include <optional>
#include <string>

#include "crypt/core.hpp"
#include "crypt/laws.hpp"

namespace cryptsim {

/// Rate law c * 2^(p*l) * l^q, i.e. c * N^p * (log2 N)^q with N = 2^l.
/// Regime classification compares laws symbolically through (p, q, c).
struct RateExpr {
  double c = 1;
  double p = 0;
  double q = 0;

  double eval(int l) const;
};

RateExpr operator*(const RateExpr& a, const RateExpr& b);
RateExpr sqrt_expr(const RateExpr& a);
/// Multiply by 2^(dp*l) * l^dq, e.g. times_powers(x, 1, 1) = x * N * log2 N.
RateExpr times_powers(const RateExpr& a, double dp, double dq);

enum class Order { much_less, same_order, much_greater };

/// Asymptotic comparison as l -> infinity: lexicographic on (p, q) with a
/// 1e-9 tolerance so that laws assembled by arithmetic on decimal exponents
/// still land on intended boundaries; equal exponents mean same order.
Order compare_orders(const RateExpr& a, const RateExpr& b);

enum class RegimeCase {
  thm1_case1,
  thm1_case2,
  thm1_case3,
  thm1_case4,
  thm1_case5,
  null_1,
  null_2,
  null_3,
  null_4,
  null_5,
  null_6,
  null_7,
  boundary_unsupported,
};

enum class ScalingKind {
  long_path,     // min(alpha,1) * v1 * v2 * N * log2 N
  sqrt_path,     // sqrt(v1 * v2 * N)
  stem_rate,     // u1 (equals mu in the null model)
  stem_rate_1pA, // (1 + A) * mu
  inverse_logn,  // 1 / log2 N
  none,
};

/// The four rate laws a classification was derived from (or the single
/// shared law mu for the null model). Kept with the regime so numeric
/// scalings can cross-check the config they are applied to.
struct RateLaws {
  std::optional<RateExpr> u1, u2, v1, v2;
  std::optional<RateExpr> mu;
};

struct Regime {
  RegimeCase case_tag = RegimeCase::boundary_unsupported;
  double alpha = 0;                  // -p of the daughter type-2 law
  std::optional<double> A;           // same-order ratio where applicable
  std::optional<LimitLaw> tau_law;   // law of the scaled waiting time
  std::optional<LimitLaw> sigma_law;
  std::optional<double> rho_limit;
  std::optional<Path> dominant_path;
  std::optional<double> dd_fraction;  // mixed-path regime only
  ScalingKind scaling = ScalingKind::none;
  bool classification_only = false;
  RateLaws laws;

  std::string label() const;          // "T1.1".."NULL.7" or "boundary-unsupported"
  std::string scaling_formula() const;
};

/// Decide the hierarchical-model regime from the four rate laws.
/// Preconditions: v2 must decay (p < 0, so alpha = -p > 0) and the
/// asymptotic orderings u1 <= u2, v1 <= v2 must hold.
Regime classify_theorem1(const RateExpr& u1, const RateExpr& u2,
                         const RateExpr& v1, const RateExpr& v2);

/// Decide the null-model regime (all four rates equal to mu).
Regime classify_null(const RateExpr& mu);

/// Numeric scaling factor for tau at the config's finite l. Throws
/// ConfigError when the regime has no scaling (boundary or degenerate
/// cases) or when the config's rates do not match the regime's laws.
double scaling_factor(const Regime& regime, const CryptConfig& config);

/// Expected rate at which daughter type-1 mutations that later produce a
/// type-2 arrive, summed over generations i in (l*beta1, l*beta2]:
///   sum v1 * 2^(i-1) * (1 - exp(-C * v2 * (2^(l-i+1) - Cprime))).
double successful_rate_sum(int l, double v1, double v2, double C,
                           double Cprime, double beta1, double beta2);

/// Closed-form limit of the same sum:
///   C * (beta2 - max(beta1, 1-alpha))^+ * v1 * v2 * 2^l * l.
double successful_rate_asymptote(int l, double v1, double v2, double alpha,
                                 double C, double beta1, double beta2);

/// successful_rate_sum / successful_rate_asymptote for v1 = v2 = N^-alpha,
/// computed per-term in exponent space so it stays finite for l far beyond
/// double range (v1 and v2 cancel analytically).
double successful_rate_ratio(int l, double alpha, double C, double Cprime,
                             double beta1, double beta2);

}  // namespace cryptsim
