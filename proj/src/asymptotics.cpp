#include "crypt/asymptotics.hpp"

#include <cmath>
#include <limits>

namespace cryptsim {

namespace {

constexpr double kExpTol = 1e-9;  // tolerance when comparing law exponents

int sign_with_tol(double d) {
  if (d > kExpTol) return 1;
  if (d < -kExpTol) return -1;
  return 0;
}

void check_law(const RateExpr& e, const char* name) {
  if (!(e.c > 0) || !std::isfinite(e.c) || !std::isfinite(e.p) ||
      !std::isfinite(e.q)) {
    throw ConfigError(std::string("rate law ") + name +
                      " must have finite exponents and coefficient > 0");
  }
}

LimitLaw sigma_uniform_law(double alpha) {
  const double lo = alpha >= 1 ? 0.0 : 1.0 - alpha;
  return LimitLaw::uniform_interval(lo, 1.0);
}

Regime boundary_regime(RateLaws laws, double alpha) {
  Regime r;
  r.case_tag = RegimeCase::boundary_unsupported;
  r.alpha = alpha;
  r.classification_only = true;
  r.laws = std::move(laws);
  return r;
}

}  // namespace

double RateExpr::eval(int l) const {
  return c * std::exp2(p * l) * std::pow(static_cast<double>(l), q);
}

RateExpr operator*(const RateExpr& a, const RateExpr& b) {
  return {a.c * b.c, a.p + b.p, a.q + b.q};
}

RateExpr sqrt_expr(const RateExpr& a) {
  return {std::sqrt(a.c), 0.5 * a.p, 0.5 * a.q};
}

RateExpr times_powers(const RateExpr& a, double dp, double dq) {
  return {a.c, a.p + dp, a.q + dq};
}

Order compare_orders(const RateExpr& a, const RateExpr& b) {
  check_law(a, "lhs");
  check_law(b, "rhs");
  int s = sign_with_tol(a.p - b.p);
  if (s == 0) s = sign_with_tol(a.q - b.q);
  if (s > 0) return Order::much_greater;
  if (s < 0) return Order::much_less;
  return Order::same_order;
}

std::string Regime::label() const {
  switch (case_tag) {
    case RegimeCase::thm1_case1: return "T1.1";
    case RegimeCase::thm1_case2: return "T1.2";
    case RegimeCase::thm1_case3: return "T1.3";
    case RegimeCase::thm1_case4: return "T1.4";
    case RegimeCase::thm1_case5: return "T1.5";
    case RegimeCase::null_1: return "NULL.1";
    case RegimeCase::null_2: return "NULL.2";
    case RegimeCase::null_3: return "NULL.3";
    case RegimeCase::null_4: return "NULL.4";
    case RegimeCase::null_5: return "NULL.5";
    case RegimeCase::null_6: return "NULL.6";
    case RegimeCase::null_7: return "NULL.7";
    case RegimeCase::boundary_unsupported: return "boundary-unsupported";
  }
  return "?";
}

std::string Regime::scaling_formula() const {
  switch (scaling) {
    case ScalingKind::long_path: return "min(alpha,1)*v1*v2*N*log2(N)";
    case ScalingKind::sqrt_path: return "sqrt(v1*v2*N)";
    case ScalingKind::stem_rate: return laws.mu ? "mu" : "u1";
    case ScalingKind::stem_rate_1pA: return "(1+A)*mu";
    case ScalingKind::inverse_logn: return "1/log2(N)";
    case ScalingKind::none: return "none";
  }
  return "?";
}

Regime classify_theorem1(const RateExpr& u1, const RateExpr& u2,
                         const RateExpr& v1, const RateExpr& v2) {
  check_law(u1, "u1");
  check_law(u2, "u2");
  check_law(v1, "v1");
  check_law(v2, "v2");
  if (compare_orders(u1, u2) == Order::much_greater) {
    throw ConfigError("ordering-violation: u1 law exceeds u2 law");
  }
  if (compare_orders(v1, v2) == Order::much_greater) {
    throw ConfigError("ordering-violation: v1 law exceeds v2 law");
  }
  const double alpha = -v2.p;
  if (!(alpha > 0)) {
    throw ConfigError("daughter type-2 law must decay (v2 exponent p < 0)");
  }
  RateLaws laws;
  laws.u1 = u1;
  laws.u2 = u2;
  laws.v1 = v1;
  laws.v2 = v2;

  const RateExpr prod = v1 * v2;
  const RateExpr inv_n{1, -1, 0};         // 1/N
  const RateExpr inv_n_log2{1, -1, -2};   // 1/(N log^2 N)

  const Order vs_inv_n = compare_orders(prod, inv_n);
  if (vs_inv_n == Order::much_greater) {
    Regime r;
    r.case_tag = RegimeCase::thm1_case3;
    r.alpha = alpha;
    r.tau_law = LimitLaw::rayleigh();
    r.sigma_law = LimitLaw::point_mass(1.0);
    r.rho_limit = 1.0;
    r.dominant_path = Path::dd;
    r.scaling = ScalingKind::sqrt_path;
    r.laws = laws;
    return r;
  }
  if (vs_inv_n == Order::same_order) return boundary_regime(laws, alpha);

  const Order vs_low = compare_orders(prod, inv_n_log2);
  if (vs_low == Order::same_order) return boundary_regime(laws, alpha);
  const bool low_band = vs_low == Order::much_less;

  // Rate at which daughter paths produce the winning type-2: below the
  // 1/(N log^2 N) band it is v1*v2*N*log2(N), in the middle band
  // sqrt(v1*v2*N). The stem competes through u1.
  const RateExpr daughter_rate =
      low_band ? times_powers(prod, 1, 1) : sqrt_expr(times_powers(prod, 1, 0));
  const Order daughter_vs_stem = compare_orders(daughter_rate, u1);
  if (daughter_vs_stem == Order::same_order) return boundary_regime(laws, alpha);

  if (daughter_vs_stem == Order::much_greater) {
    Regime r;
    r.alpha = alpha;
    r.laws = laws;
    r.rho_limit = 1.0;
    r.dominant_path = Path::dd;
    if (low_band) {
      r.case_tag = RegimeCase::thm1_case1;
      r.tau_law = LimitLaw::exponential1();
      r.sigma_law = sigma_uniform_law(alpha);
      r.scaling = ScalingKind::long_path;
    } else {
      r.case_tag = RegimeCase::thm1_case2;
      r.tau_law = LimitLaw::rayleigh();
      r.sigma_law = LimitLaw::point_mass(1.0);
      r.scaling = ScalingKind::sqrt_path;
    }
    return r;
  }

  // Stem-first regimes: the first mutation lands on the stem cell.
  const RateExpr inv_logn{1, 0, -1};
  const Order u2_vs_logn = compare_orders(u2, inv_logn);
  const Order u2_vs_nv2 = compare_orders(u2, times_powers(v2, 1, 0));
  if (u2_vs_logn == Order::much_less && u2_vs_nv2 == Order::much_less) {
    Regime r;
    r.case_tag = RegimeCase::thm1_case4;
    r.alpha = alpha;
    r.tau_law = LimitLaw::exponential1();
    r.sigma_law = LimitLaw::point_mass(0.0);
    r.rho_limit = std::min(alpha, 1.0);
    r.dominant_path = Path::sd;
    r.scaling = ScalingKind::stem_rate;
    r.laws = laws;
    return r;
  }
  if (u2_vs_logn == Order::much_greater || u2_vs_nv2 == Order::much_greater) {
    Regime r;
    r.case_tag = RegimeCase::thm1_case5;
    r.alpha = alpha;
    r.sigma_law = LimitLaw::point_mass(0.0);
    r.rho_limit = 0.0;
    r.dominant_path = Path::ss;
    r.scaling = ScalingKind::stem_rate;
    r.laws = laws;
    if (compare_orders(u1, u2) == Order::same_order) {
      const double ratio = u1.c / u2.c;
      if (ratio > 1 + kExpTol) {
        throw ConfigError("ordering-violation: u1 law exceeds u2 law");
      }
      r.A = std::min(ratio, 1.0);
      r.tau_law = LimitLaw::hypoexp(*r.A);
    } else {
      r.tau_law = LimitLaw::exponential1();
    }
    return r;
  }
  return boundary_regime(laws, alpha);
}

Regime classify_null(const RateExpr& mu) {
  check_law(mu, "mu");
  RateLaws laws;
  laws.mu = mu;
  const double alpha = -mu.p;

  // The thresholds 1/(N log N), 1/(sqrt(N) log N) and 1/sqrt(N) order the
  // (p, q) plane lexicographically.
  const auto position = [&](double tp, double tq) {
    int s = sign_with_tol(mu.p - tp);
    if (s == 0) s = sign_with_tol(mu.q - tq);
    return s;
  };

  Regime r;
  r.alpha = alpha;
  r.laws = laws;
  const int vs_a = position(-1, -1);
  if (vs_a < 0) {
    r.case_tag = RegimeCase::null_1;
    r.tau_law = LimitLaw::exponential1();
    r.sigma_law = LimitLaw::point_mass(0.0);
    r.rho_limit = 1.0;
    r.dominant_path = Path::sd;
    r.scaling = ScalingKind::stem_rate;
    return r;
  }
  if (vs_a == 0) {
    r.case_tag = RegimeCase::null_2;
    r.A = mu.c;
    r.tau_law = LimitLaw::exponential1();
    r.sigma_law = LimitLaw::bernoulli_mix(mu.c);
    r.rho_limit = 1.0;
    r.dd_fraction = mu.c / (1.0 + mu.c);
    r.scaling = ScalingKind::stem_rate_1pA;
    return r;
  }
  const int vs_b = position(-0.5, -1);
  if (vs_b < 0) {
    r.case_tag = RegimeCase::null_3;
    r.tau_law = LimitLaw::exponential1();
    r.sigma_law = sigma_uniform_law(alpha);
    r.rho_limit = 1.0;
    r.dominant_path = Path::dd;
    r.scaling = ScalingKind::long_path;
    return r;
  }
  if (vs_b == 0) {
    r.case_tag = RegimeCase::null_4;
    r.A = mu.c;
    r.tau_law = LimitLaw::null_boundary_tau(mu.c);
    r.sigma_law = LimitLaw::null_boundary_sigma(mu.c);
    r.rho_limit = 1.0;
    r.dominant_path = Path::dd;
    r.scaling = ScalingKind::inverse_logn;
    return r;
  }
  const int vs_c = position(-0.5, 0);
  if (vs_c == 0) {
    r.case_tag = RegimeCase::null_6;
    r.A = mu.c;
    r.classification_only = true;
    return r;
  }
  r.case_tag = vs_c < 0 ? RegimeCase::null_5 : RegimeCase::null_7;
  r.tau_law = LimitLaw::rayleigh();
  r.sigma_law = LimitLaw::point_mass(1.0);
  r.rho_limit = 1.0;
  r.dominant_path = Path::dd;
  r.scaling = ScalingKind::sqrt_path;
  return r;
}

double scaling_factor(const Regime& regime, const CryptConfig& config) {
  validate_config(config, Variant::H2);
  const auto matches = [&](const std::optional<RateExpr>& law, double rate,
                           const char* name) {
    if (!law) return;
    const double want = law->eval(config.l);
    const double tol = 1e-9 * std::max({std::fabs(want), std::fabs(rate), 1e-300});
    if (std::fabs(want - rate) > tol) {
      throw ConfigError(std::string("mismatched regime/config: rate ") + name +
                        " does not equal its law at l=" + std::to_string(config.l));
    }
  };
  if (regime.laws.mu) {
    matches(regime.laws.mu, config.u1, "u1");
    matches(regime.laws.mu, config.u2, "u2");
    matches(regime.laws.mu, config.v1, "v1");
    matches(regime.laws.mu, config.v2, "v2");
  } else {
    matches(regime.laws.u1, config.u1, "u1");
    matches(regime.laws.u2, config.u2, "u2");
    matches(regime.laws.v1, config.v1, "v1");
    matches(regime.laws.v2, config.v2, "v2");
  }
  const double n = std::exp2(config.l);
  switch (regime.scaling) {
    case ScalingKind::long_path:
      return std::min(regime.alpha, 1.0) * config.v1 * config.v2 * n * config.l;
    case ScalingKind::sqrt_path:
      return std::sqrt(config.v1 * config.v2 * n);
    case ScalingKind::stem_rate:
      return config.u1;
    case ScalingKind::stem_rate_1pA:
      return (1.0 + regime.A.value()) * config.u1;
    case ScalingKind::inverse_logn:
      return 1.0 / config.l;
    case ScalingKind::none:
      break;
  }
  throw ConfigError("scaling undefined for regime " + regime.label());
}

double successful_rate_sum(int l, double v1, double v2, double C,
                           double Cprime, double beta1, double beta2) {
  if (l < 1) throw ConfigError("nonpositive-l: l must be >= 1");
  if (!(C > 0) || Cprime < 0 || !(v1 >= 0) || !(v2 >= 0)) {
    throw ConfigError("successful_rate_sum: bad constants");
  }
  if (!(0 <= beta1 && beta1 <= beta2 && beta2 <= 1)) {
    throw ConfigError("successful_rate_sum: need 0 <= beta1 <= beta2 <= 1");
  }
  double sum = 0, comp = 0;  // Kahan
  const int i_lo = static_cast<int>(std::floor(l * beta1)) + 1;
  for (int i = std::max(i_lo, 1); i <= l * beta2; ++i) {
    const double cells = std::exp2(l - i + 1) - Cprime;
    const double term =
        v1 * std::exp2(i - 1) * -std::expm1(-C * v2 * cells);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double successful_rate_asymptote(int l, double v1, double v2, double alpha,
                                 double C, double beta1, double beta2) {
  if (l < 1) throw ConfigError("nonpositive-l: l must be >= 1");
  const double lo = std::max(beta1, 1.0 - alpha);
  const double span = std::max(0.0, beta2 - lo);
  return C * span * v1 * v2 * std::exp2(l) * l;
}

double successful_rate_ratio(int l, double alpha, double C, double Cprime,
                             double beta1, double beta2) {
  if (l < 1) throw ConfigError("nonpositive-l: l must be >= 1");
  if (!(alpha > 0) || !(C > 0) || Cprime < 0) {
    throw ConfigError("successful_rate_ratio: bad constants");
  }
  if (!(0 <= beta1 && beta1 <= beta2 && beta2 <= 1)) {
    throw ConfigError("successful_rate_ratio: need 0 <= beta1 <= beta2 <= 1");
  }
  const double span = std::max(0.0, beta2 - std::max(beta1, 1.0 - alpha));
  if (span <= 0) {
    throw ConfigError("successful_rate_ratio: asymptote vanishes on this range");
  }
  const double log2v2 = -alpha * static_cast<double>(l);
  const double log2C = std::log2(C);
  double sum = 0, comp = 0;
  const int i_lo = static_cast<int>(std::floor(l * beta1)) + 1;
  for (int i = std::max(i_lo, 1); i <= l * beta2; ++i) {
    const double g = static_cast<double>(l - i + 1);
    const double base = std::exp2(static_cast<double>(i - 1 - l));
    double r;
    if (g < 63 && std::exp2(g) - Cprime <= 0) {
      // Tail generations where the descendant count net of Cprime is not
      // positive; terms are tiny (possibly negative) but kept exact.
      const double x = C * std::exp2(log2v2) * (std::exp2(g) - Cprime);
      const double k = std::fabs(x) <= 0x1.0p-40 ? 1.0 : -std::expm1(-x) / x;
      r = C * (1.0 - Cprime * base) * k;
    } else {
      const double log2arg =
          g <= 52 ? std::log2(std::exp2(g) - Cprime) : g;
      const double log2x = log2C + log2arg + log2v2;
      if (log2x > 40) {
        r = std::exp2(static_cast<double>(i - 1 - l) - log2v2);
      } else if (log2x < -40) {
        r = C * (1.0 - Cprime * base);
      } else {
        const double x = std::exp2(log2x);
        r = -std::expm1(-x) *
            std::exp2(static_cast<double>(i - 1 - l) - log2v2);
      }
    }
    const double y = r - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / (C * span * static_cast<double>(l));
}

}  // namespace cryptsim
