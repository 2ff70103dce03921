#include "crypt/laws.hpp"

#include <cmath>
#include <stdexcept>

namespace cryptsim {

namespace {

constexpr double kHypoEqualTol = 1e-9;

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double c, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = std::exp(-0.5 * c * lm * lm);
  const double frm = std::exp(-0.5 * c * rm * rm);
  const double left = simpson(a, m, fa, flm, fm);
  const double right = simpson(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(c, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(c, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

void check_A(double A, const char* what) {
  if (!(A > 0) || !std::isfinite(A)) {
    throw std::invalid_argument(std::string(what) + ": A must be finite and > 0");
  }
}

// Piecewise cumulative hazard of the null boundary waiting time.
double nbt_hazard(double A, double t) {
  if (t <= 0) return 0;
  if (t <= 0.5) return 0.5 * A * A * t * t;
  return 0.5 * A * A * t - 0.125 * A * A;
}

double nbs_cdf(double A, double x) {
  if (x <= 0.5) return 0;
  if (x >= 1) return 1;
  const double w = 1 - x;  // in (0, 1/2)
  const double inner = gaussian_exposure_integral(A * A, w, 0.5);
  return std::exp(-0.5 * A * A * w * w) - std::exp(-0.125 * A * A) -
         w * A * A * inner + 2.0 * std::exp(-0.125 * A * A) * (x - 0.5);
}

}  // namespace

double gaussian_exposure_integral(double c, double a, double b) {
  if (!(b > a)) return 0;
  const double fa = std::exp(-0.5 * c * a * a);
  const double fb = std::exp(-0.5 * c * b * b);
  const double m = 0.5 * (a + b);
  const double fm = std::exp(-0.5 * c * m * m);
  const double whole = simpson(a, b, fa, fm, fb);
  return adaptive_simpson(c, a, b, fa, fm, fb, whole, 1e-10, 48);
}

double limit_cdf(const LimitLaw& law, double t) {
  switch (law.kind) {
    case LawKind::exp1:
      return t <= 0 ? 0.0 : -std::expm1(-t);
    case LawKind::rayleigh:
      return t <= 0 ? 0.0 : -std::expm1(-0.5 * t * t);
    case LawKind::hypoexp: {
      check_A(law.a, "hypoexp");
      if (t <= 0) return 0;
      if (std::fabs(1.0 - law.a) < kHypoEqualTol) {
        // Equal rates: Gamma(2, 1).
        return -std::expm1(-t) - t * std::exp(-t);
      }
      const double r2 = 1.0 / law.a;
      return 1.0 - (r2 * std::exp(-t) - std::exp(-r2 * t)) / (r2 - 1.0);
    }
    case LawKind::null_boundary_tau:
      check_A(law.a, "null_boundary_tau");
      return t <= 0 ? 0.0 : -std::expm1(-nbt_hazard(law.a, t));
    case LawKind::null_boundary_sigma:
      check_A(law.a, "null_boundary_sigma");
      return nbs_cdf(law.a, t);
    case LawKind::uniform_interval: {
      if (!(law.b > law.a)) {
        throw std::invalid_argument("uniform_interval: requires b > a");
      }
      if (t <= law.a) return 0;
      if (t >= law.b) return 1;
      return (t - law.a) / (law.b - law.a);
    }
    case LawKind::point_mass:
      return t >= law.a ? 1.0 : 0.0;
    case LawKind::bernoulli_mix: {
      check_A(law.a, "bernoulli_mix");
      if (t < 0) return 0;
      const double u = t > 1 ? 1.0 : t;
      return (1.0 + law.a * u) / (1.0 + law.a);
    }
  }
  throw std::logic_error("limit_cdf: unknown law");
}

double limit_cdf_left(const LimitLaw& law, double t) {
  switch (law.kind) {
    case LawKind::point_mass:
      return t > law.a ? 1.0 : 0.0;
    case LawKind::bernoulli_mix: {
      check_A(law.a, "bernoulli_mix");
      if (t <= 0) return 0;
      const double u = t > 1 ? 1.0 : t;
      return (1.0 + law.a * u) / (1.0 + law.a);
    }
    default:
      return limit_cdf(law, t);
  }
}

double limit_pdf(const LimitLaw& law, double t) {
  switch (law.kind) {
    case LawKind::exp1:
      return t < 0 ? 0.0 : std::exp(-t);
    case LawKind::rayleigh:
      return t < 0 ? 0.0 : t * std::exp(-0.5 * t * t);
    case LawKind::hypoexp: {
      check_A(law.a, "hypoexp");
      if (t < 0) return 0;
      if (std::fabs(1.0 - law.a) < kHypoEqualTol) return t * std::exp(-t);
      const double r2 = 1.0 / law.a;
      return r2 / (r2 - 1.0) * (std::exp(-t) - std::exp(-r2 * t));
    }
    case LawKind::null_boundary_tau: {
      check_A(law.a, "null_boundary_tau");
      if (t < 0) return 0;
      const double A2 = law.a * law.a;
      const double rate = t <= 0.5 ? A2 * t : 0.5 * A2;
      return rate * std::exp(-nbt_hazard(law.a, t));
    }
    case LawKind::null_boundary_sigma: {
      check_A(law.a, "null_boundary_sigma");
      if (t < 0.5 || t > 1) return 0;
      const double A2 = law.a * law.a;
      return A2 * gaussian_exposure_integral(A2, 1 - t, 0.5) +
             2.0 * std::exp(-0.125 * A2);
    }
    case LawKind::uniform_interval:
      if (t <= law.a || t > law.b) return 0;
      return 1.0 / (law.b - law.a);
    case LawKind::point_mass:
      return 0;
    case LawKind::bernoulli_mix: {
      check_A(law.a, "bernoulli_mix");
      if (t <= 0 || t > 1) return 0;
      return law.a / (1.0 + law.a);
    }
  }
  throw std::logic_error("limit_pdf: unknown law");
}

double sample_limit(const LimitLaw& law, RngStream& stream) {
  switch (law.kind) {
    case LawKind::exp1:
      return stream.exp1();
    case LawKind::rayleigh:
      return std::sqrt(2.0 * stream.exp1());
    case LawKind::hypoexp: {
      check_A(law.a, "hypoexp");
      const double x = stream.exp1();
      return x + law.a * stream.exp1();
    }
    case LawKind::null_boundary_tau: {
      check_A(law.a, "null_boundary_tau");
      const double e = stream.exp1();
      const double A2 = law.a * law.a;
      if (e <= 0.125 * A2) return std::sqrt(2.0 * e) / law.a;
      return 2.0 * e / A2 + 0.25;
    }
    case LawKind::null_boundary_sigma: {
      // Exact two-stage draw: the waiting time t first, then the location,
      // uniform on [1-t, 1] when t <= 1/2 and on [1/2, 1] otherwise.
      check_A(law.a, "null_boundary_sigma");
      const double t = sample_limit(LimitLaw::null_boundary_tau(law.a), stream);
      const double u = stream.uniform();
      if (t <= 0.5) return 1.0 - t * (1.0 - u);
      return 0.5 + 0.5 * u;
    }
    case LawKind::uniform_interval:
      return law.b - (law.b - law.a) * stream.uniform();
    case LawKind::point_mass:
      return law.a;
    case LawKind::bernoulli_mix: {
      check_A(law.a, "bernoulli_mix");
      const double u = stream.uniform();
      if (u < 1.0 / (1.0 + law.a)) return 0;
      return 1.0 - stream.uniform();
    }
  }
  throw std::logic_error("sample_limit: unknown law");
}

bool law_has_atoms(const LimitLaw& law) {
  return law.kind == LawKind::point_mass || law.kind == LawKind::bernoulli_mix;
}

std::string law_name(const LimitLaw& law) {
  switch (law.kind) {
    case LawKind::exp1: return "Exp(1)";
    case LawKind::rayleigh: return "Rayleigh";
    case LawKind::hypoexp: return "Exp(1)+Exp(1/" + std::to_string(law.a) + ")";
    case LawKind::null_boundary_tau:
      return "NullBoundaryTau(A=" + std::to_string(law.a) + ")";
    case LawKind::null_boundary_sigma:
      return "NullBoundarySigma(A=" + std::to_string(law.a) + ")";
    case LawKind::uniform_interval:
      return "Uniform(" + std::to_string(law.a) + ", " + std::to_string(law.b) + "]";
    case LawKind::point_mass:
      return "PointMass(" + std::to_string(law.a) + ")";
    case LawKind::bernoulli_mix:
      return "BernoulliMix(A=" + std::to_string(law.a) + ")";
  }
  return "?";
}

}  // namespace cryptsim
