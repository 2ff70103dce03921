#pragma once

#include <string>

#include "crypt/rng.hpp"

namespace cryptsim {

enum class LawKind {
  exp1,                 // standard exponential
  rayleigh,             // cdf 1 - exp(-t^2/2)
  hypoexp,              // Exp(1) + Exp(1/A) convolution, A in (0, 1]
  null_boundary_tau,    // piecewise hazard A^2 t^2/2 (t <= 1/2), A^2 t/2 - A^2/8
  null_boundary_sigma,  // location law on [1/2, 1] paired with the above
  uniform_interval,     // uniform on (a, b]
  point_mass,           // degenerate at a
  bernoulli_mix,        // atom at 0 with mass 1/(1+A), else uniform on (0, 1]
};

struct LimitLaw {
  LawKind kind = LawKind::exp1;
  double a = 0;  // A for hypoexp/null_boundary_*/bernoulli_mix; left end / atom
  double b = 0;  // right end for uniform_interval

  static LimitLaw exponential1() { return {LawKind::exp1, 0, 0}; }
  static LimitLaw rayleigh() { return {LawKind::rayleigh, 0, 0}; }
  static LimitLaw hypoexp(double A) { return {LawKind::hypoexp, A, 0}; }
  static LimitLaw null_boundary_tau(double A) {
    return {LawKind::null_boundary_tau, A, 0};
  }
  static LimitLaw null_boundary_sigma(double A) {
    return {LawKind::null_boundary_sigma, A, 0};
  }
  static LimitLaw uniform_interval(double a, double b) {
    return {LawKind::uniform_interval, a, b};
  }
  static LimitLaw point_mass(double a) { return {LawKind::point_mass, a, 0}; }
  static LimitLaw bernoulli_mix(double A) {
    return {LawKind::bernoulli_mix, A, 0};
  }
};

double limit_cdf(const LimitLaw& law, double t);

/// Left limit of the cdf at t; differs from limit_cdf only at atoms.
double limit_cdf_left(const LimitLaw& law, double t);

/// Density of the absolutely continuous part (0 at atoms).
double limit_pdf(const LimitLaw& law, double t);

double sample_limit(const LimitLaw& law, RngStream& stream);

bool law_has_atoms(const LimitLaw& law);

std::string law_name(const LimitLaw& law);

/// Integral of exp(-c t^2 / 2) over [a, b] by adaptive Simpson quadrature
/// to 1e-10 absolute accuracy. Used by the null-boundary location law; kept
/// public so tests can compare it with the erf closed form.
double gaussian_exposure_integral(double c, double a, double b);

}  // namespace cryptsim
