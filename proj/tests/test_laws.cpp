#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "crypt/laws.hpp"
#include "crypt/rng.hpp"
#include "crypt/stats.hpp"

using namespace cryptsim;

namespace {

// High-precision reference values computed with mpmath (50 digits), frozen.
constexpr double kExpCdf1 = 0.63212055882855768;
constexpr double kRayCdf1 = 0.39346934028736658;
constexpr double kRayCdf2 = 0.86466471676338731;
constexpr double kRayPdf1 = 0.60653065971263342;
constexpr double kHypo1Cdf1 = 0.26424111765711536;
constexpr double kHypo1Cdf2 = 0.59399415029016192;
constexpr double kHypo1Pdf1 = 0.36787944117144233;
constexpr double kHypoHalfCdf1 = 0.39957640089372805;
constexpr double kHypoHalfPdf1 = 0.46508831586965926;
constexpr double kHypoHalfCdfQ = 0.048929093569823687;   // t = 0.25
constexpr double kHypoHalfPdfQ = 0.34454024671754289;    // t = 0.25
constexpr double kNbt2CdfQ = 0.11750309741540460;        // t = 0.25
constexpr double kNbt2CdfH = 0.39346934028736658;        // t = 0.5
constexpr double kNbt2Cdf1 = 0.77686983985157017;
constexpr double kNbt2PdfQ = 0.88249690258459540;        // t = 0.25
constexpr double kNbt2PdfT = 0.73575888234288464;        // t = 0.75
constexpr double kNbs3PdfH = 0.64930493471669946;        // x = 0.5
constexpr double kNbs3PdfT = 1.8511340635861111;         // x = 0.75
constexpr double kNbs3Pdf1 = 3.9068648877147492;         // x = 1.0
constexpr double kNbs3Cdf06 = 0.081858998936433709;
constexpr double kNbs3Cdf075 = 0.29205608609247955;
constexpr double kNbs3Cdf09 = 0.65397902448985954;
constexpr double kNbs15Cdf08 = 0.53715659005286771;      // A = 1.5

double erf_integral(double c, double a, double b) {
  // Closed form of the same integral for cross-checking the quadrature.
  const double s = std::sqrt(0.5 * c);
  return std::sqrt(2.0 * std::acos(-1.0) / c) * 0.5 *
         (std::erf(b * s) - std::erf(a * s));
}

}  // namespace

TEST_CASE("closed-form cdfs and pdfs match frozen references") {
  const LimitLaw e = LimitLaw::exponential1();
  CHECK(limit_cdf(e, 1.0) == doctest::Approx(kExpCdf1).epsilon(1e-15));
  CHECK(limit_cdf(e, 0.0) == 0.0);
  CHECK(limit_pdf(e, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  const LimitLaw r = LimitLaw::rayleigh();
  CHECK(limit_cdf(r, 1.0) == doctest::Approx(kRayCdf1).epsilon(1e-15));
  CHECK(limit_cdf(r, 2.0) == doctest::Approx(kRayCdf2).epsilon(1e-15));
  CHECK(limit_pdf(r, 1.0) == doctest::Approx(kRayPdf1).epsilon(1e-15));

  const LimitLaw h1 = LimitLaw::hypoexp(1.0);
  CHECK(limit_cdf(h1, 1.0) == doctest::Approx(kHypo1Cdf1).epsilon(1e-15));
  CHECK(limit_cdf(h1, 2.0) == doctest::Approx(kHypo1Cdf2).epsilon(1e-15));
  CHECK(limit_pdf(h1, 1.0) == doctest::Approx(kHypo1Pdf1).epsilon(1e-15));

  const LimitLaw hh = LimitLaw::hypoexp(0.5);
  CHECK(limit_cdf(hh, 1.0) == doctest::Approx(kHypoHalfCdf1).epsilon(1e-14));
  CHECK(limit_pdf(hh, 1.0) == doctest::Approx(kHypoHalfPdf1).epsilon(1e-14));
  CHECK(limit_cdf(hh, 0.25) == doctest::Approx(kHypoHalfCdfQ).epsilon(1e-14));
  CHECK(limit_pdf(hh, 0.25) == doctest::Approx(kHypoHalfPdfQ).epsilon(1e-14));

  const LimitLaw bt = LimitLaw::null_boundary_tau(2.0);
  CHECK(limit_cdf(bt, 0.25) == doctest::Approx(kNbt2CdfQ).epsilon(1e-15));
  CHECK(limit_cdf(bt, 0.5) == doctest::Approx(kNbt2CdfH).epsilon(1e-15));
  CHECK(limit_cdf(bt, 1.0) == doctest::Approx(kNbt2Cdf1).epsilon(1e-15));
  CHECK(limit_pdf(bt, 0.25) == doctest::Approx(kNbt2PdfQ).epsilon(1e-15));
  CHECK(limit_pdf(bt, 0.75) == doctest::Approx(kNbt2PdfT).epsilon(1e-15));

  const LimitLaw bs = LimitLaw::null_boundary_sigma(3.0);
  CHECK(limit_pdf(bs, 0.5) == doctest::Approx(kNbs3PdfH).epsilon(1e-9));
  CHECK(limit_pdf(bs, 0.75) == doctest::Approx(kNbs3PdfT).epsilon(1e-9));
  CHECK(limit_pdf(bs, 1.0) == doctest::Approx(kNbs3Pdf1).epsilon(1e-9));
  CHECK(limit_cdf(bs, 0.6) == doctest::Approx(kNbs3Cdf06).epsilon(1e-9));
  CHECK(limit_cdf(bs, 0.75) == doctest::Approx(kNbs3Cdf075).epsilon(1e-9));
  CHECK(limit_cdf(bs, 0.9) == doctest::Approx(kNbs3Cdf09).epsilon(1e-9));
  const LimitLaw bs15 = LimitLaw::null_boundary_sigma(1.5);
  CHECK(limit_cdf(bs15, 0.8) == doctest::Approx(kNbs15Cdf08).epsilon(1e-9));
}

TEST_CASE("interval, point-mass and mixture laws have the stated shapes") {
  const LimitLaw u = LimitLaw::uniform_interval(0.25, 1.0);
  CHECK(limit_cdf(u, 0.25) == 0.0);
  CHECK(limit_cdf(u, 0.625) == doctest::Approx(0.5));
  CHECK(limit_cdf(u, 1.0) == 1.0);
  CHECK(limit_cdf(u, 2.0) == 1.0);
  CHECK(limit_pdf(u, 0.5) == doctest::Approx(4.0 / 3.0));
  CHECK(limit_pdf(u, 0.2) == 0.0);
  CHECK_FALSE(law_has_atoms(u));
  CHECK_THROWS_AS(limit_cdf(LimitLaw::uniform_interval(1.0, 1.0), 0.5),
                  std::invalid_argument);

  const LimitLaw p = LimitLaw::point_mass(0.0);
  CHECK(limit_cdf(p, 0.0) == 1.0);
  CHECK(limit_cdf_left(p, 0.0) == 0.0);
  CHECK(limit_cdf(p, -0.1) == 0.0);
  CHECK(limit_pdf(p, 0.0) == 0.0);
  CHECK(law_has_atoms(p));

  const LimitLaw b = LimitLaw::bernoulli_mix(2.0);
  CHECK(limit_cdf(b, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(limit_cdf_left(b, 0.0) == 0.0);
  CHECK(limit_cdf(b, -0.5) == 0.0);
  CHECK(limit_cdf(b, 0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(limit_cdf(b, 1.0) == 1.0);
  CHECK(limit_cdf(b, 3.0) == 1.0);
  CHECK(limit_pdf(b, 0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(law_has_atoms(b));
  CHECK_THROWS_AS(limit_cdf(LimitLaw::bernoulli_mix(0.0), 0.5),
                  std::invalid_argument);
}

TEST_CASE("every cdf is monotone with its left limit below it") {
  const LimitLaw laws[] = {
      LimitLaw::exponential1(),          LimitLaw::rayleigh(),
      LimitLaw::hypoexp(1.0),            LimitLaw::hypoexp(0.37),
      LimitLaw::null_boundary_tau(2.0),  LimitLaw::null_boundary_tau(0.8),
      LimitLaw::null_boundary_sigma(3.0), LimitLaw::uniform_interval(0.25, 1),
      LimitLaw::point_mass(0.3),         LimitLaw::bernoulli_mix(2.0),
  };
  for (const LimitLaw& law : laws) {
    double prev = -1;
    for (int k = -8; k <= 60; ++k) {
      const double t = 0.05 * k;
      const double left = limit_cdf_left(law, t);
      const double cdf = limit_cdf(law, t);
      CHECK(left <= cdf + 1e-15);
      CHECK(cdf + 1e-12 >= prev);
      CHECK(cdf >= 0.0);
      CHECK(cdf <= 1.0);
      prev = cdf;
    }
  }
}

TEST_CASE("the boundary waiting-time law is continuous across the kink") {
  for (double A : {0.5, 1.0, 2.0, 3.7}) {
    const LimitLaw law = LimitLaw::null_boundary_tau(A);
    const double below = limit_cdf(law, 0.5 - 1e-13);
    const double above = limit_cdf(law, 0.5 + 1e-13);
    CHECK(std::fabs(above - below) < 1e-12);
    const double pdf_below = limit_pdf(law, 0.5 - 1e-13);
    const double pdf_above = limit_pdf(law, 0.5 + 1e-13);
    CHECK(std::fabs(pdf_above - pdf_below) < 1e-11);
  }
}

TEST_CASE("the boundary location density integrates to its cdf") {
  const LimitLaw law = LimitLaw::null_boundary_sigma(3.0);
  // Composite Simpson over [1/2, x] with fine panels; the pdf itself is
  // accurate to ~1e-10, so 1e-8 absolute agreement is a real consistency
  // statement between the two closed forms.
  const auto integral_to = [&](double x) {
    const int panels = 1 << 11;
    const double h = (x - 0.5) / panels;
    double acc = limit_pdf(law, 0.5) + limit_pdf(law, x);
    for (int k = 1; k < panels; ++k) {
      acc += (k % 2 ? 4.0 : 2.0) * limit_pdf(law, 0.5 + k * h);
    }
    return acc * h / 3.0;
  };
  for (double x : {0.6, 0.75, 0.9}) {
    CHECK(integral_to(x) == doctest::Approx(limit_cdf(law, x)).epsilon(1e-8));
  }
  CHECK(integral_to(1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(limit_cdf(law, 0.5) == 0.0);
  CHECK(limit_cdf(law, 1.0) == 1.0);
}

TEST_CASE("quadrature agrees with the erf closed form") {
  for (double c : {0.25, 1.0, 4.0, 9.0}) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, {0.3, 0.7}, {0.5, 3.0}}) {
      CHECK(gaussian_exposure_integral(c, a, b) ==
            doctest::Approx(erf_integral(c, a, b)).epsilon(1e-9));
    }
  }
  CHECK(gaussian_exposure_integral(2.0, 0.5, 0.5) == 0.0);
  CHECK(gaussian_exposure_integral(0.0, 0.2, 0.9) == doctest::Approx(0.7));
}

TEST_CASE("samplers land in their supports") {
  RngStream s({2026, 814}, 0, 0);
  const LimitLaw u = LimitLaw::uniform_interval(0.25, 1.0);
  const LimitLaw b = LimitLaw::bernoulli_mix(2.0);
  const LimitLaw bs = LimitLaw::null_boundary_sigma(1.5);
  for (int i = 0; i < 2000; ++i) {
    const double x = sample_limit(u, s);
    CHECK(x > 0.25);
    CHECK(x <= 1.0);
    const double y = sample_limit(b, s);
    CHECK(y >= 0.0);
    CHECK(y <= 1.0);
    const double z = sample_limit(bs, s);
    CHECK(z >= 0.5);
    CHECK(z <= 1.0);
    CHECK(sample_limit(LimitLaw::point_mass(0.3), s) == 0.3);
  }
}

TEST_CASE("samplers agree with their cdfs under a KS test") {
  const LimitLaw laws[] = {
      LimitLaw::exponential1(),           LimitLaw::rayleigh(),
      LimitLaw::hypoexp(1.0),             LimitLaw::hypoexp(0.5),
      LimitLaw::null_boundary_tau(2.0),   LimitLaw::null_boundary_tau(0.8),
      LimitLaw::null_boundary_sigma(3.0), LimitLaw::null_boundary_sigma(1.5),
      LimitLaw::uniform_interval(0.25, 1), LimitLaw::point_mass(0.3),
      LimitLaw::bernoulli_mix(2.0),
  };
  std::uint64_t substream = 0;
  RngStream root({0x6c696d69, 0x746c6177}, 0, 0);
  for (const LimitLaw& law : laws) {
    CAPTURE(law_name(law));
    RngStream s = root.substream(substream++);
    std::vector<double> sample(10000);
    for (double& x : sample) x = sample_limit(law, s);
    const KsResult ks = ks_one_sample(std::move(sample), law);
    CHECK_FALSE(ks.reject_1pct);
    if (law.kind == LawKind::point_mass) CHECK(ks.d == 0.0);
  }
}

TEST_CASE("law names are printable and specific") {
  CHECK(law_name(LimitLaw::exponential1()) == "Exp(1)");
  CHECK(law_name(LimitLaw::rayleigh()) == "Rayleigh");
  CHECK(law_name(LimitLaw::hypoexp(0.5)).find("Exp(1)+Exp(1/") == 0);
  CHECK(law_name(LimitLaw::bernoulli_mix(2.0)).find("BernoulliMix") == 0);
  CHECK(law_name(LimitLaw::uniform_interval(0, 1)).find("]") !=
        std::string::npos);
  CHECK(law_name(LimitLaw::null_boundary_tau(1.0)).find("NullBoundaryTau") ==
        0);
}
