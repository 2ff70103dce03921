#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "crypt/fast.hpp"
#include "crypt/harness.hpp"
#include "crypt/rng.hpp"

using namespace cryptsim;

TEST_CASE("delta_after measures time to the next division") {
  CHECK(delta_after(0.0) == 1.0);
  CHECK(delta_after(0.25) == 0.75);
  CHECK(delta_after(3.0) == 1.0);
  CHECK(delta_after(2.5) == 0.5);
}

TEST_CASE("clone exposure follows the doubling schedule") {
  // One cell for delta, then 2 cells for a unit, then swept (l=3, i=2).
  CHECK(clone_exposure(3, 2, 0.5, 0.25) == doctest::Approx(0.25));
  CHECK(clone_exposure(3, 2, 0.5, 0.5) == doctest::Approx(0.5));
  CHECK(clone_exposure(3, 2, 0.5, 1.0) == doctest::Approx(0.5 + 2 * 0.5));
  CHECK(clone_exposure(3, 2, 0.5, 1.5) == doctest::Approx(2.5));
  CHECK(clone_exposure(3, 2, 0.5, 100.0) == doctest::Approx(2.5));
  CHECK(clone_exposure_total(3, 2, 0.5) == doctest::Approx(2.5));
  CHECK(clone_exposure_total(4, 1, 0.25) == doctest::Approx(14.25));
  CHECK(clone_exposure(5, 3, 1.0, -2.0) == 0.0);

  // Continuity across division instants.
  for (int m = 1; m <= 3; ++m) {
    const double at = 0.6 + (m - 1);
    CHECK(clone_exposure(6, 2, 0.6, at - 1e-9) ==
          doctest::Approx(clone_exposure(6, 2, 0.6, at + 1e-9)).epsilon(1e-6));
  }
  CHECK_THROWS_AS(clone_exposure(3, 0, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(clone_exposure(3, 2, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(clone_exposure(3, 2, 1.5, 1.0), std::invalid_argument);
}

TEST_CASE("clone exposure inverts exactly") {
  for (int l : {3, 6, 12}) {
    for (int i : {1, 2, l}) {
      for (double delta : {0.2, 0.7, 1.0}) {
        const double total = clone_exposure_total(l, i, delta);
        for (double f : {1e-6, 0.1, 0.4, 0.9, 0.999, 1.0}) {
          const double target = f * total;
          const double s = invert_clone_exposure(l, i, delta, target);
          CHECK(clone_exposure(l, i, delta, s) ==
                doctest::Approx(target).epsilon(1e-12));
        }
      }
    }
  }
  CHECK_THROWS_AS(invert_clone_exposure(3, 2, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(invert_clone_exposure(3, 2, 0.5, 2.6), std::invalid_argument);
}

TEST_CASE("clone generation advances with divisions and clamps at the bottom") {
  CHECK(clone_generation(3, 2, 0.5, 0.3) == 2);
  CHECK(clone_generation(3, 2, 0.5, 0.6) == 3);
  CHECK(clone_generation(3, 2, 0.5, 5.0) == 3);
  CHECK(clone_generation(8, 3, 1.0, 2.5) == 5);
}

TEST_CASE("stem lineage exposure counts the renewing front") {
  // delta = 1: no front for a unit, one cell in [1,2), three in [2,3)...
  CHECK(stem_lineage_exposure(3, 1.0, 0.5) == 0.0);
  CHECK(stem_lineage_exposure(3, 1.0, 1.0) == 0.0);
  CHECK(stem_lineage_exposure(3, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(stem_lineage_exposure(3, 1.0, 2.5) == doctest::Approx(2.5));
  // Full front of 2^l - 1 cells from delta + l onward.
  const double full = std::exp2(4) - 2 - 3;  // l = 3
  CHECK(stem_lineage_exposure(3, 1.0, 4.0) == doctest::Approx(full));
  CHECK(stem_lineage_exposure(3, 1.0, 6.0) == doctest::Approx(full + 2 * 7));
  CHECK(stem_front_generations(3, 1.0, 0.5) == 0);
  CHECK(stem_front_generations(3, 1.0, 1.0) == 1);
  CHECK(stem_front_generations(3, 1.0, 3.5) == 3);
  CHECK(stem_front_generations(3, 1.0, 10.0) == 3);
}

TEST_CASE("stem exposure inverts exactly, including past the full front") {
  for (int l : {2, 5, 10}) {
    for (double delta : {0.3, 1.0}) {
      const double full = std::exp2(l + 1) - 2 - l;
      for (double target : {1e-8, 0.5, 2.0, 0.7 * full, full, 3.0 * full}) {
        const double s = invert_stem_exposure(l, delta, target);
        CHECK(stem_lineage_exposure(l, delta, s) ==
              doctest::Approx(target).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(invert_stem_exposure(3, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("generation sampling is proportional to generation size") {
  CHECK(sample_type1_generation(2, 0.0) == 1);
  CHECK(sample_type1_generation(2, 0.32) == 1);
  CHECK(sample_type1_generation(2, 0.34) == 2);
  CHECK(sample_type1_generation(2, 0.99) == 2);
  CHECK(sample_front_generation(2, 0.2) == 1);
  CHECK_THROWS_AS(sample_type1_generation(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sample_type1_generation(2, -0.1), std::invalid_argument);

  const int l = 10;
  const int n = 1000000;
  RngStream s({0x67656e73, 1}, 0, 0);
  std::vector<int> counts(static_cast<std::size_t>(l) + 1, 0);
  for (int k = 0; k < n; ++k) ++counts[static_cast<std::size_t>(
      sample_type1_generation(l, s.uniform()))];
  const double cells = std::exp2(l) - 1.0;
  for (int i = 1; i <= l; ++i) {
    const double p = std::exp2(i - 1) / cells;
    const double freq = static_cast<double>(counts[static_cast<std::size_t>(i)]) / n;
    const double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::fabs(freq - p) <= 4.5 * se);
  }
}

TEST_CASE("the arrival stopping rule never changes an outcome") {
  const CryptConfig cfg{6, 1e-3, 1e-3, 0.02, 0.02, 1e6};
  for (std::uint64_t k = 0; k < 200; ++k) {
    RngStream a({0x73746f70, k}, 0, 0);
    RngStream b({0x73746f70, k}, 0, 0);
    const SimOutcome plain = simulate_fast(cfg, Variant::H2, a);
    const SimOutcome full = simulate_fast(cfg, Variant::H2, b,
                                          FastOptions{/*disable_stopping=*/true});
    CHECK(plain.tau == full.tau);
    CHECK(plain.sigma_gen == full.sigma_gen);
    CHECK(plain.rho_gen == full.rho_gen);
    CHECK(plain.path == full.path);
    CHECK(plain.status == full.status);
    CHECK(plain.stem_type1_time == full.stem_type1_time);
  }
}

TEST_CASE("stem-only outcomes replay the stem draws verbatim") {
  const CryptConfig cfg{5, 0.01, 0.02, 0.0, 0.0, 1e6};
  for (std::uint64_t k = 0; k < 50; ++k) {
    RngStream parent({0x6d33, k}, 0, 0);
    RngStream predict = parent.substream(0);
    const double t1 = predict.exponential(cfg.u1);
    const double tau = t1 + predict.exponential(cfg.u2);
    const SimOutcome o = simulate_fast(cfg, Variant::M3, parent);
    REQUIRE(o.type2());
    CHECK(o.tau == tau);
    CHECK(o.sigma_gen == 0);
    CHECK(o.rho_gen == 0);
    CHECK(o.path == Path::ss);
    REQUIRE(o.stem_type1_time.has_value());
    CHECK(*o.stem_type1_time == t1);
  }
}

TEST_CASE("stem-front outcomes replay the front draws verbatim") {
  // Stem type-1 plus daughter type-2 only: the single candidate is the first
  // mark on the stem's front, reconstructed here draw by draw.
  const CryptConfig cfg{6, 0.01, 0.0, 0.0, 0.05, 1e6};
  for (std::uint64_t k = 0; k < 50; ++k) {
    RngStream parent({0x6d32, k}, 0, 0);
    RngStream predict = parent.substream(0);
    const double t1 = predict.exponential(cfg.u1);
    const double delta = delta_after(t1);
    const double target = predict.exp1() / cfg.v2;
    const double offset = invert_stem_exposure(cfg.l, delta, target);
    const int m = stem_front_generations(cfg.l, delta, offset);
    const int gen = sample_front_generation(m, predict.uniform());
    const SimOutcome o = simulate_fast(cfg, Variant::M2, parent);
    REQUIRE(o.type2());
    CHECK(o.tau == t1 + offset);
    CHECK(o.sigma_gen == 0);
    CHECK(o.rho_gen == gen);
    CHECK(o.path == Path::sd);
  }
}

TEST_CASE("accepted daughter candidates never sit inside the stem front") {
  const CryptConfig cfg{5, 0.2, 0.2, 0.05, 0.05, 1e6};
  int dd_seen = 0;
  for (std::uint64_t k = 0; k < 300; ++k) {
    RngStream parent({0x73757070, k}, 0, 0);
    const SimOutcome o = simulate_fast(cfg, Variant::H2, parent);
    if (!o.type2() || o.path != Path::dd) continue;
    ++dd_seen;
    REQUIRE(o.cancer_type1_time.has_value());
    const double t = *o.cancer_type1_time;
    if (!o.stem_type1_time || t <= *o.stem_type1_time) continue;
    const double since = t - *o.stem_type1_time;
    const int front =
        stem_front_generations(cfg.l, delta_after(*o.stem_type1_time), since);
    CHECK(o.sigma_gen > front);
  }
  CHECK(dd_seen > 10);  // the property must actually get exercised
}

TEST_CASE("the event-driven engine refuses the per-cell-only variant") {
  const CryptConfig cfg{4, 1e-3, 1e-3, 1e-2, 1e-2, 1e6};
  RngStream s({1, 2}, 0, 0);
  CHECK_THROWS_AS(simulate_fast(cfg, Variant::H1, s), ConfigError);
}

TEST_CASE("mark generations on a full front follow generation sizes") {
  // Early stem mutation and a tiny type-2 rate: the first mark lands long
  // after the front is complete, so its generation is cell-uniform.
  const CryptConfig cfg{5, 0.5, 0.0, 0.0, 1e-5, 1e6};
  const EnsembleResult runs =
      run_ensemble(cfg, Variant::M2, EngineKind::fast, 20000, 0xC4156, 1);
  REQUIRE(runs.timeout_count == 0);
  std::vector<double> counts(6, 0.0);
  for (const SimOutcome& o : runs.outcomes) {
    REQUIRE(o.rho_gen >= 1);
    REQUIRE(o.rho_gen <= 5);
    counts[static_cast<std::size_t>(o.rho_gen)] += 1.0;
  }
  const double n = 20000.0;
  double chi2 = 0;
  for (int g = 1; g <= 5; ++g) {
    const double expect = n * std::exp2(g - 1) / 31.0;
    const double diff = counts[static_cast<std::size_t>(g)] - expect;
    chi2 += diff * diff / expect;
  }
  CHECK(chi2 < 13.2767);  // chi-square df=4 at the 1% level

  // Deeper crypt, same statement across nine degrees of freedom.
  const CryptConfig deep{10, 0.5, 0.0, 0.0, 1e-6, 1e6};
  const EnsembleResult druns =
      run_ensemble(deep, Variant::M2, EngineKind::fast, 20000, 0xC4157, 1);
  REQUIRE(druns.timeout_count == 0);
  std::vector<double> dcounts(11, 0.0);
  for (const SimOutcome& o : druns.outcomes) {
    dcounts[static_cast<std::size_t>(o.rho_gen)] += 1.0;
  }
  double dchi2 = 0;
  for (int g = 1; g <= 10; ++g) {
    const double expect = n * std::exp2(g - 1) / 1023.0;
    const double diff = dcounts[static_cast<std::size_t>(g)] - expect;
    dchi2 += diff * diff / expect;
  }
  CHECK(dchi2 < 21.666);  // chi-square df=9 at the 1% level
}
