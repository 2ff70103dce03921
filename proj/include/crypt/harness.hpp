#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "crypt/asymptotics.hpp"
#include "crypt/core.hpp"

namespace cryptsim {

enum class EngineKind { exact, fast, coupled };

const char* to_string(EngineKind e);
EngineKind parse_engine(const std::string& s);

/// Outcomes of `replicates` independent runs. Replicate i always uses the
/// stream derived from (seed, i), and outcomes are stored by replicate
/// index, so the result is identical for any thread count. The tau, sigma
/// and rho vectors collect completed runs only, in replicate order.
struct EnsembleResult {
  CryptConfig config;
  Variant variant = Variant::H2;
  EngineKind engine = EngineKind::fast;
  std::uint64_t seed = 0;
  std::size_t replicates = 0;
  std::vector<SimOutcome> outcomes;
  std::vector<double> tau;
  std::vector<double> sigma;
  std::vector<double> rho;
  std::size_t timeout_count = 0;
  std::array<std::size_t, 3> path_counts{};  // indexed by Path

  double completed() const { return static_cast<double>(tau.size()); }
};

EnsembleResult run_ensemble(const CryptConfig& config, Variant variant,
                            EngineKind engine, std::size_t replicates,
                            std::uint64_t seed, int threads = 1);

struct VerifyOptions {
  /// A distributional check passes when the KS distance to the limit law is
  /// at most limit_d_max, or when the distance is statistically
  /// insignificant at alpha_level (so small ensembles are not failed on
  /// noise).
  double limit_d_max = 0.1;
  double alpha_level = 0.01;
  /// Window around a predicted constant for sample medians.
  double median_window = 0.1;
  /// Tolerance on predicted point-mass and path frequencies.
  double atom_tol = 0.05;
  double timeout_max_fraction = 0.01;
  double dominant_path_min = 0.9;
  int threads = 1;
};

struct CheckReport {
  std::string name;
  bool pass = false;
  double statistic = 0;
  double threshold = 0;
  std::string detail;
};

/// Outcome of checking one simulated ensemble against the classified
/// regime's limit laws. For boundary or bounds-only regimes nothing is
/// checkable and classification_only is set instead.
struct VerificationReport {
  Regime regime;
  double scale = 1;  // factor applied to tau before the KS comparison
  std::size_t replicates = 0;
  std::size_t completed = 0;
  CheckReport tau_check;
  CheckReport sigma_check;
  CheckReport rho_check;
  CheckReport path_check;
  CheckReport timeout_check;
  bool classification_only = false;
  bool verified = false;
};

VerificationReport verify_regime(const CryptConfig& config,
                                 const Regime& regime, Variant variant,
                                 EngineKind engine, std::size_t replicates,
                                 std::uint64_t seed,
                                 const VerifyOptions& options = {});

}  // namespace cryptsim
