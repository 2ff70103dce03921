#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace cryptsim {

inline constexpr double kDefaultMaxTime = 1e6;

/// Maximum crypt depth accepted anywhere. 2^40 cells is far beyond any
/// engine's reach but keeps every integer quantity exactly representable.
inline constexpr int kMaxDepth = 40;

enum class Variant { H1, H2, M1, M2, M3 };

enum class Path { ss, sd, dd };

enum class OutcomeStatus { type2_occurred, timed_out };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Crypt parameters. The crypt holds 2^l cells: one stem cell plus
/// generations 1..l of daughter cells. u1/u2 are the stem type-1/type-2
/// mutation rates, v1/v2 the per-daughter-cell rates.
struct CryptConfig {
  int l = 0;
  double u1 = 0;
  double u2 = 0;
  double v1 = 0;
  double v2 = 0;
  double max_time = kDefaultMaxTime;
};

/// 2^l, the total number of cells.
std::int64_t crypt_size(int l);

/// Number of cells in generation k: 1 for the stem (k = 0), 2^{k-1} for
/// daughter generations 1..l.
std::int64_t generation_size(int l, int k);

/// Number of descendants a generation-i daughter cell accrues before its
/// line is swept: 2^{l-i+1} - 2.
std::int64_t total_descendants(int l, int i);

/// Checks ranges and the rate orderings u1 <= u2, v1 <= v2 (a zero rate is
/// exempt, so sub-model configurations with masked rates stay valid). The
/// orderings are enforced on the rates the variant actually uses. Returns
/// the config unchanged; throws ConfigError otherwise.
CryptConfig validate_config(const CryptConfig& config, Variant variant);

/// Config with the rates a sub-model ignores forced to zero:
/// M1 drops the stem (u1 = u2 = 0), M2 keeps stem type-1 and daughter
/// type-2 (u2 = v1 = 0), M3 keeps only the stem (v1 = v2 = 0).
CryptConfig effective_config(const CryptConfig& config, Variant variant);

/// Result of one simulated crypt. Generations are counted from the stem
/// (0 = stem, k in 1..l = daughter generation); -1 means "no mutation", as
/// for timed-out runs. sigma refers to the cancer-causing type-1 mutation,
/// rho to the type-2 mutation itself.
struct SimOutcome {
  double tau = 0;
  int sigma_gen = -1;
  int rho_gen = -1;
  int l = 0;
  Path path = Path::dd;
  std::optional<double> stem_type1_time;
  std::optional<double> cancer_type1_time;
  OutcomeStatus status = OutcomeStatus::timed_out;

  bool type2() const { return status == OutcomeStatus::type2_occurred; }
  /// Relative locations sigma_gen/l and rho_gen/l; NaN when absent.
  double sigma() const;
  double rho() const;
};

const char* to_string(Variant v);
const char* to_string(Path p);
const char* to_string(OutcomeStatus s);
Variant parse_variant(const std::string& s);

}  // namespace cryptsim
