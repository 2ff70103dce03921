#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "crypt/asymptotics.hpp"
#include "crypt/core.hpp"
#include "crypt/harness.hpp"

namespace cryptsim {

/// Command-line or config-file misuse; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by parse_invocation when the user asked for --help; carries the
/// help text and maps to exit code 0.
struct HelpRequested {
  std::string text;
};

/// A parsed config file: the numeric crypt parameters plus optional rate
/// laws used for regime classification and tau scaling.
struct FileConfig {
  CryptConfig config;
  RateLaws laws;
};

/// Config files are flat `key = value` lines with `#` comments. Keys:
/// l, u1, u2, v1, v2, max_time, and the optional laws u1_law, u2_law,
/// v1_law, v2_law (or mu_law for the null model), each given as up to
/// three numbers "c p q" meaning c * 2^(p*l) * l^q. Unknown keys are
/// rejected; mu_law requires u1 == u2 == v1 == v2.
FileConfig parse_config_text(const std::string& text);
FileConfig parse_config_file(const std::string& path);
std::string emit_config_text(const FileConfig& fc);

/// Classify from the laws in `fc`; throws ConfigError when no complete set
/// of laws is present.
Regime classify_file_config(const FileConfig& fc);

struct Invocation {
  std::string command;  // simulate | classify | verify | oracle-check
  std::string config_path;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::string engine = "fast";
  std::string variant = "h2";
  std::string out_path;  // empty writes to the provided stream
  int threads = 1;
  double max_time = -1;  // negative keeps the config file's value
  bool wide = false;
  bool emit_config = false;
};

/// Parses argv (without the program name); throws UsageError on bad flags.
Invocation parse_invocation(const std::vector<std::string>& args);

/// Executes a parsed invocation. Returns the process exit code: 0 success,
/// 1 failed verification or rejected oracle check, 2 usage/config errors.
int run_command(const Invocation& invocation, std::ostream& out,
                std::ostream& err);

/// CSV emission for an ensemble, one row per replicate. `scale` is the
/// regime scaling applied to the tau_scaled column.
void write_csv(std::ostream& os, const EnsembleResult& runs, double scale,
               bool wide);

}  // namespace cryptsim
