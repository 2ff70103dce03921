#include "crypt/core.hpp"

#include <cmath>
#include <limits>

namespace cryptsim {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void check_rate(double r, const char* name) {
  require(std::isfinite(r) && r >= 0,
          std::string("negative-rate: ") + name + " must be finite and >= 0");
}

}  // namespace

std::int64_t crypt_size(int l) {
  require(l >= 1 && l <= kMaxDepth, "nonpositive-l: l must be in 1..40");
  return std::int64_t{1} << l;
}

std::int64_t generation_size(int l, int k) {
  crypt_size(l);
  require(k >= 0 && k <= l, "generation index out of range");
  return k == 0 ? 1 : std::int64_t{1} << (k - 1);
}

std::int64_t total_descendants(int l, int i) {
  crypt_size(l);
  require(i >= 1 && i <= l, "generation index out of range");
  return (std::int64_t{1} << (l - i + 1)) - 2;
}

CryptConfig validate_config(const CryptConfig& config, Variant variant) {
  require(config.l >= 1, "nonpositive-l: l must be >= 1");
  require(config.l <= kMaxDepth, "nonpositive-l: l must be <= 40");
  check_rate(config.u1, "u1");
  check_rate(config.u2, "u2");
  check_rate(config.v1, "v1");
  check_rate(config.v2, "v2");
  require(std::isfinite(config.max_time) && config.max_time > 0,
          "max_time must be finite and > 0");
  const CryptConfig eff = effective_config(config, variant);
  if (eff.u1 > 0 && eff.u2 > 0) {
    require(eff.u1 <= eff.u2, "ordering-violation: u1 must not exceed u2");
  }
  if (eff.v1 > 0 && eff.v2 > 0) {
    require(eff.v1 <= eff.v2, "ordering-violation: v1 must not exceed v2");
  }
  return config;
}

CryptConfig effective_config(const CryptConfig& config, Variant variant) {
  CryptConfig eff = config;
  switch (variant) {
    case Variant::H1:
    case Variant::H2:
      break;
    case Variant::M1:
      eff.u1 = 0;
      eff.u2 = 0;
      break;
    case Variant::M2:
      eff.u2 = 0;
      eff.v1 = 0;
      break;
    case Variant::M3:
      eff.v1 = 0;
      eff.v2 = 0;
      break;
  }
  return eff;
}

double SimOutcome::sigma() const {
  if (sigma_gen < 0 || l <= 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(sigma_gen) / l;
}

double SimOutcome::rho() const {
  if (rho_gen < 0 || l <= 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(rho_gen) / l;
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::H1: return "h1";
    case Variant::H2: return "h2";
    case Variant::M1: return "m1";
    case Variant::M2: return "m2";
    case Variant::M3: return "m3";
  }
  return "?";
}

const char* to_string(Path p) {
  switch (p) {
    case Path::ss: return "ss";
    case Path::sd: return "sd";
    case Path::dd: return "dd";
  }
  return "?";
}

const char* to_string(OutcomeStatus s) {
  return s == OutcomeStatus::type2_occurred ? "type2-occurred" : "timed-out";
}

Variant parse_variant(const std::string& s) {
  if (s == "h1") return Variant::H1;
  if (s == "h2") return Variant::H2;
  if (s == "m1") return Variant::M1;
  if (s == "m2") return Variant::M2;
  if (s == "m3") return Variant::M3;
  throw ConfigError("unknown variant: " + s);
}

}  // namespace cryptsim
