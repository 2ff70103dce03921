#include "crypt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "crypt/exact.hpp"
#include "crypt/fast.hpp"
#include "crypt/stats.hpp"

namespace cryptsim {

const char* to_string(EngineKind e) {
  switch (e) {
    case EngineKind::exact: return "exact";
    case EngineKind::fast: return "fast";
    case EngineKind::coupled: return "coupled";
  }
  return "?";
}

EngineKind parse_engine(const std::string& s) {
  if (s == "exact") return EngineKind::exact;
  if (s == "fast") return EngineKind::fast;
  if (s == "coupled") return EngineKind::coupled;
  throw ConfigError("unknown engine '" + s + "' (exact, fast, coupled)");
}

EnsembleResult run_ensemble(const CryptConfig& config, Variant variant,
                            EngineKind engine, std::size_t replicates,
                            std::uint64_t seed, int threads) {
  validate_config(config, variant);
  if (variant == Variant::H1 && engine != EngineKind::exact) {
    throw ConfigError("h1 requires the exact engine");
  }

  EnsembleResult result;
  result.config = config;
  result.variant = variant;
  result.engine = engine;
  result.seed = seed;
  result.replicates = replicates;
  result.outcomes.resize(replicates);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  const auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= replicates) return;
      try {
        RngStream rng = derive_replicate_stream(seed, i);
        switch (engine) {
          case EngineKind::fast:
            result.outcomes[i] = simulate_fast(config, variant, rng);
            break;
          case EngineKind::exact:
            result.outcomes[i] = simulate_exact(config, variant, rng);
            break;
          case EngineKind::coupled:
            result.outcomes[i] = simulate_coupled(config, rng).of(variant);
            break;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const int extra = std::clamp(threads, 1, 256) - 1;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(extra));
  for (int k = 0; k < extra; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  for (const SimOutcome& o : result.outcomes) {
    if (!o.type2()) {
      ++result.timeout_count;
      continue;
    }
    result.tau.push_back(o.tau);
    result.sigma.push_back(o.sigma());
    result.rho.push_back(o.rho());
    ++result.path_counts[static_cast<std::size_t>(o.path)];
  }
  return result;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

CheckReport ks_check(const std::string& name, const std::vector<double>& data,
                     const LimitLaw& law, const VerifyOptions& options) {
  CheckReport c;
  c.name = name;
  c.threshold = options.limit_d_max;
  if (data.empty()) {
    c.detail = "no completed replicates";
    return c;
  }
  const KsResult ks = ks_one_sample(data, law);
  c.statistic = ks.d;
  c.pass = ks.d <= options.limit_d_max || ks.p_value >= options.alpha_level;
  c.detail = "ks distance to " + law_name(law) + " on " +
             std::to_string(data.size()) + " values (p=" + fmt(ks.p_value) + ")";
  return c;
}

CheckReport median_check(const std::string& name,
                         const std::vector<double>& data, double target,
                         const VerifyOptions& options) {
  CheckReport c;
  c.name = name;
  c.threshold = options.median_window;
  if (data.empty()) {
    c.detail = "no completed replicates";
    return c;
  }
  const double med = median_of(data);
  c.statistic = std::fabs(med - target);
  c.pass = c.statistic <= options.median_window;
  c.detail = "median " + fmt(med) + " vs limit " + fmt(target);
  return c;
}

CheckReport sigma_check_for(const Regime& regime,
                            const std::vector<double>& sigma,
                            const VerifyOptions& options) {
  const LimitLaw& law = regime.sigma_law.value();
  if (law.kind == LawKind::point_mass) {
    return median_check("sigma", sigma, law.a, options);
  }
  if (law.kind == LawKind::bernoulli_mix) {
    CheckReport c;
    c.name = "sigma";
    c.threshold = options.atom_tol;
    if (sigma.empty()) {
      c.detail = "no completed replicates";
      return c;
    }
    const double atom_want = 1.0 / (1.0 + law.a);
    std::vector<double> positive;
    std::size_t zeros = 0;
    for (double s : sigma) {
      if (s == 0) {
        ++zeros;
      } else {
        positive.push_back(s);
      }
    }
    const double atom_have = static_cast<double>(zeros) / sigma.size();
    c.statistic = std::fabs(atom_have - atom_want);
    const bool atom_ok = c.statistic <= options.atom_tol;
    const CheckReport tail = ks_check(
        "sigma-tail", positive, LimitLaw::uniform_interval(0, 1), options);
    c.pass = atom_ok && tail.pass;
    c.detail = "P(sigma=0) " + fmt(atom_have) + " vs " + fmt(atom_want) +
               "; tail " + tail.detail;
    return c;
  }
  return ks_check("sigma", sigma, law, options);
}

CheckReport path_check_for(const Regime& regime, const EnsembleResult& runs,
                           const VerifyOptions& options) {
  CheckReport c;
  c.name = "path";
  const double n = runs.completed();
  if (n == 0) {
    c.detail = "no completed replicates";
    return c;
  }
  if (regime.dd_fraction) {
    const double have =
        runs.path_counts[static_cast<std::size_t>(Path::dd)] / n;
    c.threshold = options.atom_tol;
    c.statistic = std::fabs(have - *regime.dd_fraction);
    c.pass = c.statistic <= options.atom_tol;
    c.detail = "dd fraction " + fmt(have) + " vs " + fmt(*regime.dd_fraction);
    return c;
  }
  const Path want = regime.dominant_path.value();
  const double have =
      runs.path_counts[static_cast<std::size_t>(want)] / n;
  c.threshold = options.dominant_path_min;
  c.statistic = have;
  c.pass = have >= options.dominant_path_min;
  c.detail = std::string(to_string(want)) + " fraction " + fmt(have);
  return c;
}

}  // namespace

VerificationReport verify_regime(const CryptConfig& config,
                                 const Regime& regime, Variant variant,
                                 EngineKind engine, std::size_t replicates,
                                 std::uint64_t seed,
                                 const VerifyOptions& options) {
  VerificationReport report;
  report.regime = regime;
  report.replicates = replicates;
  if (regime.classification_only) {
    report.classification_only = true;
    report.verified = true;
    return report;
  }
  report.scale = scaling_factor(regime, config);

  const EnsembleResult runs =
      run_ensemble(config, variant, engine, replicates, seed, options.threads);
  report.completed = runs.tau.size();

  std::vector<double> scaled = runs.tau;
  for (double& t : scaled) t *= report.scale;
  report.tau_check = ks_check("tau", scaled, regime.tau_law.value(), options);
  report.sigma_check = sigma_check_for(regime, runs.sigma, options);
  report.rho_check =
      median_check("rho", runs.rho, regime.rho_limit.value(), options);
  report.path_check = path_check_for(regime, runs, options);

  CheckReport& timeouts = report.timeout_check;
  timeouts.name = "timeouts";
  timeouts.threshold = options.timeout_max_fraction;
  timeouts.statistic =
      replicates ? static_cast<double>(runs.timeout_count) / replicates : 0;
  timeouts.pass = timeouts.statistic <= options.timeout_max_fraction;
  timeouts.detail = std::to_string(runs.timeout_count) + " of " +
                    std::to_string(replicates) + " replicates timed out";

  report.verified = report.tau_check.pass && report.sigma_check.pass &&
                    report.rho_check.pass && report.path_check.pass &&
                    report.timeout_check.pass;
  return report;
}

}  // namespace cryptsim
