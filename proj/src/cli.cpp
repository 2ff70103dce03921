#include "crypt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "crypt/rng.hpp"
#include "crypt/stats.hpp"

namespace cryptsim {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + text + "'");
  }
  if (trimmed(text.substr(used)).size()) {
    throw ConfigError("config key '" + key + "': trailing text in '" + text + "'");
  }
  return value;
}

RateExpr parse_law(const std::string& text, const std::string& key) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  std::vector<double> parts;
  double x;
  while (in >> x) parts.push_back(x);
  if (!in.eof() || parts.empty() || parts.size() > 3) {
    throw ConfigError("config key '" + key +
                      "': a law needs 1..3 numbers (c p q), got '" + text + "'");
  }
  RateExpr e;
  e.c = parts[0];
  if (parts.size() > 1) e.p = parts[1];
  if (parts.size() > 2) e.q = parts[2];
  return e;
}

}  // namespace

FileConfig parse_config_text(const std::string& text) {
  FileConfig fc;
  bool saw_l = false;
  std::istringstream lines(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trimmed(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    if (key == "l") {
      const double v = parse_number(value, key);
      if (v != std::floor(v)) throw ConfigError("config key 'l': not an integer");
      fc.config.l = static_cast<int>(v);
      saw_l = true;
    } else if (key == "u1") {
      fc.config.u1 = parse_number(value, key);
    } else if (key == "u2") {
      fc.config.u2 = parse_number(value, key);
    } else if (key == "v1") {
      fc.config.v1 = parse_number(value, key);
    } else if (key == "v2") {
      fc.config.v2 = parse_number(value, key);
    } else if (key == "max_time") {
      fc.config.max_time = parse_number(value, key);
    } else if (key == "u1_law") {
      fc.laws.u1 = parse_law(value, key);
    } else if (key == "u2_law") {
      fc.laws.u2 = parse_law(value, key);
    } else if (key == "v1_law") {
      fc.laws.v1 = parse_law(value, key);
    } else if (key == "v2_law") {
      fc.laws.v2 = parse_law(value, key);
    } else if (key == "mu_law") {
      fc.laws.mu = parse_law(value, key);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  if (!saw_l) throw ConfigError("config: missing required key 'l'");
  if (fc.laws.mu) {
    if (fc.laws.u1 || fc.laws.u2 || fc.laws.v1 || fc.laws.v2) {
      throw ConfigError("config: mu_law excludes the per-rate laws");
    }
    if (fc.config.u1 != fc.config.u2 || fc.config.u1 != fc.config.v1 ||
        fc.config.u1 != fc.config.v2) {
      throw ConfigError("config: mu_law requires u1 == u2 == v1 == v2");
    }
  }
  return fc;
}

FileConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string emit_config_text(const FileConfig& fc) {
  std::ostringstream os;
  os << "l = " << fc.config.l << "\n";
  os << "u1 = " << fmt17(fc.config.u1) << "\n";
  os << "u2 = " << fmt17(fc.config.u2) << "\n";
  os << "v1 = " << fmt17(fc.config.v1) << "\n";
  os << "v2 = " << fmt17(fc.config.v2) << "\n";
  os << "max_time = " << fmt17(fc.config.max_time) << "\n";
  const auto law = [&](const char* key, const std::optional<RateExpr>& e) {
    if (!e) return;
    os << key << " = " << fmt17(e->c) << " " << fmt17(e->p) << " "
       << fmt17(e->q) << "\n";
  };
  law("u1_law", fc.laws.u1);
  law("u2_law", fc.laws.u2);
  law("v1_law", fc.laws.v1);
  law("v2_law", fc.laws.v2);
  law("mu_law", fc.laws.mu);
  return os.str();
}

Regime classify_file_config(const FileConfig& fc) {
  if (fc.laws.mu) return classify_null(*fc.laws.mu);
  if (fc.laws.u1 && fc.laws.u2 && fc.laws.v1 && fc.laws.v2) {
    return classify_theorem1(*fc.laws.u1, *fc.laws.u2, *fc.laws.v1,
                             *fc.laws.v2);
  }
  throw ConfigError(
      "classification needs all of u1_law, u2_law, v1_law, v2_law, or mu_law");
}

Invocation parse_invocation(const std::vector<std::string>& args) {
  Invocation inv;
  CLI::App app{"stochastic crypt-model simulator and regime toolkit",
               "crypt-regimes"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", inv.config_path, "config file (key = value)")
        ->required();
    cmd->add_option("--replicates", inv.replicates, "ensemble size");
    cmd->add_option("--seed", inv.seed, "master seed");
    cmd->add_option("--engine", inv.engine, "exact, fast or coupled");
    cmd->add_option("--variant", inv.variant, "h1, h2, m1, m2 or m3");
    cmd->add_option("--out", inv.out_path, "output file (default stdout)");
    cmd->add_option("--threads", inv.threads, "worker threads");
    cmd->add_option("--max-time", inv.max_time,
                    "override the config's simulation horizon");
    cmd->add_flag("--emit-config", inv.emit_config,
                  "print the parsed config in canonical form and exit");
    return cmd;
  };

  add_common(app.add_subcommand("simulate", "run an ensemble, write CSV"))
      ->add_flag("--wide", inv.wide, "append sigma_gen and rho_gen columns");
  add_common(app.add_subcommand("classify",
                                "print the regime for the config's rate laws"));
  add_common(app.add_subcommand(
      "verify", "simulate and test the ensemble against the regime's limits"));
  add_common(app.add_subcommand(
      "oracle-check",
      "compare the fast engine against the per-cell reference engine"));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
  inv.command = app.get_subcommands().front()->get_name();
  return inv;
}

void write_csv(std::ostream& os, const EnsembleResult& runs, double scale,
               bool wide) {
  os << "# crypt-regimes csv v1\n";
  const CryptConfig& c = runs.config;
  os << "# l=" << c.l << " u1=" << fmt17(c.u1) << " u2=" << fmt17(c.u2)
     << " v1=" << fmt17(c.v1) << " v2=" << fmt17(c.v2)
     << " max_time=" << fmt17(c.max_time) << "\n";
  os << "# variant=" << to_string(runs.variant)
     << " engine=" << to_string(runs.engine) << " seed=" << runs.seed
     << " replicates=" << runs.replicates << " scale=" << fmt17(scale) << "\n";
  os << "replicate,tau,tau_scaled,sigma,rho,path,stem_type1_time,status";
  if (wide) os << ",sigma_gen,rho_gen";
  os << "\n";
  for (std::size_t i = 0; i < runs.outcomes.size(); ++i) {
    const SimOutcome& o = runs.outcomes[i];
    os << i << ",";
    if (o.type2()) {
      os << fmt17(o.tau) << "," << fmt17(o.tau * scale) << ","
         << fmt17(o.sigma()) << "," << fmt17(o.rho()) << "," << to_string(o.path);
    } else {
      os << ",,,,";
    }
    os << ",";
    if (o.stem_type1_time) os << fmt17(*o.stem_type1_time);
    os << "," << to_string(o.status);
    if (wide) {
      os << ",";
      if (o.type2()) os << o.sigma_gen;
      os << ",";
      if (o.type2()) os << o.rho_gen;
    }
    os << "\n";
  }
}

namespace {

nlohmann::json law_json(const std::optional<LimitLaw>& law) {
  if (!law) return nullptr;
  return law_name(*law);
}

nlohmann::json regime_json(const Regime& regime) {
  nlohmann::json j;
  j["regime"] = regime.label();
  j["alpha"] = regime.alpha;
  if (regime.A) j["A"] = *regime.A;
  j["classification_only"] = regime.classification_only;
  j["tau_law"] = law_json(regime.tau_law);
  j["sigma_law"] = law_json(regime.sigma_law);
  if (regime.rho_limit) j["rho_limit"] = *regime.rho_limit;
  if (regime.dominant_path) j["dominant_path"] = to_string(*regime.dominant_path);
  if (regime.dd_fraction) j["dd_fraction"] = *regime.dd_fraction;
  j["scaling"] = regime.scaling_formula();
  return j;
}

nlohmann::json check_json(const CheckReport& c) {
  return {{"name", c.name},
          {"pass", c.pass},
          {"statistic", c.statistic},
          {"threshold", c.threshold},
          {"detail", c.detail}};
}

nlohmann::json report_json(const VerificationReport& r) {
  nlohmann::json j;
  j["regime"] = regime_json(r.regime);
  j["classification_only"] = r.classification_only;
  j["verified"] = r.verified;
  if (r.classification_only) return j;
  j["scale"] = r.scale;
  j["replicates"] = r.replicates;
  j["completed"] = r.completed;
  j["checks"] = {check_json(r.tau_check), check_json(r.sigma_check),
                 check_json(r.rho_check), check_json(r.path_check),
                 check_json(r.timeout_check)};
  return j;
}

int dispatch(const Invocation& inv, std::ostream& out) {
  FileConfig fc = parse_config_file(inv.config_path);
  if (inv.max_time >= 0) fc.config.max_time = inv.max_time;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!inv.out_path.empty()) {
    file.open(inv.out_path);
    if (!file) throw ConfigError("cannot open output file '" + inv.out_path + "'");
    sink = &file;
  }

  if (inv.emit_config) {
    *sink << emit_config_text(fc);
    return 0;
  }

  const bool has_laws =
      fc.laws.mu || (fc.laws.u1 && fc.laws.u2 && fc.laws.v1 && fc.laws.v2);

  if (inv.command == "classify") {
    const Regime regime = classify_file_config(fc);
    nlohmann::json j = regime_json(regime);
    if (!regime.classification_only) {
      j["scale"] = scaling_factor(regime, fc.config);
    }
    *sink << j.dump(2) << "\n";
    return 0;
  }

  if (inv.replicates == 0) {
    throw UsageError("--replicates must be positive");
  }
  const Variant variant = parse_variant(inv.variant);

  if (inv.command == "simulate") {
    const EngineKind engine = parse_engine(inv.engine);
    double scale = 1;
    if (has_laws) {
      const Regime regime = classify_file_config(fc);
      if (!regime.classification_only) {
        scale = scaling_factor(regime, fc.config);
      }
    }
    const EnsembleResult runs = run_ensemble(
        fc.config, variant, engine, inv.replicates, inv.seed, inv.threads);
    write_csv(*sink, runs, scale, inv.wide);
    return 0;
  }

  if (inv.command == "verify") {
    const Regime regime = classify_file_config(fc);
    const EngineKind engine = parse_engine(inv.engine);
    VerifyOptions options;
    options.threads = inv.threads;
    const VerificationReport report = verify_regime(
        fc.config, regime, variant, engine, inv.replicates, inv.seed, options);
    *sink << report_json(report).dump(2) << "\n";
    return report.verified ? 0 : 1;
  }

  if (inv.command == "oracle-check") {
    std::uint64_t state = inv.seed;
    const std::uint64_t fast_seed = splitmix64(state);
    const EnsembleResult exact_runs =
        run_ensemble(fc.config, variant, EngineKind::exact, inv.replicates,
                     inv.seed, inv.threads);
    const EnsembleResult fast_runs =
        run_ensemble(fc.config, variant, EngineKind::fast, inv.replicates,
                     fast_seed, inv.threads);
    if (exact_runs.tau.empty() || fast_runs.tau.empty()) {
      throw ConfigError("oracle-check: an engine produced no completed runs");
    }
    const KsResult ks = ks_two_sample(exact_runs.tau, fast_runs.tau);
    nlohmann::json j;
    j["variant"] = to_string(variant);
    j["replicates"] = inv.replicates;
    j["exact_completed"] = exact_runs.tau.size();
    j["fast_completed"] = fast_runs.tau.size();
    j["d"] = ks.d;
    j["p_value"] = ks.p_value;
    j["reject_1pct"] = ks.reject_1pct;
    *sink << j.dump(2) << "\n";
    return ks.reject_1pct ? 1 : 0;
  }

  throw UsageError("unknown command '" + inv.command + "'");
}

}  // namespace

int run_command(const Invocation& invocation, std::ostream& out,
                std::ostream& err) {
  try {
    return dispatch(invocation, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cryptsim
