#include "crypt/exact.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cryptsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const char* msg) {
  if (!cond) throw std::logic_error(msg);
}

}  // namespace

int cell_generation(std::int64_t index) {
  require(index >= 1, "cell_generation: index must be >= 1");
  return std::bit_width(static_cast<std::uint64_t>(index));
}

CryptState make_crypt_state(int l) {
  if (l < 1 || l > 20) throw ConfigError("nonpositive-l: need 1 <= l <= 20");
  CryptState s;
  s.l = l;
  s.cells.assign(static_cast<std::size_t>(crypt_size(l)), CellState{});
  return s;
}

void step_crypt(CryptState& state) {
  const std::int64_t half = crypt_size(state.l) / 2;
  std::int64_t sum = 0;
  std::int64_t extra = 0;
  for (std::int64_t x = half - 1; x >= 1; --x) {
    const CellState parent = state.cells[static_cast<std::size_t>(x)];
    state.cells[static_cast<std::size_t>(2 * x)] = parent;
    state.cells[static_cast<std::size_t>(2 * x + 1)] = parent;
    sum += 2 * static_cast<std::int64_t>(parent.counter);
    if (parent.counter > 1) extra += 2 * (parent.counter - 1);
  }
  CellState seed;
  seed.inherited = state.stem_type1;
  state.cells[1] = seed;
  state.sum_counters = sum;
  state.extra_weight = extra;
}

namespace {

struct WorldResult {
  bool resolved = false;
  SimOutcome outcome;
};

/// Fields shared by every acceptance: sets the common outcome pieces.
SimOutcome accepted(double tau, Path path, int sigma_gen, int rho_gen,
                    double type1_time, int l) {
  SimOutcome o;
  o.l = l;
  o.status = OutcomeStatus::type2_occurred;
  o.tau = tau;
  o.path = path;
  o.sigma_gen = sigma_gen;
  o.rho_gen = rho_gen;
  o.cancer_type1_time = type1_time;
  return o;
}

const MutationRecord& chronological_record(const CryptState& state,
                                           const CellState& cell, int j) {
  require(cell.counter >= 1 && j >= 1 &&
              j <= static_cast<int>(cell.counter),
          "mutation record index out of range");
  std::int32_t node = cell.inc_head;
  for (std::uint32_t hop = cell.counter - static_cast<std::uint32_t>(j);
       hop > 0; --hop) {
    require(node >= 0, "mutation record chain too short");
    node = state.arena[static_cast<std::size_t>(node)].prev;
  }
  require(node >= 0, "mutation record chain too short");
  return state.arena[static_cast<std::size_t>(node)];
}

/// Runs one per-cell trajectory. `track_extra` keeps the stacked type-2
/// streams of multiply mutated cells alive (h2 semantics); without it only
/// base streams can fire (h1 semantics). `want_base_first` asks the loop to
/// keep going after the first acceptance until a base-stream acceptance
/// happened too, which is how h1 rides along an h2 trajectory.
struct ExactRun {
  WorldResult first;       // first acceptance of any live stream
  WorldResult first_base;  // first base-stream acceptance
  std::optional<double> stem_type1_time;
};

ExactRun run_exact(const CryptConfig& config, bool track_extra,
                   bool want_base_first, RngStream& rng) {
  const int l = config.l;
  const std::int64_t nm1 = crypt_size(l) - 1;
  const double daughters = static_cast<double>(nm1);
  CryptState state = make_crypt_state(l);

  ExactRun run;
  double t = 0;
  double next_split = 1;
  bool pristine = true;
  double stem_t1 = kInf;

  const auto done = [&] {
    if (!run.first.resolved) return false;
    return !want_base_first || run.first_base.resolved;
  };

  while (!done()) {
    const double extra_rate =
        track_extra ? config.v2 * static_cast<double>(state.extra_weight) : 0;
    const double r_t1 = config.v1 * daughters;
    const double r_t2 = config.v2 * daughters;
    const double total = config.u1 + config.u2 + r_t1 + r_t2 + extra_rate;
    if (total == 0) break;  // nothing can ever fire again

    const double dt = rng.exponential(total);
    const bool splits_matter = config.v1 > 0 || config.v2 > 0;
    if (!pristine && splits_matter && t + dt > next_split) {
      if (next_split > config.max_time) break;
      t = next_split;
      next_split += 1;
      step_crypt(state);
      if (!state.stem_type1 && state.sum_counters == 0) pristine = true;
      continue;
    }
    t += dt;
    if (t > config.max_time) break;

    // While the crypt carries no mutation anywhere, divisions copy zeroes
    // onto zeroes, so the loop above skips them; the first state change
    // re-anchors next_split.
    const auto leave_pristine = [&] {
      if (!pristine) return;
      pristine = false;
      next_split = std::floor(t) + 1.0;
    };

    double x = rng.uniform() * total;
    if (x < config.u1) {
      if (!state.stem_type1) {
        leave_pristine();
        state.stem_type1 = true;
        stem_t1 = t;
        run.stem_type1_time = t;
      }
      continue;
    }
    x -= config.u1;
    if (x < config.u2) {
      if (state.stem_type1) {
        const SimOutcome o = accepted(t, Path::ss, 0, 0, stem_t1, l);
        if (!run.first.resolved) run.first = {true, o};
        if (!run.first_base.resolved) run.first_base = {true, o};
      }
      continue;
    }
    x -= config.u2;
    if (x < r_t1) {
      CellState& cell =
          state.cells[static_cast<std::size_t>(1 + rng.uniform_below(
                          static_cast<std::uint64_t>(nm1)))];
      if (cell.inherited) continue;  // the stem's mutation already sits here
      leave_pristine();
      cell.counter += 1;
      state.sum_counters += 1;
      if (cell.counter >= 2) state.extra_weight += 1;
      const std::int64_t index =
          &cell - state.cells.data();
      state.arena.push_back({cell_generation(index), t, cell.inc_head});
      cell.inc_head = static_cast<std::int32_t>(state.arena.size() - 1);
      continue;
    }
    x -= r_t1;
    if (x < r_t2) {
      const std::int64_t index =
          1 + static_cast<std::int64_t>(
                  rng.uniform_below(static_cast<std::uint64_t>(nm1)));
      const CellState& cell = state.cells[static_cast<std::size_t>(index)];
      if (cell.inherited) {
        require(cell.counter == 0, "inherited cell stacked a counter");
        const SimOutcome o =
            accepted(t, Path::sd, 0, cell_generation(index), stem_t1, l);
        if (!run.first.resolved) run.first = {true, o};
        if (!run.first_base.resolved) run.first_base = {true, o};
      } else if (cell.counter >= 1) {
        const MutationRecord& rec = chronological_record(state, cell, 1);
        const SimOutcome o =
            accepted(t, Path::dd, rec.gen, cell_generation(index), rec.time, l);
        if (!run.first.resolved) run.first = {true, o};
        if (!run.first_base.resolved) run.first_base = {true, o};
      }
      continue;
    }
    x -= r_t2;
    // Extra stream of a multiply mutated cell.
    require(state.extra_weight > 0, "extra stream fired with zero weight");
    double y = rng.uniform() * static_cast<double>(state.extra_weight);
    std::int64_t index = -1;
    for (std::int64_t c = 1; c <= nm1; ++c) {
      const CellState& cell = state.cells[static_cast<std::size_t>(c)];
      if (cell.counter > 1) {
        y -= static_cast<double>(cell.counter - 1);
        if (y < 0) {
          index = c;
          break;
        }
      }
    }
    if (index < 0) {  // y landed on the top edge by rounding
      for (std::int64_t c = nm1; c >= 1; --c) {
        if (state.cells[static_cast<std::size_t>(c)].counter > 1) {
          index = c;
          break;
        }
      }
    }
    require(index >= 1, "no multiply mutated cell found");
    const CellState& cell = state.cells[static_cast<std::size_t>(index)];
    const int j =
        2 + static_cast<int>(rng.uniform_below(cell.counter - 1));
    const MutationRecord& rec = chronological_record(state, cell, j);
    const SimOutcome o =
        accepted(t, Path::dd, rec.gen, cell_generation(index), rec.time, l);
    if (!run.first.resolved) run.first = {true, o};
  }

  return run;
}

CryptConfig checked(const CryptConfig& raw, Variant variant,
                    const ExactOptions& options) {
  const CryptConfig config = effective_config(validate_config(raw, variant), variant);
  const int cap = options.allow_large ? 20 : 12;
  if (config.l > cap) {
    throw ConfigError("exact engine depth guard: l <= " + std::to_string(cap));
  }
  return config;
}

SimOutcome finish(const ExactRun& run, const WorldResult& w,
                  const CryptConfig& config) {
  SimOutcome o;
  if (w.resolved) {
    o = w.outcome;
  } else {
    o.status = OutcomeStatus::timed_out;
    o.tau = kInf;
    o.l = config.l;
  }
  o.stem_type1_time = run.stem_type1_time;
  return o;
}

}  // namespace

SimOutcome simulate_exact(const CryptConfig& raw, Variant variant,
                          RngStream& stream, const ExactOptions& options) {
  const CryptConfig config = checked(raw, variant, options);
  const bool track_extra = variant != Variant::H1;
  ExactRun run = run_exact(config, track_extra, false, stream);
  return finish(run, run.first, config);
}

std::pair<SimOutcome, SimOutcome> simulate_coupled_h1_h2(
    const CryptConfig& raw, RngStream& stream, const ExactOptions& options) {
  const CryptConfig config = checked(raw, Variant::H2, options);
  ExactRun run = run_exact(config, true, true, stream);
  return {finish(run, run.first_base, config), finish(run, run.first, config)};
}

}  // namespace cryptsim
