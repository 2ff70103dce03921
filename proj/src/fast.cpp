#include "crypt/fast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cryptsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_geometry(int l, double delta) {
  if (l < 1 || l > kMaxDepth) {
    throw std::invalid_argument("exposure: l out of range");
  }
  if (!(delta > 0) || delta > 1) {
    throw std::invalid_argument("exposure: delta must lie in (0, 1]");
  }
}

/// Divisions in (0, s] when the first happens at delta and they repeat
/// every unit.
int divisions_by(double delta, double s) {
  if (s < delta) return 0;
  return static_cast<int>(std::floor(s - delta)) + 1;
}

}  // namespace

double delta_after(double t) {
  const double d = std::ceil(t) - t;
  return d == 0 ? 1.0 : d;
}

double clone_exposure(int l, int i, double delta, double s) {
  check_geometry(l, delta);
  if (i < 1 || i > l) throw std::invalid_argument("exposure: bad generation");
  if (s <= 0) return 0;
  if (s <= delta) return s;
  const int m = divisions_by(delta, s);
  if (m > l - i) return clone_exposure_total(l, i, delta);
  // Segment m covers [delta+m-1, delta+m) at slope 2^m; the clone has
  // accrued delta + 2 + 4 + .. + 2^{m-1} = delta + 2^m - 2 by its start.
  return delta + std::exp2(m) - 2.0 + (s - (delta + m - 1)) * std::exp2(m);
}

double clone_exposure_total(int l, int i, double delta) {
  check_geometry(l, delta);
  if (i < 1 || i > l) throw std::invalid_argument("exposure: bad generation");
  return delta + std::exp2(l - i + 1) - 2.0;
}

double invert_clone_exposure(int l, int i, double delta, double target) {
  const double total = clone_exposure_total(l, i, delta);
  if (!(target > 0) || target > total) {
    throw std::invalid_argument("invert_clone_exposure: target out of range");
  }
  if (target <= delta) return target;
  for (int m = 1; m <= l - i; ++m) {
    const double at_end = delta + std::exp2(m + 1) - 2.0;
    if (target <= at_end) {
      const double at_start = delta + std::exp2(m) - 2.0;
      return delta + (m - 1) + (target - at_start) / std::exp2(m);
    }
  }
  return delta + (l - i);  // target == total up to rounding
}

int clone_generation(int l, int i, double delta, double s) {
  check_geometry(l, delta);
  if (i < 1 || i > l) throw std::invalid_argument("exposure: bad generation");
  return std::min(l, i + divisions_by(delta, std::max(s, 0.0)));
}

double stem_lineage_exposure(int l, double delta, double s) {
  check_geometry(l, delta);
  if (s < delta) return 0;
  const int m = divisions_by(delta, s);
  // End of segment k (k <= l) sits at cumulative 2^{k+1} - 2 - k.
  if (m <= l) {
    const double at_start = std::exp2(m) - 2.0 - (m - 1);
    return at_start + (s - (delta + m - 1)) * (std::exp2(m) - 1.0);
  }
  const double full = std::exp2(l + 1) - 2.0 - l;
  return full + (s - (delta + l)) * (std::exp2(l) - 1.0);
}

double invert_stem_exposure(int l, double delta, double target) {
  check_geometry(l, delta);
  if (!(target > 0)) {
    throw std::invalid_argument("invert_stem_exposure: target must be > 0");
  }
  for (int m = 1; m <= l; ++m) {
    const double at_end = std::exp2(m + 1) - 2.0 - m;
    if (target <= at_end) {
      const double at_start = std::exp2(m) - 2.0 - (m - 1);
      return delta + (m - 1) + (target - at_start) / (std::exp2(m) - 1.0);
    }
  }
  const double full = std::exp2(l + 1) - 2.0 - l;
  return delta + l + (target - full) / (std::exp2(l) - 1.0);
}

int stem_front_generations(int l, double delta, double s) {
  check_geometry(l, delta);
  return std::min(l, divisions_by(delta, s));
}

int sample_type1_generation(int l, double u) {
  if (l < 1 || l > kMaxDepth) {
    throw std::invalid_argument("sample_type1_generation: l out of range");
  }
  if (!(u >= 0) || u >= 1) {
    throw std::invalid_argument("sample_type1_generation: u out of [0,1)");
  }
  // Uniform cell index x in [0, 2^l - 1); generation i owns indices
  // [2^{i-1} - 1, 2^i - 1).
  const double x = u * (std::exp2(l) - 1.0);
  int i = static_cast<int>(std::floor(std::log2(x + 1.0))) + 1;
  i = std::clamp(i, 1, l);
  while (i > 1 && x < std::exp2(i - 1) - 1.0) --i;
  while (i < l && x >= std::exp2(i) - 1.0) ++i;
  return i;
}

int sample_front_generation(int m, double u) { return sample_type1_generation(m, u); }

namespace {

struct Candidate {
  double tau = kInf;
  Path path = Path::dd;
  int sigma_gen = -1;
  int rho_gen = -1;
  std::optional<double> type1_time;
};

void offer(Candidate& best, double tau, Path path, int sigma_gen, int rho_gen,
           std::optional<double> type1_time) {
  if (tau < best.tau) best = {tau, path, sigma_gen, rho_gen, type1_time};
}

SimOutcome materialize(const Candidate& best, const CryptConfig& config,
                       std::optional<double> stem_type1_time) {
  SimOutcome out;
  out.l = config.l;
  out.stem_type1_time = stem_type1_time;
  if (best.tau <= config.max_time) {
    out.status = OutcomeStatus::type2_occurred;
    out.tau = best.tau;
    out.path = best.path;
    out.sigma_gen = best.sigma_gen;
    out.rho_gen = best.rho_gen;
    out.cancer_type1_time = best.type1_time;
  } else {
    out.status = OutcomeStatus::timed_out;
    out.tau = kInf;
  }
  return out;
}

/// Stem-side draws, shared verbatim between the engines: type-1 time, then
/// (when reachable) the stem type-2 and the first type-2 on the front.
struct StemDraws {
  double type1 = kInf;        // T
  double delta = 1;           // time from T to the next division
  double ss_tau = kInf;
  double front_target = 0;    // exposure consumed by the first front mark
  double front_offset = kInf; // s with Lambda(s) == front_target
  int front_gen = -1;
};

StemDraws draw_stem(const CryptConfig& config, RngStream& s0) {
  StemDraws d;
  d.type1 = s0.exponential(config.u1);
  if (d.type1 > config.max_time) return d;
  if (config.u2 > 0) d.ss_tau = d.type1 + s0.exponential(config.u2);
  if (config.v2 > 0) {
    d.delta = delta_after(d.type1);
    d.front_target = s0.exp1() / config.v2;
    d.front_offset = invert_stem_exposure(config.l, d.delta, d.front_target);
    const int m = stem_front_generations(config.l, d.delta, d.front_offset);
    d.front_gen = sample_front_generation(m, s0.uniform());
  }
  return d;
}

}  // namespace

SimOutcome simulate_fast(const CryptConfig& raw, Variant variant,
                         RngStream& stream, const FastOptions& options) {
  if (variant == Variant::H1) {
    throw ConfigError("the event-driven engine cannot run h1; use the exact engine");
  }
  const CryptConfig config = effective_config(validate_config(raw, variant), variant);
  RngStream s0 = stream.substream(0);
  RngStream s1 = stream.substream(1);

  const StemDraws stem = draw_stem(config, s0);
  std::optional<double> stem_type1;
  if (stem.type1 <= config.max_time) stem_type1 = stem.type1;

  Candidate best;
  if (config.u2 > 0) offer(best, stem.ss_tau, Path::ss, 0, 0, stem.type1);
  if (stem.front_gen >= 0) {
    offer(best, stem.type1 + stem.front_offset, Path::sd, 0, stem.front_gen,
          stem.type1);
  }

  if (config.v1 > 0 && config.v2 > 0) {
    const double arrival_rate = config.v1 * (std::exp2(config.l) - 1.0);
    double t = 0;
    while (true) {
      t += s1.exponential(arrival_rate);
      const double limit = options.disable_stopping
                               ? config.max_time
                               : std::min(best.tau, config.max_time);
      if (t > limit) break;
      const int i = sample_type1_generation(config.l, s1.uniform());
      if (t > stem.type1 &&
          i <= stem_front_generations(config.l, stem.delta, t - stem.type1)) {
        continue;  // the cell already carries the stem's mutation
      }
      const double delta = delta_after(t);
      const double total = clone_exposure_total(config.l, i, delta);
      const double e = s1.exp1();
      if (e <= config.v2 * total) {
        const double s = invert_clone_exposure(config.l, i, delta, e / config.v2);
        offer(best, t + s, Path::dd, i, clone_generation(config.l, i, delta, s), t);
      }
    }
  }
  return materialize(best, config, stem_type1);
}

const SimOutcome& CoupledOutcome::of(Variant v) const {
  switch (v) {
    case Variant::H2: return h2;
    case Variant::M1: return m1;
    case Variant::M2: return m2;
    case Variant::M3: return m3;
    case Variant::H1: break;
  }
  throw ConfigError("coupled runs carry no h1 outcome");
}

namespace {

/// A maximal type-1 clone born inside the stem front, tracked for the
/// sub-model without a stem. Current generation at time s is
/// birth_gen + divisions since birth; size doubles with each division.
struct FrontClone {
  double birth_time;
  int birth_gen;
};

class FrontUnion {
 public:
  explicit FrontUnion(int l) : l_(l) {}

  /// Cells the union occupies in generation gen at time t. Swept clones are
  /// pruned on the way.
  double occupied(int gen, double t) {
    double occ = 0;
    prune(t);
    for (const FrontClone& c : clones_) {
      const int d = divisions_by(delta_after(c.birth_time), t - c.birth_time);
      if (c.birth_gen + d == gen) occ += std::exp2(d);
    }
    return occ;
  }

  /// Among the clones occupying generation gen at time t, picks the one a
  /// uniform cell choice x in [0, occupied) lands in.
  const FrontClone& pick(int gen, double t, double x) const {
    double acc = 0;
    for (const FrontClone& c : clones_) {
      const int d = divisions_by(delta_after(c.birth_time), t - c.birth_time);
      if (c.birth_gen + d != gen) continue;
      acc += std::exp2(d);
      if (x < acc) return c;
    }
    return clones_.back();  // x == occupied up to rounding
  }

  void add(double t, int gen) { clones_.push_back({t, gen}); }
  bool empty_at(double t) {
    prune(t);
    return clones_.empty();
  }

 private:
  void prune(double t) {
    std::erase_if(clones_, [&](const FrontClone& c) {
      return c.birth_gen +
                 divisions_by(delta_after(c.birth_time), t - c.birth_time) >
             l_;
    });
  }

  int l_;
  std::vector<FrontClone> clones_;
};

}  // namespace

CoupledOutcome simulate_coupled(const CryptConfig& raw, RngStream& stream) {
  const CryptConfig config = validate_config(raw, Variant::H2);
  const int l = config.l;
  const double horizon = config.max_time;
  RngStream s0 = stream.substream(0);
  RngStream s1 = stream.substream(1);

  const StemDraws stem = draw_stem(config, s0);
  const double T = stem.type1;
  std::optional<double> stem_type1;
  if (T <= horizon) stem_type1 = T;

  Candidate h2, m1, m2, m3;
  if (config.u2 > 0 && T <= horizon) {
    offer(h2, stem.ss_tau, Path::ss, 0, 0, T);
    offer(m3, stem.ss_tau, Path::ss, 0, 0, T);
  }

  // Front marks: the Poisson stream of type-2 hits on the stem's mutated
  // descendants. The full model and the stem-only-type-1 sub-model take the
  // first mark as is; the stem-free sub-model keeps a mark only when it
  // lands on a cell of `front_union`, its own mutated mass inside the front.
  bool first_mark_pending = stem.front_gen >= 0;
  double mark_target = stem.front_target;
  double mark_offset = stem.front_offset;  // time of next mark, relative to T
  double next_mark = first_mark_pending ? T + mark_offset : kInf;
  bool marks_deferred = false;
  if (first_mark_pending) {
    offer(h2, next_mark, Path::sd, 0, stem.front_gen, T);
    offer(m2, next_mark, Path::sd, 0, stem.front_gen, T);
  }

  FrontUnion front_union(l);

  const bool arrivals_active = config.v1 > 0 && config.v2 > 0;
  const double arrival_rate = config.v1 * (std::exp2(l) - 1.0);
  double next_arrival = arrivals_active ? s1.exponential(arrival_rate) : kInf;

  while (true) {
    // An arrival can still matter to the full model (new clone) or to the
    // stem-free one (new clone, or occupancy for a later mark); a mark only
    // to the stem-free one.
    const double arrival_limit = std::min(horizon, std::max(h2.tau, m1.tau));
    const double mark_limit = std::min(horizon, m1.tau);
    const bool arrival_live = next_arrival <= arrival_limit;
    const bool mark_live = next_mark <= mark_limit;
    if (!arrival_live && !mark_live) break;

    if (arrival_live && (!mark_live || next_arrival <= next_mark)) {
      const double t = next_arrival;
      const int i = sample_type1_generation(l, s1.uniform());
      const bool inside_front =
          t > T && i <= stem_front_generations(l, stem.delta, t - T);
      if (inside_front) {
        // Only the stem-free sub-model sees this cell as fresh. If it hits
        // one of that model's existing clones the stacked mutation is
        // dropped; otherwise it starts a new maximal clone.
        const double occ = front_union.occupied(i, t);
        const bool nested = occ > 0 && s1.uniform() < occ / std::exp2(i - 1);
        if (!nested) {
          front_union.add(t, i);
          if (marks_deferred) {
            mark_target = stem_lineage_exposure(l, stem.delta, t - T) +
                          s0.exp1() / config.v2;
            mark_offset = invert_stem_exposure(l, stem.delta, mark_target);
            next_mark = T + mark_offset;
            marks_deferred = false;
          }
        }
      } else {
        const double delta = delta_after(t);
        const double total = clone_exposure_total(l, i, delta);
        const double e = s1.exp1();
        if (e <= config.v2 * total) {
          const double s = invert_clone_exposure(l, i, delta, e / config.v2);
          const int gen = clone_generation(l, i, delta, s);
          offer(h2, t + s, Path::dd, i, gen, t);
          offer(m1, t + s, Path::dd, i, gen, t);
        }
      }
      next_arrival = t + s1.exponential(arrival_rate);
    } else {
      const double tm = next_mark;
      int gen;
      if (first_mark_pending) {
        gen = stem.front_gen;
        first_mark_pending = false;
      } else {
        const int m = stem_front_generations(l, stem.delta, mark_offset);
        gen = sample_front_generation(m, s0.uniform());
      }
      const double occ = front_union.occupied(gen, tm);
      if (occ > 0 && s0.uniform() < occ / std::exp2(gen - 1)) {
        const FrontClone& hit = front_union.pick(gen, tm, s0.uniform() * occ);
        offer(m1, tm, Path::dd, hit.birth_gen, gen, hit.birth_time);
      }
      if (front_union.empty_at(tm)) {
        // No clone can absorb a mark; restart the stream when one appears.
        marks_deferred = true;
        next_mark = kInf;
      } else {
        mark_target += s0.exp1() / config.v2;
        mark_offset = invert_stem_exposure(l, stem.delta, mark_target);
        next_mark = T + mark_offset;
      }
    }
  }

  CoupledOutcome out;
  out.h2 = materialize(h2, config, stem_type1);
  out.m1 = materialize(m1, config, std::nullopt);
  out.m2 = materialize(m2, config, stem_type1);
  out.m3 = materialize(m3, config, stem_type1);
  return out;
}

}  // namespace cryptsim
