#pragma once

#include "crypt/core.hpp"
#include "crypt/rng.hpp"

namespace cryptsim {

// Split geometry and integrated type-2 exposures. Cell divisions happen at
// integer times; all exposures below are measured in cell-time units from a
// reference point that sits `delta` before the next division, delta in (0,1].

/// Time from t to the next division; 1 at integers (a division exactly at t
/// counts as already done).
double delta_after(double t);

/// Exposure accrued by the descendants of one type-1 daughter cell born in
/// generation i: one cell until the next division, then 2, 4, .. cells for
/// one time unit each until the line passes generation l and is swept.
double clone_exposure(int l, int i, double delta, double s);

/// Total exposure the clone ever accrues: delta + 2^{l-i+1} - 2.
double clone_exposure_total(int l, int i, double delta);

/// Smallest s with clone_exposure(l, i, delta, s) = target;
/// requires 0 < target <= clone_exposure_total.
double invert_clone_exposure(int l, int i, double delta, double target);

/// Generation the clone occupies at offset s, clamped to l.
int clone_generation(int l, int i, double delta, double s);

/// Exposure of the stem's type-1 descendants ("front"): after m divisions
/// the front covers generations 1..min(m, l), i.e. 2^min(m,l) - 1 cells, and
/// keeps renewing itself, so the exposure grows without bound.
double stem_lineage_exposure(int l, double delta, double s);

/// Inverse of stem_lineage_exposure in s; target must be positive.
double invert_stem_exposure(int l, double delta, double target);

/// Number of front generations at offset s: min(divisions in (0, s], l).
int stem_front_generations(int l, double delta, double s);

/// Generation of a uniformly chosen daughter cell, u in [0,1); generation i
/// holds 2^{i-1} of the 2^l - 1 cells.
int sample_type1_generation(int l, double u);

/// Generation of a uniformly chosen front cell over generations 1..m.
int sample_front_generation(int m, double u);

struct FastOptions {
  /// Scan arrivals all the way to max_time instead of stopping once no
  /// later arrival can beat the best candidate. The outcome is identical;
  /// the flag exists to test exactly that.
  bool disable_stopping = false;
};

/// Event-driven simulation of one crypt. Draws are split over two child
/// streams (0: stem and its lineage, 1: daughter type-1 arrivals) so the
/// stem outcome of a replicate can be predicted independently of the
/// arrival loop. Supports H2 and the sub-models; H1 needs per-cell state
/// and is only available in the exact engine.
SimOutcome simulate_fast(const CryptConfig& config, Variant variant,
                         RngStream& stream, const FastOptions& options = {});

struct CoupledOutcome {
  SimOutcome h2;
  SimOutcome m1;
  SimOutcome m2;
  SimOutcome m3;

  const SimOutcome& of(Variant v) const;
};

/// Runs the full model and the three sub-models on shared randomness such
/// that h2.tau == min(m1.tau, m2.tau, m3.tau) holds exactly (bitwise) for
/// every replicate. h2, m2 and m3 keep their exact marginal laws. m1 is
/// exact except that inside the stem front a type-1 arrival landing on an
/// already mutated cell is dropped instead of stacking a second mutation,
/// a second-order effect; the standalone engines keep it.
CoupledOutcome simulate_coupled(const CryptConfig& config, RngStream& stream);

}  // namespace cryptsim
