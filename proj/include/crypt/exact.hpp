#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "crypt/core.hpp"
#include "crypt/rng.hpp"

namespace cryptsim {

/// One daughter cell. `counter` counts the type-1 mutations its lineage has
/// absorbed (h2 semantics), `inherited` marks cells whose type-1 status came
/// down from the stem; such cells never stack counters. `inc_head` indexes
/// the cell's latest mutation record in the arena, -1 when none.
struct CellState {
  std::uint32_t counter = 0;
  std::int32_t inc_head = -1;
  bool inherited = false;
};

/// Record of one absorbed type-1 mutation; `prev` chains to the previous
/// record of the same lineage, so the j-th chronological record of a cell
/// with counter c is found counter - j hops from inc_head.
struct MutationRecord {
  int gen = 0;
  double time = 0;
  std::int32_t prev = -1;
};

/// Whole-crypt state, heap layout: cells[x] for x in 1..2^l - 1 is the cell
/// in generation bit_width(x) whose children after a division are 2x and
/// 2x + 1. cells[0] is unused.
struct CryptState {
  int l = 0;
  bool stem_type1 = false;
  std::vector<CellState> cells;
  std::vector<MutationRecord> arena;
  std::int64_t sum_counters = 0;   // sum of counter over all cells
  std::int64_t extra_weight = 0;   // sum of (counter - 1)^+ over all cells
};

/// Generation of heap index x (1-based cells): bit_width(x).
int cell_generation(std::int64_t index);

CryptState make_crypt_state(int l);

/// One synchronous division: every cell's children copy its state, the stem
/// seeds the new generation-1 cell (inherited iff the stem is type-1), the
/// old generation l falls off. Tallies are rebuilt.
void step_crypt(CryptState& state);

struct ExactOptions {
  /// Lift the default depth guard of l <= 12 (the per-cell engine walks all
  /// 2^l - 1 cells on every division); l <= 20 stays a hard limit.
  bool allow_large = false;
};

/// Per-cell reference simulation of one crypt. Supports every variant,
/// including h1 (where a mutated cell accepts only its base type-2 stream).
SimOutcome simulate_exact(const CryptConfig& config, Variant variant,
                          RngStream& stream, const ExactOptions& options = {});

/// Runs h1 and h2 on one shared trajectory and returns {h1, h2}. The two
/// differ only in the extra type-2 streams of multiply mutated cells, so
/// h1's first type-2 never precedes h2's.
std::pair<SimOutcome, SimOutcome> simulate_coupled_h1_h2(
    const CryptConfig& config, RngStream& stream,
    const ExactOptions& options = {});

}  // namespace cryptsim
