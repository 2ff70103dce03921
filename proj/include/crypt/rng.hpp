#pragma once

#include <array>
#include <cstdint>

namespace cryptsim {

/// splitmix64 step; advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Counter-based random stream (Philox4x64-10, Random123 constants, numpy
/// block convention: the 256-bit counter is incremented before each block).
///
/// A stream is identified by (key, counter words 2..3). Word 2 carries the
/// replicate index and word 3 a substream id, so replicate streams and their
/// substreams never overlap while fewer than 2^64 blocks are consumed. All
/// outputs are pure functions of 64-bit integers; no floating-point state is
/// carried between draws, which keeps results identical across platforms and
/// thread schedules.
class RngStream {
 public:
  RngStream(std::array<std::uint64_t, 2> key, std::uint64_t replicate,
            std::uint64_t substream = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in {0, .., n-1}; n must be nonzero.
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard exponential, computed as -log1p(-u).
  double exp1();

  /// Exponential with the given rate; rate 0 yields +infinity.
  double exponential(double rate);

  /// Independent child stream. Children of one parent are mutually
  /// independent and independent of the parent's own continuation.
  RngStream substream(std::uint64_t index) const;

  std::array<std::uint64_t, 2> key() const { return key_; }
  std::array<std::uint64_t, 4> counter() const { return ctr_; }

 private:
  void refill();

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;
};

/// Stream for one replicate of an ensemble: the key is derived from the
/// master seed by two splitmix64 steps and the replicate index selects the
/// counter block, so any replicate can be reproduced in isolation.
RngStream derive_replicate_stream(std::uint64_t master_seed,
                                  std::uint64_t replicate_index);

}  // namespace cryptsim
