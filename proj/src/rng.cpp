#include "crypt/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cryptsim {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  return static_cast<std::uint64_t>(p);
}

inline void philox_block(const std::array<std::uint64_t, 4>& ctr,
                         const std::array<std::uint64_t, 2>& key,
                         std::array<std::uint64_t, 4>& out) {
  std::uint64_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
  std::uint64_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, hi1;
    const std::uint64_t lo0 = mulhilo(kPhiloxM0, c0, hi0);
    const std::uint64_t lo1 = mulhilo(kPhiloxM1, c2, hi1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  out = {c0, c1, c2, c3};
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::array<std::uint64_t, 2> key, std::uint64_t replicate,
                     std::uint64_t substream)
    : key_(key), ctr_{0, 0, replicate, substream} {}

void RngStream::refill() {
  // Increment the 256-bit counter with carry, then encrypt it. Matches the
  // numpy Philox bit generator, which allows cross-checking raw output.
  for (int i = 0; i < 4; ++i) {
    if (++ctr_[i] != 0) break;
  }
  philox_block(ctr_, key_, buf_);
  buf_pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below: n must be nonzero");
  const unsigned __int128 p = static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint64_t>(p >> 64);
}

double RngStream::exp1() { return -std::log1p(-uniform()); }

double RngStream::exponential(double rate) {
  if (rate < 0) throw std::invalid_argument("exponential: negative rate");
  if (rate == 0) return std::numeric_limits<double>::infinity();
  return exp1() / rate;
}

RngStream RngStream::substream(std::uint64_t index) const {
  // Derive the child's substream id by mixing the parent id with the index.
  // Distinct (parent, index) pairs collide only with probability ~2^-64.
  std::uint64_t s = ctr_[3] ^ (0x9E3779B97F4A7C15ull * (index + 1));
  return RngStream(key_, ctr_[2], splitmix64(s));
}

RngStream derive_replicate_stream(std::uint64_t master_seed,
                                  std::uint64_t replicate_index) {
  std::uint64_t state = master_seed;
  const std::uint64_t k0 = splitmix64(state);
  const std::uint64_t k1 = splitmix64(state);
  return RngStream({k0, k1}, replicate_index, 0);
}

}  // namespace cryptsim
