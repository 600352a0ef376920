#pragma once

#include <cstdint>
#include <random>

namespace vamsim {

// splitmix64 finalizer; used to turn arbitrary 64-bit inputs into
// well-mixed seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent consumers draw from separately seeded streams so that
// toggling one (e.g. channel losses) never shifts another's draws.
enum class RngStream : std::uint64_t {
  scenario = 0,  // generator jitter: reaction delays, arrival gaps
  channel = 1,   // per-(frame, receiver) loss draws
  check_phase = 2,  // per-node generation-check start offsets
};

inline std::uint64_t stream_seed(std::uint64_t master, RngStream stream) {
  return splitmix64(master + static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ull);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}
  Rng(std::uint64_t master, RngStream stream) : gen_(stream_seed(master, stream)) {}

  // uniform in [0, 1)
  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  }
  // uniform integer in [0, n)
  std::int64_t uniform_int(std::int64_t n) {
    return std::uniform_int_distribution<std::int64_t>(0, n - 1)(gen_);
  }
  // exponential with given rate (events per unit)
  double exponential(double rate) {
    return std::exponential_distribution<double>(rate)(gen_);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace vamsim
