#pragma once

#include <cstdint>
#include <cmath>

namespace dap {

// Deterministic per-agent random stream. A master seed plus a stream id
// define the whole sequence, so runs reproduce bit-for-bit no matter how
// the work is scheduled. splitmix64 state advance, finalizer from the
// same family.
class RngStream {
 public:
  RngStream() : state_(mix(0xdeadbeefULL)) {}

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : state_(mix(master_seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [0, bound), bound >= 1; rejection-free modulo is fine here,
  // bounds are tiny compared to 2^64
  int next_int(int bound) {
    return static_cast<int>(next_u64() % static_cast<std::uint64_t>(bound));
  }

  // standard normal, Box-Muller (no library distributions: their output
  // is implementation-defined and we want portable determinism)
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 1e-300) u1 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dap
