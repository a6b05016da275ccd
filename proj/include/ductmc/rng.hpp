#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace ductmc {

// Philox4x32-10 counter-based generator. Every draw is a pure function of
// (key, counter), so particle streams can be raced across any number of
// worker threads without changing a single bit of output.
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);
};

namespace detail {
// 128-layer ziggurat tables for the standard normal; built once at startup.
// Layer width and rectangle threshold sit in one entry so the fast path
// touches a single cache line per draw.
struct ZigEntry {
  double wn;
  std::uint64_t kn;
};
struct ZigTables {
  ZigEntry entry[128];
  double fn[129];
  ZigTables();
};
extern const ZigTables kZig;
}  // namespace detail

// One logical random stream, identified by (global_seed, stream_id).
// The same pair yields the same variate sequence regardless of how many
// other streams exist or which thread consumes it. Blocks are generated
// in batches of four counters to keep the multiply pipeline busy; the
// output sequence is identical to one-block-at-a-time generation.
class RngStream {
 public:
  RngStream(std::uint64_t global_seed, std::uint64_t stream_id)
      : global_seed_(global_seed), stream_id_(stream_id) {}

  std::uint64_t next_u64() {
    if (buffer_used_ >= buffer_filled_) refill();
    return buffer_[std::size_t(buffer_used_++)];
  }

  double uniform() {  // [0, 1)
    return double(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_open() {  // (0, 1]
    return double((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via ziggurat over the Philox stream.
  double normal() {
    const std::uint64_t u = next_u64();
    const std::uint64_t mant = u >> 11;
    const detail::ZigEntry ze = detail::kZig.entry[u & 127u];
    const double x = double(mant) * ze.wn;
    if (mant < ze.kn) [[likely]] {
      // Branchless sign flip: bit 7 of the draw becomes the IEEE sign bit.
      const std::uint64_t sign = (u & 128u) << 56;
      return std::bit_cast<double>(std::bit_cast<std::uint64_t>(x) ^ sign);
    }
    return normal_overhang(u, x);
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t global_seed() const { return global_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();
  double normal_overhang(std::uint64_t u, double x);

  std::uint64_t global_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint64_t, 16> buffer_{};
  int buffer_used_ = 0;    // u64 halves consumed from buffer_
  int buffer_filled_ = 0;  // u64 halves available in buffer_
};

inline RngStream derive_stream(std::uint64_t global_seed, std::uint64_t stream_id) {
  return RngStream(global_seed, stream_id);
}

// Stream-id lanes. A particle or trial with index i owns the ids
// (i << 3) | lane, which keeps coupled sweeps (leak, degradation) on
// identical motion paths and keeps engine and link-layer draws disjoint.
namespace lanes {
inline constexpr std::uint64_t kMotion = 0;
inline constexpr std::uint64_t kLeak = 1;
inline constexpr std::uint64_t kChemistry = 2;
inline constexpr std::uint64_t kBits = 4;
inline constexpr std::uint64_t kReception = 5;
inline constexpr std::uint64_t kAux = 6;
}  // namespace lanes

inline std::uint64_t lane_stream(std::uint64_t index, std::uint64_t lane) {
  return (index << 3) | lane;
}

}  // namespace ductmc
