#include "ductmc/rng.hpp"

#include <cmath>

namespace ductmc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x,
                         const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = std::uint64_t(kMul0) * x[0];
  const std::uint64_t p1 = std::uint64_t(kMul1) * x[2];
  const std::uint32_t hi0 = std::uint32_t(p0 >> 32);
  const std::uint32_t lo0 = std::uint32_t(p0);
  const std::uint32_t hi1 = std::uint32_t(p1 >> 32);
  const std::uint32_t lo1 = std::uint32_t(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

constexpr double kZigR = 3.442619855899;

}  // namespace

namespace detail {

// Layer rectangles all have area kV; the base layer folds the tail in via
// the pseudo width x0 = kV / f(kR). kn is the integer rectangle test on
// the 53-bit mantissa.
ZigTables::ZigTables() {
  constexpr double kV = 9.91256303526217e-3;
  double x[129];
  x[1] = kZigR;
  x[0] = kV / std::exp(-0.5 * kZigR * kZigR);
  double y = std::exp(-0.5 * kZigR * kZigR);
  for (int i = 2; i <= 127; ++i) {
    y += kV / x[i - 1];
    x[i] = std::sqrt(-2.0 * std::log(y));
  }
  x[128] = 0.0;
  fn[0] = std::exp(-0.5 * x[0] * x[0]);
  for (int i = 1; i <= 127; ++i) fn[i] = std::exp(-0.5 * x[i] * x[i]);
  fn[128] = 1.0;
  for (int i = 0; i < 128; ++i) {
    entry[i].wn = x[i] * 0x1.0p-53;
    entry[i].kn = std::uint64_t((x[i + 1] / x[i]) * 0x1.0p53);
  }
}

const ZigTables kZig;

}  // namespace detail

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r != 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    philox_round(counter, key);
  }
  return counter;
}

void RngStream::refill() {
  const std::array<std::uint32_t, 2> key0 = {std::uint32_t(global_seed_),
                                             std::uint32_t(global_seed_ >> 32)};
  // Short-lived streams (a handful of draws) stay on single blocks; hot
  // streams escalate to four interleaved counters per batch so the ten
  // rounds of multiplies pipeline across independent blocks.
  if (block_index_ < 2) {
    const std::array<std::uint32_t, 4> out = Philox4x32::block(
        {std::uint32_t(block_index_), std::uint32_t(block_index_ >> 32),
         std::uint32_t(stream_id_), std::uint32_t(stream_id_ >> 32)},
        key0);
    buffer_[0] = std::uint64_t(out[0]) | (std::uint64_t(out[1]) << 32);
    buffer_[1] = std::uint64_t(out[2]) | (std::uint64_t(out[3]) << 32);
    ++block_index_;
    buffer_used_ = 0;
    buffer_filled_ = 2;
    return;
  }
  std::array<std::uint32_t, 4> x[4];
  for (std::uint64_t l = 0; l < 4; ++l) {
    const std::uint64_t bi = block_index_ + l;
    x[l] = {std::uint32_t(bi), std::uint32_t(bi >> 32), std::uint32_t(stream_id_),
            std::uint32_t(stream_id_ >> 32)};
  }
  std::array<std::uint32_t, 2> key = key0;
  for (int r = 0; r < 10; ++r) {
    if (r != 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    philox_round(x[0], key);
    philox_round(x[1], key);
    philox_round(x[2], key);
    philox_round(x[3], key);
  }
  for (int l = 0; l < 4; ++l) {
    buffer_[std::size_t(2 * l)] =
        std::uint64_t(x[l][0]) | (std::uint64_t(x[l][1]) << 32);
    buffer_[std::size_t(2 * l + 1)] =
        std::uint64_t(x[l][2]) | (std::uint64_t(x[l][3]) << 32);
  }
  block_index_ += 4;
  buffer_used_ = 0;
  buffer_filled_ = 8;
}

// Ziggurat slow path: the draw u landed outside layer idx's inner
// rectangle at abscissa x. Resolve the overhang (or tail for the base
// layer), resampling until a value is accepted.
double RngStream::normal_overhang(std::uint64_t u, double x) {
  const detail::ZigTables& z = detail::kZig;
  for (;;) {
    const int idx = int(u & 127u);
    if (idx == 0) {
      // Tail beyond kZigR: exponential envelope, rejected against the
      // Gaussian.
      double ex, ey;
      do {
        ex = -std::log(uniform_open()) / kZigR;
        ey = -std::log(uniform_open());
      } while (ey + ey < ex * ex);
      const double t = kZigR + ex;
      return (u & 128u) ? -t : t;
    }
    const double y = z.fn[idx] + uniform() * (z.fn[idx + 1] - z.fn[idx]);
    if (y < std::exp(-0.5 * x * x)) return (u & 128u) ? -x : x;
    u = next_u64();
    const std::uint64_t mant = u >> 11;
    const detail::ZigEntry ze = z.entry[u & 127u];
    x = double(mant) * ze.wn;
    if (mant < ze.kn) return (u & 128u) ? -x : x;
  }
}

}  // namespace ductmc
