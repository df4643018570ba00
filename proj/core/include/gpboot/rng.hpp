// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace gpboot::rng {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every (seed, stream) pair addresses an independent sequence, so Monte
/// Carlo draws can be evaluated in any order, or in parallel, and still
/// reproduce the sequential result bit for bit. The counter advances within
/// a stream; the stream id is baked into the high counter words and the
/// seed into the key.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream) noexcept
      : counter_{0u, 0u, static_cast<std::uint32_t>(stream),
                 static_cast<std::uint32_t>(stream >> 32)},
        key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        pos_(4) {}

  std::uint32_t next_u32() noexcept {
    if (pos_ == 4) {
      block_ = encrypt(counter_, key_);
      if (++counter_[0] == 0u) ++counter_[1];
      pos_ = 0;
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform double in (0, 1], using the top 53 bits of one 64-bit word.
  double uniform() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1u) * 0x1.0p-53;
  }

  /// One full Philox block for a given counter/key, exposed for key
  /// derivation and known-answer tests.
  static std::array<std::uint32_t, 4> encrypt(
      std::array<std::uint32_t, 4> ctr,
      std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> block_{};
  int pos_;
};

/// Source of standard normal deviates. kl_sample and the Monte Carlo loops
/// only depend on this interface, which keeps them testable with forced
/// multiplier sequences.
class NormalSource {
 public:
  virtual ~NormalSource() = default;
  virtual double next() = 0;
};

/// Box-Muller transform over a Philox stream.
class GaussianStream final : public NormalSource {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : prng_(seed, stream) {}

  double next() override {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = prng_.uniform();
    const double u2 = prng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double uniform() { return prng_.uniform(); }

 private:
  Philox prng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Stream-id layout: purpose tag in the high 32 bits, loop index below.
/// Keeps concurrently used streams of one seed disjoint.
namespace tag {
inline constexpr std::uint64_t kKlDraw = 1;
inline constexpr std::uint64_t kData = 2;
inline constexpr std::uint64_t kProxy = 3;
inline constexpr std::uint64_t kNetPoint = 4;
inline constexpr std::uint64_t kNetProbe = 5;
inline constexpr std::uint64_t kRep = 6;
inline constexpr std::uint64_t kNoise = 7;
}  // namespace tag

inline constexpr std::uint64_t stream_id(std::uint64_t purpose,
                                         std::uint64_t index) noexcept {
  return (purpose << 32) | (index & 0xffffffffull);
}

/// Derives an independent 64-bit sub-seed, e.g. one per replication of a
/// nested experiment. One Philox evaluation keyed by the parent seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose,
                                 std::uint64_t index) noexcept {
  const auto block = Philox::encrypt(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(purpose >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return static_cast<std::uint64_t>(block[0]) |
         (static_cast<std::uint64_t>(block[1]) << 32);
}

}  // namespace gpboot::rng
