#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "mist/matrix.hpp"

namespace mist::datagen {

/// Identifier of the generator + Gaussian transform written into instance
/// manifests. Bump when the draw sequence changes.
inline constexpr const char* kPrngId = "philox4x64-10/box-muller-v1";

/// Stream tags keep draws for different purposes decorrelated under one
/// user seed (they form the high key word).
enum StreamTag : std::uint64_t {
  kStreamDesign = 1,
  kStreamSpikes = 2,
  kStreamNoise = 3,
  kStreamSpectral = 4,
};

/// Philox4x64-10 counter-based generator (Salmon et al. constants).
/// Counter is pre-incremented per block, matching the numpy bit stream
/// for key {seed, stream}; fully portable, no platform-dependent state.
class Philox4x64 {
 public:
  explicit Philox4x64(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  std::uint64_t next() {
    if (pos_ == 4) block();
    return buf_[pos_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    const __uint128_t p = static_cast<__uint128_t>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  void block() {
    if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0)
      ++counter_[3];
    std::array<std::uint64_t, 4> c = counter_;
    std::array<std::uint64_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kM0, c[0], hi0, lo0);
      mulhilo(kM1, c[2], hi1, lo1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += kW0;
      k[1] += kW1;
    }
    buf_ = c;
    pos_ = 0;
  }

  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

/// Standard normal draws via Box-Muller on the Philox uniform stream.
/// The transform is pinned here so instances are bit-reproducible.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed, std::uint64_t stream = 0)
      : gen_(seed, stream) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = gen_.next_uniform();
    const double u2 = gen_.next_uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 always
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  Philox4x64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Uniform integer in [0, bound) by rejection, bias-free.
inline std::uint64_t next_below(Philox4x64& gen, std::uint64_t bound) {
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t v;
  do {
    v = gen.next();
  } while (v >= limit);
  return v % bound;
}

/// d x m design filled with iid standard normal draws.
inline DenseMatrix gen_design(std::size_t d, std::size_t m, std::uint64_t seed) {
  if (d == 0 || m == 0)
    throw std::invalid_argument("gen_design: dimensions must be >= 1");
  DenseMatrix a(d, m);
  GaussianStream g(seed, kStreamDesign);
  for (double& v : a.mutable_data()) v = g.next();
  return a;
}

/// Length-m signal with exactly n_spikes entries of magnitude one
/// (fair random signs) on a uniform random support, zeros elsewhere.
/// Positions come from a partial Fisher-Yates shuffle, then signs.
inline Vector gen_spikes(std::size_t m, std::size_t n_spikes, std::uint64_t seed) {
  if (n_spikes > m)
    throw std::invalid_argument("gen_spikes: n_spikes exceeds m");
  Philox4x64 gen(seed, kStreamSpikes);
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  for (std::size_t i = 0; i < n_spikes; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(next_below(gen, m - i));
    std::swap(idx[i], idx[j]);
  }
  Vector x(m, 0.0);
  for (std::size_t i = 0; i < n_spikes; ++i)
    x[idx[i]] = (gen.next() & 1) ? 1.0 : -1.0;
  return x;
}

/// y = A x + sigma * z with z iid standard normal.
inline Vector gen_observation(const DenseMatrix& a, const Vector& x,
                              double sigma, std::uint64_t seed) {
  if (sigma < 0.0)
    throw std::invalid_argument("gen_observation: sigma must be >= 0");
  Vector y = a.multiply(x);
  GaussianStream g(seed, kStreamNoise);
  for (double& v : y) v += sigma * g.next();
  return y;
}

/// SNR in dB: 10 log10(||A x||^2 / (sigma^2 d)).
inline double snr(const DenseMatrix& a, const Vector& x, double sigma) {
  if (sigma <= 0.0)
    throw std::invalid_argument("snr: sigma must be > 0");
  const double signal = norm_sq(a.multiply(x));
  const double d = static_cast<double>(a.rows());
  return 10.0 * std::log10(signal / (sigma * sigma * d));
}

/// Synthetic compressed-sensing experiment description.
struct ExperimentSpec {
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t n_spikes = 0;
  double sigma = 0.0;
  std::uint64_t seed = 1;
  std::size_t n_instances = 1;

  void validate() const {
    if (d == 0 || m == 0)
      throw std::invalid_argument("ExperimentSpec: dimensions must be >= 1");
    if (n_spikes > m)
      throw std::invalid_argument("ExperimentSpec: n_spikes exceeds m");
    if (sigma < 0.0)
      throw std::invalid_argument("ExperimentSpec: sigma must be >= 0");
    if (n_instances == 0)
      throw std::invalid_argument("ExperimentSpec: n_instances must be >= 1");
  }

  /// Full-size setup: 8192 x 16384, 150 unit spikes, sigma 3.
  static ExperimentSpec paper() {
    return {8192, 16384, 150, 3.0, 1, 1};
  }

  /// Desk-size equivalent: 512 x 1024, 15 spikes, sigma chosen so the
  /// expected SNR stays ~12 dB (sqrt(15 / 10^1.22)).
  static ExperimentSpec desk() {
    return {512, 1024, 15, std::sqrt(15.0 / std::pow(10.0, 1.22)), 1, 1};
  }
};

/// Per-instance seed: instance i of a spec reuses the user seed with the
/// instance index folded into the stream word by the generators' callers.
inline std::uint64_t instance_seed(std::uint64_t base_seed, std::size_t index) {
  // splitmix64 step keeps instance seeds well separated.
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace mist::datagen
