#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace imrl {

/// Seedable random stream. Every distribution is implemented here on top of
/// the raw 64-bit engine output so sequences do not depend on the standard
/// library's distribution implementations, and the full state is the engine
/// state (no cached normals).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream for a named concern ("env", "replay", ...) derived
  /// from a master seed. Streams with different names do not share draws.
  static Rng derive(std::uint64_t master_seed, std::string_view stream);
  static std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal();

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  std::string state() const;
  void set_state(const std::string& text);

  bool operator==(const Rng& other) const { return engine_ == other.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace imrl
