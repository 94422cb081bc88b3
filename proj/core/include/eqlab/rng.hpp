#pragma once

#include <cstdint>
#include <random>

namespace eqlab {

// Seedable stream. (seed, stream_id) fully determines the variate sequence;
// distinct stream ids are decorrelated through a SplitMix64 finalizer before
// seeding the underlying Mersenne Twister.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Child stream for job `index`; counter-derived, independent of how many
  // variates the parent has produced.
  [[nodiscard]] RngStream split(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace eqlab
