#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace eqlab {

// Orthonormal Haar coefficients of a function on [0, 1] for levels
// k0 <= i < k. Index j (0-based here) refers to the support
// (j 2^-i, (j + 1) 2^-i]; psi is +1 on the left half.
struct HaarLadder {
  int coarse_level = 0;
  int fine_level = 0;
  std::vector<double> scaling;               // 2^k0 entries
  std::vector<std::vector<double>> wavelets;  // wavelets[i - k0] has 2^i entries

  [[nodiscard]] const std::vector<double>& level(int i) const;
  [[nodiscard]] std::vector<double>& level(int i);
  [[nodiscard]] std::size_t size() const;  // total coefficient count, 2^k
  void validate() const;
  // Wavelet coefficients flattened level-major (i ascending, then j).
  [[nodiscard]] std::vector<double> flatten_wavelets() const;
};

[[nodiscard]] HaarLadder make_zero_ladder(int coarse_level, int fine_level);
[[nodiscard]] HaarLadder ladder_from_flat(int coarse_level, int fine_level,
                                          const std::vector<double>& scaling,
                                          const std::vector<double>& flat_wavelets);

// Discrete orthonormal Haar pyramid. For samples y_i = f(i / n) the output
// divided by sqrt(n) approximates the continuous coefficients.
[[nodiscard]] HaarLadder haar_analyze(const std::vector<double>& signal, int coarse_level);
[[nodiscard]] std::vector<double> haar_synthesize(const HaarLadder& ladder);

enum class BesovNorm { L2, SupL1 };  // b(a,2,2) and b(a,inf,1)

[[nodiscard]] BesovNorm parse_besov_norm(std::string_view mode);  // "2,2" | "inf,1"

// Per-level summaries used by the Besov tails.
struct LevelStats {
  int level = 0;
  double sum_sq = 0.0;
  double max_abs = 0.0;
};

[[nodiscard]] std::vector<LevelStats> level_stats(const HaarLadder& ladder);

// (sum_{i >= from} 2^(2 a i) sum_j theta^2)^(1/2) for L2, and
// sum_{i >= from} 2^(i (a + 1/2)) max_j |theta| for SupL1.
[[nodiscard]] double besov_tail(const std::vector<LevelStats>& levels, double alpha,
                                BesovNorm mode, int from_level);
[[nodiscard]] double besov_tail(const HaarLadder& ladder, double alpha, BesovNorm mode,
                                int from_level);

[[nodiscard]] bool is_dyadic(std::size_t n) noexcept;
[[nodiscard]] int dyadic_log2(std::size_t n);

}  // namespace eqlab
