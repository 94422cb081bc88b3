#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eqlab/fixtures.hpp"
#include "eqlab/rng.hpp"
#include "eqlab/wavelet.hpp"

namespace eqlab {

// Everything that defines one experiment family: sizes n = 2^k,
// m0 = 2^k0, m1 = 2^k1, the fixture pair and the constant sigma used by the
// homoscedastic experiments.
struct ModelSpec {
  int k = 10;
  int k0 = 4;
  int k1 = 0;
  std::string mean_name = "zero";
  std::string logvar_name = "constant";
  FixtureParams params;
  double sigma = 1.0;

  Fixture fixture;
  HaarLadder mean_ladder;  // exact coefficients on levels [k0, k)

  [[nodiscard]] std::size_t n() const { return std::size_t{1} << k; }
  [[nodiscard]] int m0() const { return 1 << k0; }
  [[nodiscard]] int m1() const { return 1 << k1; }
  void validate() const;
  // Stable FNV-1a digest of the defining fields.
  [[nodiscard]] std::uint64_t hash() const;
};

// Builds the fixture, certifies it and fills the mean ladder.
[[nodiscard]] ModelSpec make_model_spec(const std::string& mean_name,
                                        const std::string& logvar_name, int k, int k0, int k1,
                                        const FixtureParams& params = {}, double sigma = 1.0);

// Integer k0 in [1, k - 1] closest to solving 2^k0 = n gamma_k0; ties go to
// the smaller level.
[[nodiscard]] int choose_coarse_level(const ClassSpec& cls, int k);

enum class Label { P, Pbar, Q, Ptilde, Qtilde, Pcheck, Qcheck };

[[nodiscard]] std::string_view label_name(Label l);
[[nodiscard]] Label parse_label(std::string_view s);

struct ExperimentDraw {
  Label label = Label::P;
  int k = 0;
  int k0 = 0;
  int k1 = 0;
  std::vector<double> y;          // regression samples, P and Pcheck
  HaarLadder coeffs;              // sequence coefficients
  std::vector<double> variances;  // V (one entry) or V_l (m1 entries)
  std::vector<double> dv;         // Qcheck: increments of V(t)
  std::vector<double> dy;         // Qcheck: increments of Y(t)
  std::vector<double> z;          // Qcheck: block multipliers Z_l
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct BlockLogVariances {
  std::vector<double> block;  // log sigma_l^2, m1 entries
  std::vector<double> cell;   // log sigma_bar_j^2, m0 entries
  std::vector<double> star;   // log sigma*_l^2, m1 entries
};

[[nodiscard]] BlockLogVariances block_log_variances(const ModelSpec& spec);

// Block l (1-based) containing the support of coefficient j (0-based) at
// level i >= k1.
[[nodiscard]] int coefficient_block(int level, int j, int k1);

// P (sigma constant) or Pcheck (sigma^2(t) = exp tau(t)).
[[nodiscard]] ExperimentDraw sample_regression(const ModelSpec& spec, bool heteroscedastic,
                                               RngStream& rng);
// Pbar (variance sigma^2 / n) or Ptilde (sigma_l^2 / n by support block).
[[nodiscard]] ExperimentDraw sample_sequence(const ModelSpec& spec, bool blocked, RngStream& rng);
// Q (one V) or Qtilde (m1 block statistics V_l), then conditional normals.
[[nodiscard]] ExperimentDraw sample_q(const ModelSpec& spec, bool blocked, RngStream& rng);

// Default process grid: max(2^12, 16 m1) cells.
[[nodiscard]] std::size_t default_process_cells(const ModelSpec& spec);
[[nodiscard]] ExperimentDraw sample_q_check(const ModelSpec& spec, std::size_t cells,
                                            RngStream& rng);

}  // namespace eqlab
