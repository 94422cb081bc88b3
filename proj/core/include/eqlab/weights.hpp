#pragma once

#include <vector>

namespace eqlab {

// Half-block overlap weights between m1 variance blocks and m0 cells.
// Cells j (1-based) with (2l - 1)/(2 m1) < j/m0 <= (2l + 1)/(2 m1) split
// between blocks l and l + 1; cells within half a block of either end belong
// to the edge block alone.
struct WeightEntry {
  int block = 0;  // l, 1-based
  int cell = 0;   // j, 1-based
  double zeta = 0.0;
  double delta = 0.0;  // (m1 / m0) zeta
};

struct WeightTable {
  int m0 = 0;
  int m1 = 0;
  std::vector<std::vector<WeightEntry>> by_block;  // [l - 1]
  std::vector<std::vector<WeightEntry>> by_cell;   // [j - 1], one or two entries

  // Cells of J_l = { j : (l - 1)/m1 < j/m0 <= l/m1 }.
  [[nodiscard]] int block_of_cell(int cell) const;
  [[nodiscard]] int cells_per_block() const { return m0 / m1; }
};

// Throws unless m0 / m1 is an even integer and m1 >= 1.
[[nodiscard]] WeightTable make_weight_table(int m0, int m1);

// log sigma_bar_j^2 = sum over the cell's entries of zeta * log sigma_l^2.
[[nodiscard]] std::vector<double> smoothed_cell_logs(const WeightTable& w,
                                                     const std::vector<double>& block_logs);
// log sigma*_l^2 = average of log sigma_bar_j^2 over J_l.
[[nodiscard]] std::vector<double> recombined_block_logs(const WeightTable& w,
                                                        const std::vector<double>& cell_logs);

}  // namespace eqlab
