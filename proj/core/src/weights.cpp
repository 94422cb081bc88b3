#include "eqlab/weights.hpp"

#include <stdexcept>

namespace eqlab {

int WeightTable::block_of_cell(int cell) const {
  if (cell < 1 || cell > m0) throw std::out_of_range("WeightTable: cell index");
  return (cell - 1) / cells_per_block() + 1;
}

WeightTable make_weight_table(int m0, int m1) {
  if (m1 < 1 || m0 < 2 || m0 % m1 != 0 || (m0 / m1) % 2 != 0) {
    throw std::invalid_argument("weights: m0 / m1 must be an even integer");
  }
  WeightTable w;
  w.m0 = m0;
  w.m1 = m1;
  w.by_block.resize(static_cast<std::size_t>(m1));
  w.by_cell.resize(static_cast<std::size_t>(m0));
  const int q = m0 / m1;
  const int half = q / 2;
  const double inv_q = 1.0 / q;
  const auto add = [&](int block, int cell, double zeta) {
    const WeightEntry e{block, cell, zeta, zeta * inv_q};
    w.by_block[static_cast<std::size_t>(block - 1)].push_back(e);
    w.by_cell[static_cast<std::size_t>(cell - 1)].push_back(e);
  };
  for (int j = 1; j <= m0; ++j) {
    if (j <= half) {
      add(1, j, 1.0);
    } else if (j > m0 - half) {
      add(m1, j, 1.0);
    } else {
      const int ell = (j - half - 1) / q + 1;
      const int s = j - (ell - 1) * q - half;
      const double right = (2.0 * s - 1.0) / (2.0 * q);
      add(ell, j, 1.0 - right);
      add(ell + 1, j, right);
    }
  }
  return w;
}

std::vector<double> smoothed_cell_logs(const WeightTable& w, const std::vector<double>& block_logs) {
  if (block_logs.size() != static_cast<std::size_t>(w.m1)) {
    throw std::invalid_argument("smoothed_cell_logs: need m1 block values");
  }
  std::vector<double> out(static_cast<std::size_t>(w.m0), 0.0);
  // base + zeta * (other - base) keeps equal block values exactly unchanged.
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto& entries = w.by_cell[j];
    const double base = block_logs[static_cast<std::size_t>(entries.front().block - 1)];
    out[j] = base;
    for (std::size_t e = 1; e < entries.size(); ++e) {
      out[j] += entries[e].zeta * (block_logs[static_cast<std::size_t>(entries[e].block - 1)] - base);
    }
  }
  return out;
}

std::vector<double> recombined_block_logs(const WeightTable& w, const std::vector<double>& cell_logs) {
  if (cell_logs.size() != static_cast<std::size_t>(w.m0)) {
    throw std::invalid_argument("recombined_block_logs: need m0 cell values");
  }
  const int q = w.cells_per_block();
  std::vector<double> out(static_cast<std::size_t>(w.m1), 0.0);
  for (int ell = 0; ell < w.m1; ++ell) {
    const double base = cell_logs[static_cast<std::size_t>(ell * q)];
    double acc = 0.0;
    for (int s = 1; s < q; ++s) acc += cell_logs[static_cast<std::size_t>(ell * q + s)] - base;
    out[static_cast<std::size_t>(ell)] = base + acc / q;
  }
  return out;
}

}  // namespace eqlab
