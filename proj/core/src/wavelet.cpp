#include "eqlab/wavelet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eqlab {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

bool is_dyadic(std::size_t n) noexcept { return n != 0 && std::has_single_bit(n); }

int dyadic_log2(std::size_t n) {
  if (!is_dyadic(n)) throw std::invalid_argument("length " + std::to_string(n) + " is not dyadic");
  return std::bit_width(n) - 1;
}

const std::vector<double>& HaarLadder::level(int i) const {
  if (i < coarse_level || i >= fine_level) throw std::out_of_range("HaarLadder: level");
  return wavelets[static_cast<std::size_t>(i - coarse_level)];
}

std::vector<double>& HaarLadder::level(int i) {
  if (i < coarse_level || i >= fine_level) throw std::out_of_range("HaarLadder: level");
  return wavelets[static_cast<std::size_t>(i - coarse_level)];
}

std::size_t HaarLadder::size() const { return std::size_t{1} << fine_level; }

void HaarLadder::validate() const {
  if (coarse_level < 0 || coarse_level > fine_level || fine_level > 30) {
    throw std::invalid_argument("HaarLadder: need 0 <= k0 <= k <= 30");
  }
  if (scaling.size() != (std::size_t{1} << coarse_level)) {
    throw std::invalid_argument("HaarLadder: scaling length must be 2^k0");
  }
  if (wavelets.size() != static_cast<std::size_t>(fine_level - coarse_level)) {
    throw std::invalid_argument("HaarLadder: level count mismatch");
  }
  for (int i = coarse_level; i < fine_level; ++i) {
    if (level(i).size() != (std::size_t{1} << i)) {
      throw std::invalid_argument("HaarLadder: level " + std::to_string(i) + " must hold 2^i");
    }
  }
}

std::vector<double> HaarLadder::flatten_wavelets() const {
  std::vector<double> out;
  out.reserve(size() - scaling.size());
  for (const auto& w : wavelets) out.insert(out.end(), w.begin(), w.end());
  return out;
}

HaarLadder make_zero_ladder(int coarse_level, int fine_level) {
  HaarLadder l;
  l.coarse_level = coarse_level;
  l.fine_level = fine_level;
  if (coarse_level < 0 || coarse_level > fine_level || fine_level > 30) {
    throw std::invalid_argument("make_zero_ladder: need 0 <= k0 <= k <= 30");
  }
  l.scaling.assign(std::size_t{1} << coarse_level, 0.0);
  for (int i = coarse_level; i < fine_level; ++i) l.wavelets.emplace_back(std::size_t{1} << i, 0.0);
  return l;
}

HaarLadder ladder_from_flat(int coarse_level, int fine_level, const std::vector<double>& scaling,
                            const std::vector<double>& flat_wavelets) {
  HaarLadder l = make_zero_ladder(coarse_level, fine_level);
  if (scaling.size() != l.scaling.size() ||
      flat_wavelets.size() != l.size() - l.scaling.size()) {
    throw std::invalid_argument("ladder_from_flat: shape mismatch");
  }
  l.scaling = scaling;
  auto it = flat_wavelets.begin();
  for (auto& w : l.wavelets) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(w.size()), w.begin());
    it += static_cast<std::ptrdiff_t>(w.size());
  }
  return l;
}

HaarLadder haar_analyze(const std::vector<double>& signal, int coarse_level) {
  const int k = dyadic_log2(signal.size());
  if (coarse_level < 0 || coarse_level > k) {
    throw std::invalid_argument("haar_analyze: coarse level must lie in [0, k]");
  }
  HaarLadder out = make_zero_ladder(coarse_level, k);
  std::vector<double> approx = signal;
  for (int i = k - 1; i >= coarse_level; --i) {
    const std::size_t half = std::size_t{1} << i;
    auto& detail = out.level(i);
    for (std::size_t j = 0; j < half; ++j) {
      const double a = approx[2 * j];
      const double b = approx[2 * j + 1];
      approx[j] = (a + b) * kInvSqrt2;
      detail[j] = (a - b) * kInvSqrt2;
    }
    approx.resize(half);
  }
  out.scaling = std::move(approx);
  return out;
}

std::vector<double> haar_synthesize(const HaarLadder& ladder) {
  ladder.validate();
  std::vector<double> approx = ladder.scaling;
  approx.reserve(ladder.size());
  for (int i = ladder.coarse_level; i < ladder.fine_level; ++i) {
    const auto& detail = ladder.level(i);
    const std::size_t half = std::size_t{1} << i;
    std::vector<double> next(2 * half);
    for (std::size_t j = 0; j < half; ++j) {
      next[2 * j] = (approx[j] + detail[j]) * kInvSqrt2;
      next[2 * j + 1] = (approx[j] - detail[j]) * kInvSqrt2;
    }
    approx = std::move(next);
  }
  return approx;
}

BesovNorm parse_besov_norm(std::string_view mode) {
  if (mode == "2,2") return BesovNorm::L2;
  if (mode == "inf,1") return BesovNorm::SupL1;
  throw std::invalid_argument("unknown Besov mode '" + std::string(mode) + "'");
}

std::vector<LevelStats> level_stats(const HaarLadder& ladder) {
  std::vector<LevelStats> out;
  for (int i = ladder.coarse_level; i < ladder.fine_level; ++i) {
    LevelStats s{i, 0.0, 0.0};
    for (double t : ladder.level(i)) {
      s.sum_sq += t * t;
      s.max_abs = std::max(s.max_abs, std::abs(t));
    }
    out.push_back(s);
  }
  return out;
}

double besov_tail(const std::vector<LevelStats>& levels, double alpha, BesovNorm mode,
                  int from_level) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("besov_tail: alpha out of (0, 1]");
  double acc = 0.0;
  for (const auto& s : levels) {
    if (s.level < from_level) continue;
    if (mode == BesovNorm::L2) {
      acc += std::exp2(2.0 * alpha * s.level) * s.sum_sq;
    } else {
      acc += std::exp2(s.level * (alpha + 0.5)) * s.max_abs;
    }
  }
  return mode == BesovNorm::L2 ? std::sqrt(acc) : acc;
}

double besov_tail(const HaarLadder& ladder, double alpha, BesovNorm mode, int from_level) {
  return besov_tail(level_stats(ladder), alpha, mode, from_level);
}

}  // namespace eqlab
