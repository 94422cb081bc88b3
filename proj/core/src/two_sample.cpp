#include "eqlab/two_sample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace eqlab {
namespace {

double stephens_p(double d, double ne) {
  const double root = std::sqrt(ne);
  return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double mean_sq_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Dual theta series; converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf) {
  if (x.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return {d, stephens_p(d, n), x.size(), 0};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return {d, stephens_p(d, na * nb / (na + nb)), a.size(), b.size()};
}

AucResult mann_whitney_auc(const std::vector<double>& pos, const std::vector<double>& neg, double z) {
  if (pos.empty() || neg.empty()) throw std::invalid_argument("mann_whitney_auc: empty sample");
  struct Item {
    double s;
    bool positive;
  };
  std::vector<Item> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.push_back({s, true});
  for (double s : neg) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Item& x, const Item& y) { return x.s < y.s; });
  // U = sum over positives of (#negatives below + #negatives tied / 2).
  double u = 0.0;
  double neg_below = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    double p_tied = 0.0;
    double n_tied = 0.0;
    while (j < all.size() && all[j].s == all[i].s) {
      (all[j].positive ? p_tied : n_tied) += 1.0;
      ++j;
    }
    u += p_tied * (neg_below + 0.5 * n_tied);
    neg_below += n_tied;
    i = j;
  }
  const double n1 = static_cast<double>(pos.size());
  const double n2 = static_cast<double>(neg.size());
  AucResult r;
  r.auc = u / (n1 * n2);
  const double a = r.auc;
  const double q1 = a / (2.0 - a);
  const double q2 = 2.0 * a * a / (1.0 + a);
  const double var = (a * (1.0 - a) + (n1 - 1.0) * (q1 - a * a) + (n2 - 1.0) * (q2 - a * a)) / (n1 * n2);
  r.se = std::sqrt(std::max(var, 0.0));
  r.lo = a - z * r.se;
  r.hi = a + z * r.se;
  return r;
}

void StumpEnsemble::fit(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                        int rounds) {
  stumps_.clear();
  const std::size_t n = rows.size();
  if (n == 0 || labels.size() != n) throw std::invalid_argument("StumpEnsemble: bad training set");
  const std::size_t d = rows.front().size();
  std::vector<std::vector<std::size_t>> order(d, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t x, std::size_t y) { return rows[x][f] < rows[y][f]; });
  }
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  for (int round = 0; round < rounds; ++round) {
    // Weighted error of "positive above threshold": positives at or below
    // plus negatives above. Scan each sorted feature.
    double total_pos = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] > 0) total_pos += w[i];
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const double total_neg = total - total_pos;
    Stump best;
    double best_err = 0.5 * total;
    bool found = false;
    for (std::size_t f = 0; f < d; ++f) {
      double pos_below = 0.0;
      double neg_below = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = order[f][r];
        (labels[i] > 0 ? pos_below : neg_below) += w[i];
        if (r + 1 < n && rows[order[f][r + 1]][f] == rows[i][f]) continue;
        const double err_up = pos_below + (total_neg - neg_below);
        const double err_down = total - err_up;
        const double thr = r + 1 < n ? 0.5 * (rows[i][f] + rows[order[f][r + 1]][f]) : rows[i][f];
        if (err_up < best_err) {
          best_err = err_up;
          best = {f, thr, 1.0, 0.0};
          found = true;
        }
        if (err_down < best_err) {
          best_err = err_down;
          best = {f, thr, -1.0, 0.0};
          found = true;
        }
      }
    }
    if (!found) break;
    const double eps = std::clamp(best_err / total, 1e-12, 1.0 - 1e-12);
    best.weight = 0.5 * std::log((1.0 - eps) / eps);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = (rows[i][best.feature] > best.threshold ? 1.0 : -1.0) * best.sign;
      const double y = labels[i] > 0 ? 1.0 : -1.0;
      w[i] *= std::exp(-best.weight * y * h);
    }
    stumps_.push_back(best);
  }
}

double StumpEnsemble::score(const std::vector<double>& row) const {
  double s = 0.0;
  for (const auto& st : stumps_) s += st.weight * st.sign * (row[st.feature] > st.threshold ? 1.0 : -1.0);
  return s;
}

AucResult classifier_auc(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                         int rounds) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("classifier_auc: need two rows per sample");
  std::vector<std::vector<double>> train;
  std::vector<int> labels;
  for (std::size_t i = 0; i < a.size(); i += 2) {
    train.push_back(a[i]);
    labels.push_back(1);
  }
  for (std::size_t i = 0; i < b.size(); i += 2) {
    train.push_back(b[i]);
    labels.push_back(-1);
  }
  StumpEnsemble model;
  model.fit(train, labels, rounds);
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 1; i < a.size(); i += 2) pos.push_back(model.score(a[i]));
  for (std::size_t i = 1; i < b.size(); i += 2) neg.push_back(model.score(b[i]));
  return mann_whitney_auc(pos, neg);
}

FeatureRow summary_features(const ExperimentDraw& d) {
  FeatureRow r;
  const auto add = [&](const char* name, double v) {
    r.names.emplace_back(name);
    r.values.push_back(v);
  };
  const double n = static_cast<double>(std::size_t{1} << d.k);
  const double root_n = std::sqrt(n);
  if (!d.coeffs.scaling.empty()) {
    const auto w = d.coeffs.flatten_wavelets();
    const double w2 = mean_sq_of(w);
    double w4 = 0.0;
    for (double x : w) w4 += x * x * x * x;
    w4 /= static_cast<double>(std::max<std::size_t>(w.size(), 1));
    add("wavelet_energy", n * w2);
    add("wavelet_kurtosis", w2 > 0.0 ? w4 / (w2 * w2) : 0.0);
    add("scaling_energy", n * mean_sq_of(d.coeffs.scaling));
    add("scaling_mean", root_n * mean_of(d.coeffs.scaling));
    add("first_scaling", root_n * d.coeffs.scaling.front());
    add("first_wavelet", w.empty() ? 0.0 : root_n * w.front());
    add("last_wavelet", w.empty() ? 0.0 : root_n * w.back());
  }
  if (!d.variances.empty()) add("variance_stat", mean_of(d.variances));
  if (!d.y.empty()) {
    double lag = 0.0;
    for (std::size_t i = 1; i < d.y.size(); ++i) lag += d.y[i] * d.y[i - 1];
    add("y_mean", mean_of(d.y));
    add("y_mean_sq", mean_sq_of(d.y));
    add("y_first", d.y.front());
    add("y_last", d.y.back());
    add("y_lag1", lag / static_cast<double>(d.y.size()));
  }
  if (!d.dv.empty()) {
    add("v_total", std::accumulate(d.dv.begin(), d.dv.end(), 0.0));
    add("v_qv", n * mean_sq_of(d.dv) * static_cast<double>(d.dv.size()));
  }
  if (!d.dy.empty()) {
    add("y_total", std::accumulate(d.dy.begin(), d.dy.end(), 0.0));
    add("y_qv", n * mean_sq_of(d.dy) * static_cast<double>(d.dy.size()));
  }
  return r;
}

double TwoSampleReport::min_p() const {
  double p = 1.0;
  for (const auto& k : ks) p = std::min(p, k.p_value);
  return p;
}

bool TwoSampleReport::marginals_pass(double alpha) const {
  if (ks.empty()) return true;
  return min_p() > alpha / static_cast<double>(ks.size());
}

TwoSampleReport two_sample_report(const std::vector<FeatureRow>& coupled, const std::vector<FeatureRow>& native,
                                  int rounds) {
  if (coupled.empty() || native.empty()) throw std::invalid_argument("two_sample_report: empty sample");
  const auto& names = coupled.front().names;
  for (const auto* set : {&coupled, &native}) {
    for (const auto& row : *set) {
      if (row.names != names) throw std::invalid_argument("two_sample_report: shape mismatch");
    }
  }
  TwoSampleReport rep;
  rep.names = names;
  const std::size_t d = names.size();
  std::vector<std::vector<double>> a(coupled.size());
  std::vector<std::vector<double>> b(native.size());
  for (std::size_t i = 0; i < coupled.size(); ++i) a[i] = coupled[i].values;
  for (std::size_t i = 0; i < native.size(); ++i) b[i] = native[i].values;
  const auto column = [](const std::vector<std::vector<double>>& rows, std::size_t f) {
    std::vector<double> c(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) c[i] = rows[i][f];
    return c;
  };
  std::vector<double> ma(d);
  std::vector<double> mb(d);
  for (std::size_t f = 0; f < d; ++f) {
    const auto ca = column(a, f);
    const auto cb = column(b, f);
    rep.ks.push_back(ks_two_sample(ca, cb));
    ma[f] = mean_of(ca);
    mb[f] = mean_of(cb);
    rep.mean_diff.push_back(ma[f] - mb[f]);
  }
  const auto cov = [&](const std::vector<std::vector<double>>& rows, const std::vector<double>& m,
                       std::size_t f, std::size_t g) {
    double s = 0.0;
    for (const auto& r : rows) s += (r[f] - m[f]) * (r[g] - m[g]);
    return s / static_cast<double>(rows.size());
  };
  for (std::size_t f = 0; f < d; ++f) {
    for (std::size_t g = f; g < d; ++g) {
      rep.max_cov_diff = std::max(rep.max_cov_diff, std::abs(cov(a, ma, f, g) - cov(b, mb, f, g)));
    }
  }
  if (a.size() >= 2 && b.size() >= 2) rep.auc = classifier_auc(a, b, rounds);
  return rep;
}

TwoSampleReport two_sample_report(const std::vector<ExperimentDraw>& coupled,
                                  const std::vector<ExperimentDraw>& native, int rounds) {
  std::vector<FeatureRow> a;
  std::vector<FeatureRow> b;
  for (const auto& d : coupled) a.push_back(summary_features(d));
  for (const auto& d : native) b.push_back(summary_features(d));
  return two_sample_report(a, b, rounds);
}

}  // namespace eqlab
