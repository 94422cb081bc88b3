#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "eqlab/experiments.hpp"

namespace eqlab {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
[[nodiscard]] double kolmogorov_survival(double lambda);

// Asymptotic p-values with the Stephens small-sample correction.
[[nodiscard]] KsResult ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
[[nodiscard]] KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct AucResult {
  double auc = 0.5;
  double se = 0.0;
  double lo = 0.5;
  double hi = 0.5;
};

// Mann-Whitney AUC = P(score_pos > score_neg) + P(tie) / 2, with the
// Hanley-McNeil standard error and a normal interval.
[[nodiscard]] AucResult mann_whitney_auc(const std::vector<double>& pos,
                                         const std::vector<double>& neg, double z = 1.96);

// AdaBoost over decision stumps.
class StumpEnsemble {
 public:
  struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    double sign = 1.0;  // +1: predict positive above the threshold
    double weight = 0.0;
  };

  void fit(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels, int rounds);
  [[nodiscard]] double score(const std::vector<double>& row) const;
  [[nodiscard]] const std::vector<Stump>& stumps() const { return stumps_; }

 private:
  std::vector<Stump> stumps_;
};

// Trains on even-indexed rows of each sample and scores the odd-indexed ones.
[[nodiscard]] AucResult classifier_auc(const std::vector<std::vector<double>>& a,
                                       const std::vector<std::vector<double>>& b, int rounds = 40);

struct FeatureRow {
  std::vector<std::string> names;
  std::vector<double> values;
};

// Shape-dependent summaries of a draw: energies, leading coordinates,
// variance statistics, quadratic variation.
[[nodiscard]] FeatureRow summary_features(const ExperimentDraw& d);

struct TwoSampleReport {
  std::vector<std::string> names;
  std::vector<KsResult> ks;
  std::vector<double> mean_diff;  // coupled minus native, per feature
  double max_cov_diff = 0.0;      // largest entrywise covariance gap
  AucResult auc;
  [[nodiscard]] double min_p() const;
  // Every marginal passes at family level `alpha` (Bonferroni).
  [[nodiscard]] bool marginals_pass(double alpha = 1e-3) const;
};

[[nodiscard]] TwoSampleReport two_sample_report(const std::vector<ExperimentDraw>& coupled,
                                                const std::vector<ExperimentDraw>& native,
                                                int rounds = 40);
// Same from precomputed feature rows.
[[nodiscard]] TwoSampleReport two_sample_report(const std::vector<FeatureRow>& coupled,
                                                const std::vector<FeatureRow>& native,
                                                int rounds = 40);

}  // namespace eqlab
