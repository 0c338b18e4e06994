#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "anneal/core/target.hpp"

namespace anneal {

struct KsdConfig {
  double beta = 0.5;  // IMQ exponent, base kernel (1 + |x-y|^2)^-beta
};

struct MmdConfig {
  double bandwidth = 1.0;  // Gaussian kernel exp(-|x-y|^2 / (2 h))
};

struct KlConfig {
  std::size_t k = 1;
};

struct OtConfig {
  double epsilon = 0.05;
  std::size_t max_iterations = 1000;
  double tolerance = 1e-4;  // L1 violation of the row marginal
  // Divide both sets by the reference's mean pairwise distance before solving.
  bool standardize = true;
};

struct MetricConfig {
  KsdConfig ksd;
  MmdConfig mmd;
  KlConfig kl;
  OtConfig ot;
  int jobs = 1;
};

void validate(const MetricConfig& cfg);

/// Kernel Stein discrepancy with an IMQ base kernel, V-statistic over all
/// n^2 pairs. `scores` holds the target score at each row of `cloud`.
/// Returns sqrt(max(0, KSD^2)).
double ksd(const Points& cloud, const Points& scores, const MetricConfig& cfg);
double ksd(const Points& cloud, const Target& target, const MetricConfig& cfg);
double ksd_squared(const Points& cloud, const Points& scores, const MetricConfig& cfg);

/// Gaussian-kernel MMD: within-set terms are U-statistics, the cross term a
/// V-statistic. Returns sqrt(max(0, MMD^2)).
double mmd(const Points& cloud, const Points& reference, const MetricConfig& cfg);

struct KlEstimate {
  double kl = 0.0;
  double rev_kl = 0.0;
  // Points dropped because a k-NN distance was zero (duplicates).
  std::size_t excluded = 0;
  std::size_t rev_excluded = 0;
};

/// k-nearest-neighbour divergence estimates from samples only:
/// KL ≈ (d/n) sum_i log(s_k(x_i) / r_k(x_i)) + log(m / (n - 1)).
KlEstimate knn_kl(const Points& cloud, const Points& reference, const MetricConfig& cfg);

struct SinkhornResult {
  double w2 = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  double marginal_error = 0.0;
  double epsilon = 0.0;
  double scale = 1.0;  // standardization factor applied to the data
};

/// Entropic OT with squared-Euclidean cost and uniform weights, solved with
/// log-domain Sinkhorn. Returns sqrt of the transport cost <P, C>.
SinkhornResult sinkhorn_w2(const Points& cloud, const Points& reference, const MetricConfig& cfg);

/// Mean pairwise Euclidean distance over distinct pairs.
double mean_pairwise_distance(const Points& points, int jobs = 1);

/// Nearest-mean assignment counts per component.
std::vector<std::size_t> mode_counts(const Points& cloud, const Mixture& gmm);

/// Multimodality score: RMS over modes of (count_m - w_m n).
double mms(const Points& cloud, const Mixture& gmm);

/// Number of components with at least one particle within `radius` Mahalanobis units of the mean.
std::size_t occupied_modes(const Points& cloud, const Mixture& gmm, double radius = 3.0);

}  // namespace anneal
