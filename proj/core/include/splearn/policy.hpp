#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "splearn/belief.hpp"
#include "splearn/feature_space.hpp"
#include "splearn/quantizer.hpp"

namespace splearn {

/// Every selection breaks score ties by the lexicographically smallest bit
/// pattern so replications are exactly reproducible.

/// argmax of theta' x over the candidates.
FeatureVector greedy_select(const KnowledgeState& state,
                            std::span<const FeatureVector> candidates);

/// Thompson sampling: rho ~ Gamma(a, rate b), theta_hat ~ N(theta, Sigma/rho)
/// through the symmetric PSD square root, then argmax of theta_hat' x.
/// Deterministic for a given seed.
FeatureVector ts_select(const KnowledgeState& state,
                        std::span<const FeatureVector> candidates,
                        std::uint64_t seed);

/// Thompson draw alone (rho_hat, theta_hat); exposed for diagnostics.
std::pair<double, Eigen::VectorXd> ts_draw(const KnowledgeState& state,
                                           std::uint64_t seed);

struct KgPointMax {
  double t = 0.0;       // quantization point
  FeatureVector argmax; // inner maximizer at this point
  double value = 0.0;   // max_y (p_y + q_y t)
};

/// One candidate's knowledge-gradient value with its per-point inner maxima:
/// nu = sum_j w_j max_y(p_y + q_y(x) t_j) - max_y p_y.
struct KgScoreBreakdown {
  FeatureVector x;
  double nu = 0.0;
  double baseline = 0.0;
  std::vector<KgPointMax> per_point;
};

/// Scores one candidate x against the inner candidate set, where
///   p_y = theta' y
///   q_y(x) = sqrt(b / (a (1 + x'(Sigma + Sigma_Theta) x))) * x' Sigma y.
/// The quantizer must match the state: quantizer.df == 2a to cache tolerance.
KgScoreBreakdown kg_score(const KnowledgeState& state, const FeatureVector& x,
                          const Quantizer& quantizer,
                          std::span<const FeatureVector> inner);

/// argmax of nu over `outer`, inner maximization over `inner`. The exact
/// enumeration policy passes the same set for both; the sampled variant
/// passes the fresh samples as outer and samples + greedy incumbent as inner.
/// The outer loop parallelizes across workers; the reduction is
/// deterministic.
std::pair<FeatureVector, KgScoreBreakdown> kg_select(
    const KnowledgeState& state, const Quantizer& quantizer,
    std::span<const FeatureVector> outer, std::span<const FeatureVector> inner,
    int workers = 1);

std::pair<FeatureVector, KgScoreBreakdown> kg_select(
    const KnowledgeState& state, const Quantizer& quantizer,
    std::span<const FeatureVector> candidates, int workers = 1);

/// Uniform choice among explicit candidates.
FeatureVector random_select(std::span<const FeatureVector> candidates,
                            std::uint64_t seed);

/// Uniform over the constrained space via rejection sampling.
FeatureVector random_select(const FeatureCatalog& catalog,
                            const ConstraintSet& constraints,
                            std::uint64_t seed);

}  // namespace splearn
