#pragma once

#include <Eigen/Core>
#include <memory>

#include "splearn/feature_space.hpp"

namespace splearn {

/// Logit link between (0,1) scores and unbounded utilities. Scores are
/// clipped into [clip, 1-clip] first: small validation sets can return
/// exactly 0 or 1, which the link cannot represent.
double logit(double u, double clip = 1e-4);
double sigmoid(double z);

/// Hyperparameters of the Normal-Gamma belief over (mu_Theta, rho), plus the
/// fixed coefficient covariance scale Sigma_Theta of the utility model.
struct PriorSpec {
  Eigen::VectorXd theta0;       // prior mean of the coefficient means
  Eigen::MatrixXd sigma0;       // prior covariance scale of the coefficient means
  double a0 = 2.0;              // Gamma shape; must exceed 1 so that the
                                // predictive t has finite variance
  double b0 = 2.0;              // Gamma rate
  Eigen::MatrixXd sigma_theta;  // fixed covariance scale of Theta around mu_Theta
  double score_clip = 1e-4;

  int dimension() const { return static_cast<int>(theta0.size()); }

  /// theta0 = 0, sigma0 = I, a0 = 2, b0 = 2, sigma_theta = 0.
  static PriorSpec standard(int dimension);

  /// Throws listing the first failed check (symmetry within 1e-12,
  /// eigenvalues >= -1e-10, a0 > 1, b0 > 0, consistent dimensions).
  void validate() const;
};

/// One scored prompt representation: the vector, the raw score and its logit.
struct Observation {
  FeatureVector x;
  double u = 0.0;
  double z = 0.0;

  static Observation from_score(FeatureVector x, double u, double clip = 1e-4);
};

/// The belief state S_n = (theta_n, Sigma_n, a_n, b_n) after n observations.
/// Immutable value type: updated() returns the successor state. Sigma_Theta
/// rides along as shared immutable context because the update and the
/// selection policies both need it.
class KnowledgeState {
 public:
  static KnowledgeState init(const PriorSpec& prior);

  /// One step of the exact conjugate recursion. With
  ///   d = 1 + x'(Sigma + Sigma_Theta)x  and  r = z - theta'x:
  ///   theta  += (r/d) Sigma x
  ///   Sigma  -= (Sigma x x' Sigma)/d      (then re-symmetrized)
  ///   a      += 1/2
  ///   b      += r^2 / (2d)
  KnowledgeState updated(const Observation& obs) const;

  /// Posterior mean utility theta' x.
  double mean_utility(const FeatureVector& x) const;

  const Eigen::VectorXd& theta() const { return theta_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  double a() const { return a_; }
  double b() const { return b_; }
  int n() const { return n_; }
  const Eigen::MatrixXd& sigma_theta() const { return *sigma_theta_; }
  double score_clip() const { return score_clip_; }
  int dimension() const { return static_cast<int>(theta_.size()); }

 private:
  KnowledgeState() = default;

  Eigen::VectorXd theta_;
  Eigen::MatrixXd sigma_;
  double a_ = 0.0;
  double b_ = 0.0;
  int n_ = 0;
  std::shared_ptr<const Eigen::MatrixXd> sigma_theta_;
  double score_clip_ = 1e-4;
};

}  // namespace splearn
