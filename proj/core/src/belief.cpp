#include "splearn/belief.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace splearn {

double logit(double u, double clip) {
  if (!std::isfinite(u)) throw std::invalid_argument("logit: non-finite score");
  const double c = std::min(std::max(u, clip), 1.0 - clip);
  return std::log(c / (1.0 - c));
}

double sigmoid(double z) {
  if (!std::isfinite(z)) throw std::invalid_argument("sigmoid: non-finite input");
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

void check_psd(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(name) + " is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(name) + " is not symmetric within 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale)
    throw std::invalid_argument(std::string(name) + " has an eigenvalue below -1e-10");
}

}  // namespace

PriorSpec PriorSpec::standard(int dimension) {
  PriorSpec p;
  p.theta0 = Eigen::VectorXd::Zero(dimension);
  p.sigma0 = Eigen::MatrixXd::Identity(dimension, dimension);
  p.a0 = 2.0;
  p.b0 = 2.0;
  p.sigma_theta = Eigen::MatrixXd::Zero(dimension, dimension);
  return p;
}

void PriorSpec::validate() const {
  const int d = dimension();
  if (d < 1) throw std::invalid_argument("prior: empty theta0");
  if (sigma0.rows() != d || sigma0.cols() != d)
    throw std::invalid_argument("prior: sigma0 dimension mismatch");
  if (sigma_theta.rows() != d || sigma_theta.cols() != d)
    throw std::invalid_argument("prior: sigma_theta dimension mismatch");
  if (!(a0 > 1.0))
    throw std::invalid_argument(
        "prior: a0 must exceed 1 (the predictive t needs finite variance)");
  if (!(b0 > 0.0)) throw std::invalid_argument("prior: b0 must be positive");
  if (!(score_clip > 0.0) || !(score_clip < 0.5))
    throw std::invalid_argument("prior: score_clip must lie in (0, 0.5)");
  check_psd(sigma0, "prior: sigma0");
  check_psd(sigma_theta, "prior: sigma_theta");
}

Observation Observation::from_score(FeatureVector x, double u, double clip) {
  Observation o;
  o.x = std::move(x);
  o.u = u;
  o.z = logit(u, clip);
  return o;
}

KnowledgeState KnowledgeState::init(const PriorSpec& prior) {
  prior.validate();
  KnowledgeState s;
  s.theta_ = prior.theta0;
  s.sigma_ = prior.sigma0;
  s.a_ = prior.a0;
  s.b_ = prior.b0;
  s.n_ = 0;
  s.sigma_theta_ = std::make_shared<Eigen::MatrixXd>(prior.sigma_theta);
  s.score_clip_ = prior.score_clip;
  return s;
}

KnowledgeState KnowledgeState::updated(const Observation& obs) const {
  if (obs.x.size() != dimension())
    throw std::invalid_argument("update: observation dimension mismatch");
  if (!std::isfinite(obs.z))
    throw std::invalid_argument("update: non-finite logit score");

  const double d = 1.0 + quad_form(sigma_, obs.x) + quad_form(*sigma_theta_, obs.x);
  if (d <= 0.0)
    throw std::runtime_error(
        "update: nonpositive predictive scale; covariance state is corrupted");
  const double r = obs.z - dot(theta_, obs.x);

  const Eigen::VectorXd sx = mat_vec(sigma_, obs.x);

  KnowledgeState next;
  next.theta_ = theta_ + (r / d) * sx;
  next.sigma_ = sigma_ - (sx * sx.transpose()) / d;
  next.sigma_ = 0.5 * (next.sigma_ + next.sigma_.transpose());
  next.a_ = a_ + 0.5;
  next.b_ = b_ + r * r / (2.0 * d);
  next.n_ = n_ + 1;
  next.sigma_theta_ = sigma_theta_;
  next.score_clip_ = score_clip_;
  return next;
}

double KnowledgeState::mean_utility(const FeatureVector& x) const {
  return dot(theta_, x);
}

}  // namespace splearn
