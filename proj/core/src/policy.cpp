#include "splearn/policy.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "splearn/rng.hpp"

namespace splearn {

namespace {

void require_nonempty(std::span<const FeatureVector> candidates, const char* who) {
  if (candidates.empty())
    throw std::invalid_argument(std::string(who) + ": empty candidate set");
}

/// argmax with the global tie-break: larger value wins, exact ties go to the
/// lexicographically smaller bit pattern.
int argmax_with_tiebreak(std::span<const FeatureVector> candidates,
                         std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
    if (values[i] > values[best] ||
        (values[i] == values[best] && candidates[i] < candidates[best]))
      best = i;
  }
  return best;
}

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("ts_select: eigen factorization failed");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-10 * scale)
      throw std::runtime_error(
          "ts_select: covariance has a negative eigenvalue beyond the repair floor");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

void run_parallel(int n, int workers, const std::function<void(int, int)>& chunk_fn) {
  if (workers <= 1 || n < 2 * workers) {
    chunk_fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int per = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * per;
    const int hi = std::min(n, lo + per);
    if (lo >= hi) break;
    pool.emplace_back(chunk_fn, lo, hi);
  }
  for (auto& t : pool) t.join();
}

}  // namespace

FeatureVector greedy_select(const KnowledgeState& state,
                            std::span<const FeatureVector> candidates) {
  require_nonempty(candidates, "greedy_select");
  std::vector<double> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    values[i] = state.mean_utility(candidates[i]);
  return candidates[argmax_with_tiebreak(candidates, values)];
}

std::pair<double, Eigen::VectorXd> ts_draw(const KnowledgeState& state,
                                           std::uint64_t seed) {
  Rng rng(substream_seed(seed, "thompson"));
  const double rho = rng.gamma(state.a(), state.b());
  Eigen::VectorXd xi(state.dimension());
  for (int i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
  const Eigen::MatrixXd root = symmetric_sqrt(state.sigma());
  Eigen::VectorXd theta_hat = state.theta() + (root * xi) / std::sqrt(rho);
  return {rho, std::move(theta_hat)};
}

FeatureVector ts_select(const KnowledgeState& state,
                        std::span<const FeatureVector> candidates,
                        std::uint64_t seed) {
  require_nonempty(candidates, "ts_select");
  const auto [rho, theta_hat] = ts_draw(state, seed);
  std::vector<double> values(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    values[i] = dot(theta_hat, candidates[i]);
  return candidates[argmax_with_tiebreak(candidates, values)];
}

namespace {

struct KgWorkspace {
  double scale = 0.0;            // sqrt(b / (a (1 + x'(Sigma+Sigma_Theta)x)))
  std::vector<double> p;         // theta' y per inner candidate
  std::vector<double> q;         // scale * x' Sigma y per inner candidate
  double baseline = 0.0;
  int baseline_arg = 0;
};

void check_quantizer(const KnowledgeState& state, const Quantizer& quantizer) {
  if (std::abs(quantizer.df - 2.0 * state.a()) > 1e-6)
    throw std::invalid_argument(
        "kg_score: quantizer df " + std::to_string(quantizer.df) +
        " does not match 2a = " + std::to_string(2.0 * state.a()) +
        " within the cache tolerance");
}

KgWorkspace kg_workspace(const KnowledgeState& state, const FeatureVector& x,
                         std::span<const FeatureVector> inner) {
  KgWorkspace ws;
  const double denom =
      1.0 + quad_form(state.sigma(), x) + quad_form(state.sigma_theta(), x);
  ws.scale = std::sqrt(state.b() / (state.a() * denom));
  const Eigen::VectorXd sigma_x = mat_vec(state.sigma(), x);
  ws.p.resize(inner.size());
  ws.q.resize(inner.size());
  for (std::size_t i = 0; i < inner.size(); ++i) {
    ws.p[i] = dot(state.theta(), inner[i]);
    ws.q[i] = ws.scale * dot(sigma_x, inner[i]);
  }
  ws.baseline_arg = argmax_with_tiebreak(
      inner, std::span<const double>(ws.p.data(), ws.p.size()));
  ws.baseline = ws.p[ws.baseline_arg];
  return ws;
}

/// nu only, no per-point bookkeeping; used by the selection loop.
double kg_nu(const KgWorkspace& ws, const Quantizer& quantizer,
             std::span<const FeatureVector> inner) {
  double acc = 0.0;
  for (int j = 0; j < quantizer.size(); ++j) {
    const double t = quantizer.points[j];
    double best = ws.p[0] + ws.q[0] * t;
    for (std::size_t i = 1; i < inner.size(); ++i)
      best = std::max(best, ws.p[i] + ws.q[i] * t);
    acc += quantizer.weights[j] * best;
  }
  return acc - ws.baseline;
}

}  // namespace

KgScoreBreakdown kg_score(const KnowledgeState& state, const FeatureVector& x,
                          const Quantizer& quantizer,
                          std::span<const FeatureVector> inner) {
  require_nonempty(inner, "kg_score");
  check_quantizer(state, quantizer);
  if (x.size() != state.dimension())
    throw std::invalid_argument("kg_score: candidate dimension mismatch");

  const KgWorkspace ws = kg_workspace(state, x, inner);
  KgScoreBreakdown out;
  out.x = x;
  out.baseline = ws.baseline;
  out.per_point.resize(quantizer.size());
  double acc = 0.0;
  std::vector<double> shifted(inner.size());
  for (int j = 0; j < quantizer.size(); ++j) {
    const double t = quantizer.points[j];
    for (std::size_t i = 0; i < inner.size(); ++i)
      shifted[i] = ws.p[i] + ws.q[i] * t;
    const int arg = argmax_with_tiebreak(
        inner, std::span<const double>(shifted.data(), shifted.size()));
    out.per_point[j] = {t, inner[arg], shifted[arg]};
    acc += quantizer.weights[j] * shifted[arg];
  }
  out.nu = acc - ws.baseline;
  return out;
}

std::pair<FeatureVector, KgScoreBreakdown> kg_select(
    const KnowledgeState& state, const Quantizer& quantizer,
    std::span<const FeatureVector> outer, std::span<const FeatureVector> inner,
    int workers) {
  require_nonempty(outer, "kg_select");
  require_nonempty(inner, "kg_select");
  check_quantizer(state, quantizer);

  const int n = static_cast<int>(outer.size());
  std::vector<double> nus(n);
  run_parallel(n, workers, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i)
      nus[i] = kg_nu(kg_workspace(state, outer[i], inner), quantizer, inner);
  });
  const int best =
      argmax_with_tiebreak(outer, std::span<const double>(nus.data(), nus.size()));
  return {outer[best], kg_score(state, outer[best], quantizer, inner)};
}

std::pair<FeatureVector, KgScoreBreakdown> kg_select(
    const KnowledgeState& state, const Quantizer& quantizer,
    std::span<const FeatureVector> candidates, int workers) {
  return kg_select(state, quantizer, candidates, candidates, workers);
}

FeatureVector random_select(std::span<const FeatureVector> candidates,
                            std::uint64_t seed) {
  require_nonempty(candidates, "random_select");
  Rng rng(substream_seed(seed, "random-policy"));
  return candidates[rng.uniform_below(candidates.size())];
}

FeatureVector random_select(const FeatureCatalog& catalog,
                            const ConstraintSet& constraints,
                            std::uint64_t seed) {
  return sample_uniform(catalog, constraints, 1, seed)[0];
}

}  // namespace splearn
