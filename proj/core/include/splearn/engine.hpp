#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "splearn/belief.hpp"
#include "splearn/evaluator.hpp"
#include "splearn/feature_space.hpp"
#include "splearn/policy.hpp"

namespace splearn {

enum class PolicyName { greedy, thompson, kg_enum, kg_sampled, random_uniform };

std::string to_string(PolicyName name);
PolicyName policy_from_string(const std::string& name);

/// A selection policy plus its shared knobs.
struct PolicyKind {
  PolicyName name = PolicyName::kg_sampled;
  int sample_count = 100;     // m, candidates per step for the sampled variants
  int quantizer_points = 20;  // J
  int kg_enum_cap = 5000;     // |X| bound for the exact KG enumeration
  int workers = 1;            // outer-loop parallelism for kg_select

  void validate() const;
};

/// The candidate space handed to policies: the catalog plus constraints, with
/// the full enumeration materialized when the raw combination count fits the
/// cap. Immutable after make(); shareable across threads.
class SearchSpace {
 public:
  static SearchSpace make(FeatureCatalog catalog, ConstraintSet constraints,
                          std::uint64_t enumeration_cap = 200000);

  const FeatureCatalog& catalog() const { return catalog_; }
  const ConstraintSet& constraints() const { return constraints_; }
  const std::optional<std::vector<FeatureVector>>& enumerated() const {
    return enumerated_;
  }
  /// True when the feasible set is exactly the one-hot product (no extra
  /// rows); separable argmax is then exact for linear objectives.
  bool pure_one_hot() const { return pure_one_hot_; }
  std::uint64_t enumeration_cap() const { return cap_; }

  /// Exact argmax of v' x over the space: separable per group when pure
  /// one-hot, otherwise over the enumeration. Ties break lexicographically.
  FeatureVector linear_argmax(const Eigen::VectorXd& v) const;

 private:
  SearchSpace(FeatureCatalog c, ConstraintSet k, std::uint64_t cap);
  FeatureCatalog catalog_;
  ConstraintSet constraints_;
  std::optional<std::vector<FeatureVector>> enumerated_;
  bool pure_one_hot_ = false;
  std::uint64_t cap_ = 0;
};

struct PolicyDiagnostics {
  std::optional<double> kg_nu;
  std::optional<double> kg_baseline;
  std::optional<double> ts_rho;
  std::optional<double> ts_theta_norm;
  int candidates = 0;
};

/// Compact belief snapshot serialized into run records (full Sigma goes to a
/// separate matrix dump when requested).
struct StateDigest {
  std::vector<double> theta;
  std::vector<double> sigma_diag;
  double a = 0.0;
  double b = 0.0;
  int n = 0;

  static StateDigest of(const KnowledgeState& state);
};

struct RunRecord {
  int iteration = 0;  // 1-based
  FeatureVector x;
  Assignment assignment;
  double u = 0.0;
  double z = 0.0;
  double best_u = 0.0;
  FeatureVector best_x;
  PolicyDiagnostics diagnostics;
  StateDigest digest;  // state after the update
  std::optional<double> true_utility;
  double seconds = 0.0;  // in-memory only; excluded from record files so
                         // fixed-seed runs are byte-identical
};

enum class StopReason { budget, early_stop };

struct RunResult {
  FeatureVector best_x;
  double best_u = -1.0;
  std::vector<RunRecord> records;
  StopReason stop_reason = StopReason::budget;
  int realized_steps = 0;
};

struct RunConfig {
  int budget = 30;
  std::optional<int> patience;  // early stop after this many non-improving steps
  PolicyKind policy;
  PriorSpec prior;
  std::uint64_t seed = 1;

  void validate() const;
};

using EvalFn = std::function<EvalOutcome(const FeatureVector& x, int step)>;
using RecordSink = std::function<void(const RunRecord&)>;

/// Evaluator failure mid-run: the completed records ride along.
struct RunAbortedError : std::runtime_error {
  RunAbortedError(const std::string& what, std::vector<RunRecord> partial)
      : std::runtime_error(what), partial_records(std::move(partial)) {}
  std::vector<RunRecord> partial_records;
};

/// The sequential loop: select, evaluate, track the strict best, update the
/// belief; stops at the budget or after `patience` consecutive steps without
/// strict improvement of the best score.
RunResult run(const RunConfig& config, const SearchSpace& space,
              const EvalFn& evaluate, const RecordSink& sink = {});

struct Replication {
  int index = 0;
  std::optional<RunResult> result;
  std::string error;  // non-empty when the replication failed
};

using EvaluatorFactory =
    std::function<EvalFn(int replication_index, std::uint64_t seed)>;

/// R independent runs with seed = base_seed + index; failures are isolated.
/// Replications may execute concurrently; results are ordered by index and do
/// not depend on scheduling.
std::vector<Replication> replicate(const RunConfig& config,
                                   const SearchSpace& space,
                                   const EvaluatorFactory& factory,
                                   int replications, std::uint64_t base_seed,
                                   int workers = 1);

}  // namespace splearn
