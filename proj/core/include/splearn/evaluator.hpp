#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "splearn/feature_space.hpp"
#include "splearn/llm_client.hpp"
#include "splearn/templates.hpp"

namespace splearn {

struct EvalItem {
  std::string input;
  std::string expected;
  std::string response;
  double score = 0.0;
  bool ok = true;
};

/// The result of one prompt evaluation: the (0,1) score, the per-item records
/// (empty on the synthetic path) and the generated instruction.
struct EvalOutcome {
  double score = 0.0;
  std::vector<EvalItem> items;
  std::string instruction;
  double seconds = 0.0;
  bool partial = false;            // some items failed after retries
  std::vector<int> failed_items;
  // synthetic path only: the noiseless utility theta*' x, for regret reports
  std::optional<double> true_utility;
};

/// Ground-truth evaluator for verifiable experiments: the score is
/// sigmoid(theta*' x + eps) with eps ~ N(0, noise_sd^2). A pure function of
/// (seed, draw, x) so replications are exactly reproducible.
class SyntheticOracle {
 public:
  SyntheticOracle(Eigen::VectorXd theta_star, double noise_sd, std::uint64_t seed);

  /// `draw` distinguishes repeated evaluations of the same x.
  EvalOutcome evaluate(const FeatureVector& x, std::uint64_t draw) const;

  double true_utility(const FeatureVector& x) const;
  const Eigen::VectorXd& theta_star() const { return theta_star_; }

  /// theta* with i.i.d. N(0, scale^2) entries from the named substream.
  static Eigen::VectorXd random_theta_star(int dimension, double scale,
                                           std::uint64_t seed);

 private:
  Eigen::VectorXd theta_star_;
  double noise_sd_;
  std::uint64_t seed_;
};

/// (input, output) pairs split three ways; splits are disjoint by input text.
struct TaskDataset {
  std::vector<std::pair<std::string, std::string>> demonstration;
  std::vector<std::pair<std::string, std::string>> validation;
  std::vector<std::pair<std::string, std::string>> test;
};

/// Loads a line-delimited file of {"input": ..., "output": ...} records.
std::vector<std::pair<std::string, std::string>> load_pairs(
    const std::string& path);

struct SplitSpec {
  int test_size = 100;
  int validation_size = 100;
  int demonstration_size = 10;
};

/// The test split is carved with the fixed `test_seed` (held constant across
/// replications); demonstration and validation are re-drawn per replication.
TaskDataset split_dataset(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const SplitSpec& spec, std::uint64_t test_seed, std::uint64_t repl_seed);

enum class Metric { exact_match, f1 };

struct LlmEvaluatorConfig {
  ChatClientConfig client;
  double generation_temperature = 0.9;
  double evaluation_temperature = 0.0;
  int parallelism = 4;
  std::string templates_dir = "templates";
  Metric metric = Metric::exact_match;
  std::string dataset_path;
  SplitSpec splits;
  int examples_per_choice = 5;
  double score_clip = 1e-4;
};

/// Generates the instruction for a meta prompt; when the paraphrase flag is
/// set a second call rewrites the first instruction through the paraphrase
/// template.
std::string generate_instruction(const ChatClient& client,
                                 const LlmEvaluatorConfig& config,
                                 const TemplateSet& templates,
                                 const std::string& meta_prompt,
                                 bool paraphrase);

/// The LLM-backed score function: meta prompt -> instruction -> one
/// evaluation query per validation item -> mean metric score.
class LlmEvaluator {
 public:
  /// Binds the evaluator for one replication: loads templates and data,
  /// splits with (test_seed, repl_seed), and fills the catalog's "examples"
  /// payloads with demonstration blocks drawn from the demonstration split.
  LlmEvaluator(LlmEvaluatorConfig config, const FeatureCatalog& catalog,
               std::uint64_t test_seed, std::uint64_t repl_seed);

  EvalOutcome evaluate(const FeatureVector& x) const;

  const FeatureCatalog& catalog() const { return catalog_; }
  const TaskDataset& dataset() const { return dataset_; }
  const ChatClient& client() const { return *client_; }

 private:
  LlmEvaluatorConfig config_;
  FeatureCatalog catalog_;
  TaskDataset dataset_;
  TemplateSet templates_;
  std::unique_ptr<ChatClient> client_;
};

}  // namespace splearn
