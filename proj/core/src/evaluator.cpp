#include "splearn/evaluator.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "splearn/belief.hpp"
#include "splearn/metrics.hpp"
#include "splearn/rng.hpp"

namespace splearn {

namespace {

std::uint64_t bits_hash(const FeatureVector& x) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : x.bits) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void fisher_yates(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i)
    std::swap(items[i - 1], items[rng.uniform_below(i)]);
}

}  // namespace

SyntheticOracle::SyntheticOracle(Eigen::VectorXd theta_star, double noise_sd,
                                 std::uint64_t seed)
    : theta_star_(std::move(theta_star)), noise_sd_(noise_sd), seed_(seed) {
  if (noise_sd_ < 0.0)
    throw std::invalid_argument("synthetic oracle: noise_sd must be >= 0");
}

double SyntheticOracle::true_utility(const FeatureVector& x) const {
  return dot(theta_star_, x);
}

EvalOutcome SyntheticOracle::evaluate(const FeatureVector& x,
                                      std::uint64_t draw) const {
  if (x.size() != theta_star_.size())
    throw std::invalid_argument("synthetic oracle: dimension mismatch");
  const double eta = true_utility(x);
  double noise = 0.0;
  if (noise_sd_ > 0.0) {
    Rng rng(substream_seed(seed_, "oracle", bits_hash(x) ^ (draw * 0x9e3779b97f4a7c15ULL)));
    noise = noise_sd_ * rng.normal();
  }
  EvalOutcome out;
  out.score = sigmoid(eta + noise);
  out.true_utility = eta;
  return out;
}

Eigen::VectorXd SyntheticOracle::random_theta_star(int dimension, double scale,
                                                   std::uint64_t seed) {
  Rng rng(substream_seed(seed, "theta-star"));
  Eigen::VectorXd v(dimension);
  for (int i = 0; i < dimension; ++i) v[i] = scale * rng.normal();
  return v;
}

std::vector<std::pair<std::string, std::string>> load_pairs(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("dataset: bad json at " + path + ":" +
                               std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.contains("input") || !rec.contains("output"))
      throw std::runtime_error("dataset: record at " + path + ":" +
                               std::to_string(line_no) +
                               " needs 'input' and 'output'");
    pairs.emplace_back(rec["input"].get<std::string>(),
                       rec["output"].get<std::string>());
  }
  return pairs;
}

TaskDataset split_dataset(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const SplitSpec& spec, std::uint64_t test_seed, std::uint64_t repl_seed) {
  // drop duplicate inputs so the splits are disjoint by exact input match
  std::vector<std::pair<std::string, std::string>> unique;
  std::set<std::string> seen;
  for (const auto& p : pairs)
    if (seen.insert(p.first).second) unique.push_back(p);

  Rng test_rng(substream_seed(test_seed, "split-test"));
  fisher_yates(unique, test_rng);

  TaskDataset ds;
  const int n = static_cast<int>(unique.size());
  const int test_n = std::min(spec.test_size, n);
  ds.test.assign(unique.begin(), unique.begin() + test_n);

  std::vector<std::pair<std::string, std::string>> rest(unique.begin() + test_n,
                                                        unique.end());
  Rng repl_rng(substream_seed(repl_seed, "split-replication"));
  fisher_yates(rest, repl_rng);
  const int demo_n = std::min<int>(spec.demonstration_size, rest.size());
  ds.demonstration.assign(rest.begin(), rest.begin() + demo_n);
  const int val_n = std::min<int>(spec.validation_size, rest.size() - demo_n);
  ds.validation.assign(rest.begin() + demo_n, rest.begin() + demo_n + val_n);
  return ds;
}

std::string generate_instruction(const ChatClient& client,
                                 const LlmEvaluatorConfig& config,
                                 const TemplateSet& templates,
                                 const std::string& meta_prompt,
                                 bool paraphrase) {
  std::string instruction =
      client.complete(meta_prompt, config.generation_temperature);
  if (paraphrase) {
    const std::string wrapped = substitute_placeholders(
        templates.paraphrase, {{"INSTRUCTION", instruction}});
    instruction = client.complete(wrapped, config.generation_temperature);
  }
  return instruction;
}

LlmEvaluator::LlmEvaluator(LlmEvaluatorConfig config,
                           const FeatureCatalog& catalog,
                           std::uint64_t test_seed, std::uint64_t repl_seed)
    : config_(std::move(config)),
      catalog_(catalog),
      templates_(TemplateSet::load(config_.templates_dir)),
      client_(std::make_unique<ChatClient>(config_.client)) {
  if (config_.parallelism < 1)
    throw std::invalid_argument("llm evaluator: parallelism must be >= 1");
  for (double t : {config_.generation_temperature, config_.evaluation_temperature})
    if (t < 0.0 || t > 2.0)
      throw std::invalid_argument("llm evaluator: temperatures must lie in [0, 2]");

  const auto pairs = load_pairs(config_.dataset_path);
  dataset_ = split_dataset(pairs, config_.splits, test_seed, repl_seed);
  if (dataset_.validation.empty())
    throw std::runtime_error("llm evaluator: empty validation split");

  // fill the demonstration-example payloads for this replication
  const int g = catalog_.find_group("examples");
  if (g >= 0) {
    if (dataset_.demonstration.empty())
      throw std::runtime_error("llm evaluator: empty demonstration split");
    std::vector<FeatureGroup> groups = catalog_.groups();
    auto& examples = groups[g];
    examples.payloads.assign(examples.choices.size(), "");
    for (std::size_t c = 0; c < examples.choices.size(); ++c) {
      std::vector<int> idx(dataset_.demonstration.size());
      std::iota(idx.begin(), idx.end(), 0);
      Rng rng(substream_seed(repl_seed, "examples-choice", c));
      fisher_yates(idx, rng);
      const int take = std::min<int>(config_.examples_per_choice, idx.size());
      std::string block;
      for (int i = 0; i < take; ++i) {
        const auto& [input, output] = dataset_.demonstration[idx[i]];
        block += "Input: " + input + "\nOutput: " + output + "\n\n";
      }
      examples.payloads[c] = block;
    }
    catalog_ = FeatureCatalog(std::move(groups));
  }
}

EvalOutcome LlmEvaluator::evaluate(const FeatureVector& x) const {
  const auto start = std::chrono::steady_clock::now();
  EvalOutcome out;

  const std::string meta = build_meta_prompt(catalog_, x, templates_);
  out.instruction = generate_instruction(*client_, config_, templates_, meta,
                                         paraphrase_enabled(catalog_, x));

  const auto& val = dataset_.validation;
  out.items.resize(val.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= val.size()) return;
      EvalItem& item = out.items[i];
      item.input = val[i].first;
      item.expected = val[i].second;
      try {
        const std::string prompt = substitute_placeholders(
            templates_.eval,
            {{"INSTRUCTION", out.instruction}, {"INPUT", item.input}});
        item.response =
            client_->complete(prompt, config_.evaluation_temperature);
        item.score = config_.metric == Metric::exact_match
                         ? metric_exact_match(item.response, item.expected)
                         : metric_f1(item.response, item.expected);
        item.ok = true;
      } catch (const std::exception&) {
        item.ok = false;
      }
    }
  };
  const int threads = std::min<int>(config_.parallelism, val.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  double sum = 0.0;
  int completed = 0;
  for (int i = 0; i < static_cast<int>(out.items.size()); ++i) {
    if (!out.items[i].ok) {
      out.failed_items.push_back(i);
      continue;
    }
    sum += out.items[i].score;
    ++completed;
  }
  out.partial = !out.failed_items.empty();
  if (completed == 0)
    throw std::runtime_error("llm evaluator: every validation item failed");
  out.score = sum / completed;
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

}  // namespace splearn
