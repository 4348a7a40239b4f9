#include "splearn/engine.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "splearn/quantizer.hpp"
#include "splearn/rng.hpp"

namespace splearn {

std::string to_string(PolicyName name) {
  switch (name) {
    case PolicyName::greedy: return "greedy";
    case PolicyName::thompson: return "thompson";
    case PolicyName::kg_enum: return "kg_enum";
    case PolicyName::kg_sampled: return "kg_sampled";
    case PolicyName::random_uniform: return "random";
  }
  throw std::logic_error("unknown policy enum");
}

PolicyName policy_from_string(const std::string& name) {
  if (name == "greedy") return PolicyName::greedy;
  if (name == "thompson" || name == "ts") return PolicyName::thompson;
  if (name == "kg_enum" || name == "kg") return PolicyName::kg_enum;
  if (name == "kg_sampled") return PolicyName::kg_sampled;
  if (name == "random") return PolicyName::random_uniform;
  throw std::invalid_argument("unknown policy '" + name + "'");
}

void PolicyKind::validate() const {
  if (quantizer_points < 1)
    throw std::invalid_argument("policy: quantizer_points must be >= 1");
  if (name == PolicyName::kg_sampled && sample_count < 2)
    throw std::invalid_argument("policy: kg_sampled needs sample_count >= 2");
  if (sample_count < 1)
    throw std::invalid_argument("policy: sample_count must be >= 1");
  if (kg_enum_cap < 1)
    throw std::invalid_argument("policy: kg_enum_cap must be >= 1");
  if (workers < 1) throw std::invalid_argument("policy: workers must be >= 1");
}

void RunConfig::validate() const {
  if (budget < 1) throw std::invalid_argument("run: budget must be >= 1");
  if (patience && *patience < 1)
    throw std::invalid_argument("run: patience must be >= 1 when set");
  policy.validate();
  prior.validate();
}

SearchSpace::SearchSpace(FeatureCatalog c, ConstraintSet k, std::uint64_t cap)
    : catalog_(std::move(c)), constraints_(std::move(k)), cap_(cap) {}

SearchSpace SearchSpace::make(FeatureCatalog catalog, ConstraintSet constraints,
                              std::uint64_t enumeration_cap) {
  if (constraints.dimension() != catalog.dimension())
    throw std::invalid_argument("space: constraint dimension mismatch");
  SearchSpace s(std::move(catalog), std::move(constraints), enumeration_cap);
  s.pure_one_hot_ = s.constraints_.extra_equalities() == 0 &&
                    s.constraints_.extra_inequalities() == 0;
  if (s.catalog_.combination_count() <= enumeration_cap) {
    s.enumerated_ = enumerate_all(s.catalog_, s.constraints_, enumeration_cap);
    if (s.enumerated_->empty())
      throw std::invalid_argument("space: the extra constraints leave no feasible vector");
  }
  return s;
}

FeatureVector SearchSpace::linear_argmax(const Eigen::VectorXd& v) const {
  if (v.size() != catalog_.dimension())
    throw std::invalid_argument("linear_argmax: dimension mismatch");
  if (pure_one_hot_) {
    // separable: best choice per group; ties go to the larger index, which
    // is the lexicographically smaller one-hot pattern
    FeatureVector x;
    x.bits.assign(catalog_.dimension(), 0);
    for (int g = 0; g < catalog_.group_count(); ++g) {
      int best = 0;
      for (int c = 1; c < catalog_.group_size(g); ++c)
        if (v[catalog_.offset(g) + c] >= v[catalog_.offset(g) + best]) best = c;
      x.bits[catalog_.offset(g) + best] = 1;
    }
    return x;
  }
  if (!enumerated_)
    throw std::runtime_error(
        "linear_argmax: space has extra constraints and exceeds the "
        "enumeration cap; no exact argmax available");
  double best_v = -std::numeric_limits<double>::infinity();
  const FeatureVector* best = nullptr;
  for (const auto& x : *enumerated_) {
    const double val = dot(v, x);
    if (val > best_v || (val == best_v && best && x < *best)) {
      best_v = val;
      best = &x;
    }
  }
  return *best;
}

StateDigest StateDigest::of(const KnowledgeState& state) {
  StateDigest d;
  d.theta.assign(state.theta().data(), state.theta().data() + state.theta().size());
  d.sigma_diag.resize(state.dimension());
  for (int i = 0; i < state.dimension(); ++i) d.sigma_diag[i] = state.sigma()(i, i);
  d.a = state.a();
  d.b = state.b();
  d.n = state.n();
  return d;
}

namespace {

struct Selection {
  FeatureVector x;
  PolicyDiagnostics diagnostics;
};

Selection select_next(const PolicyKind& policy, const KnowledgeState& state,
                      const SearchSpace& space, std::uint64_t step_seed) {
  Selection sel;
  switch (policy.name) {
    case PolicyName::greedy: {
      if (space.enumerated()) {
        sel.x = greedy_select(state, *space.enumerated());
        sel.diagnostics.candidates = static_cast<int>(space.enumerated()->size());
      } else if (space.pure_one_hot()) {
        sel.x = space.linear_argmax(state.theta());
      } else {
        const auto sampled = sample_uniform(space.catalog(), space.constraints(),
                                            policy.sample_count, step_seed);
        sel.x = greedy_select(state, sampled);
        sel.diagnostics.candidates = static_cast<int>(sampled.size());
      }
      return sel;
    }
    case PolicyName::thompson: {
      const auto [rho, theta_hat] = ts_draw(state, step_seed);
      sel.diagnostics.ts_rho = rho;
      sel.diagnostics.ts_theta_norm = theta_hat.norm();
      if (space.enumerated()) {
        std::vector<double> values(space.enumerated()->size());
        for (std::size_t i = 0; i < values.size(); ++i)
          values[i] = dot(theta_hat, (*space.enumerated())[i]);
        // reuse the shared tie-break through ts_select would redraw; do the
        // argmax inline instead
        std::size_t best = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
          if (values[i] > values[best] ||
              (values[i] == values[best] &&
               (*space.enumerated())[i] < (*space.enumerated())[best]))
            best = i;
        sel.x = (*space.enumerated())[best];
        sel.diagnostics.candidates = static_cast<int>(values.size());
      } else if (space.pure_one_hot()) {
        sel.x = space.linear_argmax(theta_hat);
      } else {
        const auto sampled = sample_uniform(space.catalog(), space.constraints(),
                                            policy.sample_count, step_seed);
        sel.x = ts_select(state, sampled, step_seed);
        sel.diagnostics.candidates = static_cast<int>(sampled.size());
      }
      return sel;
    }
    case PolicyName::kg_enum: {
      if (!space.enumerated())
        throw std::runtime_error(
            "kg_enum: space exceeds the enumeration cap; use kg_sampled");
      const auto& all = *space.enumerated();
      if (all.size() > static_cast<std::size_t>(policy.kg_enum_cap))
        throw std::runtime_error(
            "kg_enum: " + std::to_string(all.size()) +
            " candidates exceed kg_enum_cap " + std::to_string(policy.kg_enum_cap) +
            "; use kg_sampled");
      const auto quantizer =
          cached_quantizer(policy.quantizer_points, 2.0 * state.a());
      auto [x, breakdown] = kg_select(state, *quantizer, all, policy.workers);
      sel.x = std::move(x);
      sel.diagnostics.kg_nu = breakdown.nu;
      sel.diagnostics.kg_baseline = breakdown.baseline;
      sel.diagnostics.candidates = static_cast<int>(all.size());
      return sel;
    }
    case PolicyName::kg_sampled: {
      auto outer = sample_uniform(space.catalog(), space.constraints(),
                                  policy.sample_count, step_seed);
      std::vector<FeatureVector> inner = outer;
      // the greedy incumbent keeps the baseline max_y p_y honest
      if (space.enumerated() || space.pure_one_hot())
        inner.push_back(space.linear_argmax(state.theta()));
      const auto quantizer =
          cached_quantizer(policy.quantizer_points, 2.0 * state.a());
      auto [x, breakdown] =
          kg_select(state, *quantizer, outer, inner, policy.workers);
      sel.x = std::move(x);
      sel.diagnostics.kg_nu = breakdown.nu;
      sel.diagnostics.kg_baseline = breakdown.baseline;
      sel.diagnostics.candidates = static_cast<int>(outer.size());
      return sel;
    }
    case PolicyName::random_uniform: {
      sel.x = random_select(space.catalog(), space.constraints(), step_seed);
      return sel;
    }
  }
  throw std::logic_error("unknown policy enum");
}

}  // namespace

RunResult run(const RunConfig& config, const SearchSpace& space,
              const EvalFn& evaluate, const RecordSink& sink) {
  config.validate();
  if (!evaluate) throw std::invalid_argument("run: evaluator is empty");

  KnowledgeState state = KnowledgeState::init(config.prior);
  if (state.dimension() != space.catalog().dimension())
    throw std::invalid_argument("run: prior dimension does not match the catalog");

  RunResult result;
  result.best_u = -1.0;  // sentinel below any score
  int stall = 0;

  for (int step = 1; step <= config.budget; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    Selection sel = select_next(config.policy, state, space,
                                substream_seed(config.seed, "policy", step));

    EvalOutcome outcome;
    try {
      outcome = evaluate(sel.x, step);
    } catch (const std::exception& e) {
      throw RunAbortedError(
          "run: evaluator failed at step " + std::to_string(step) + ": " + e.what(),
          std::move(result.records));
    }

    const double u = outcome.score;
    const double z = logit(u, state.score_clip());
    const bool improved = u > result.best_u;
    if (improved) {
      result.best_u = u;
      result.best_x = sel.x;
    }
    state = state.updated(Observation{sel.x, u, z});

    RunRecord rec;
    rec.iteration = step;
    rec.x = sel.x;
    rec.assignment = decode(space.catalog(), sel.x);
    rec.u = u;
    rec.z = z;
    rec.best_u = result.best_u;
    rec.best_x = result.best_x;
    rec.diagnostics = std::move(sel.diagnostics);
    rec.digest = StateDigest::of(state);
    rec.true_utility = outcome.true_utility;
    rec.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    result.records.push_back(rec);
    if (sink) sink(result.records.back());
    result.realized_steps = step;

    stall = improved ? 0 : stall + 1;
    if (config.patience && stall >= *config.patience) {
      result.stop_reason = StopReason::early_stop;
      return result;
    }
  }
  result.stop_reason = StopReason::budget;
  return result;
}

std::vector<Replication> replicate(const RunConfig& config,
                                   const SearchSpace& space,
                                   const EvaluatorFactory& factory,
                                   int replications, std::uint64_t base_seed,
                                   int workers) {
  if (replications < 1)
    throw std::invalid_argument("replicate: replications must be >= 1");
  if (!factory) throw std::invalid_argument("replicate: factory is empty");

  std::vector<Replication> results(replications);
  auto run_one = [&](int r) {
    results[r].index = r;
    try {
      RunConfig local = config;
      local.seed = base_seed + static_cast<std::uint64_t>(r);
      const EvalFn evaluate = factory(r, local.seed);
      results[r].result = run(local, space, evaluate);
    } catch (const std::exception& e) {
      results[r].error = e.what();
    }
  };

  if (workers <= 1 || replications == 1) {
    for (int r = 0; r < replications; ++r) run_one(r);
    return results;
  }
  std::vector<std::thread> pool;
  std::atomic<int> cursor{0};
  const int threads = std::min(workers, replications);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int r = cursor.fetch_add(1);
        if (r >= replications) return;
        run_one(r);
      }
    });
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace splearn
