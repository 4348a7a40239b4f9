#include "splearn/feature_space.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "splearn/rng.hpp"

namespace splearn {

FeatureCatalog::FeatureCatalog(std::vector<FeatureGroup> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty())
    throw std::invalid_argument("catalog: needs at least one group");
  std::set<std::string> names;
  offsets_.reserve(groups_.size());
  for (const auto& g : groups_) {
    if (g.choices.empty())
      throw std::invalid_argument("catalog: group '" + g.name + "' has no choices");
    if (!names.insert(g.name).second)
      throw std::invalid_argument("catalog: duplicate group name '" + g.name + "'");
    std::set<std::string> labels(g.choices.begin(), g.choices.end());
    if (labels.size() != g.choices.size())
      throw std::invalid_argument("catalog: duplicate choice label in group '" + g.name + "'");
    if (!g.payloads.empty() && g.payloads.size() != g.choices.size())
      throw std::invalid_argument("catalog: payload count mismatch in group '" + g.name + "'");
    offsets_.push_back(dimension_);
    dimension_ += static_cast<int>(g.choices.size());
  }
}

int FeatureCatalog::find_group(std::string_view name) const {
  for (int i = 0; i < group_count(); ++i)
    if (groups_[i].name == name) return i;
  return -1;
}

int FeatureCatalog::find_choice(int g, std::string_view label) const {
  const auto& choices = groups_[g].choices;
  for (int i = 0; i < static_cast<int>(choices.size()); ++i)
    if (choices[i] == label) return i;
  return -1;
}

std::uint64_t FeatureCatalog::combination_count() const {
  std::uint64_t n = 1;
  for (const auto& g : groups_) {
    const std::uint64_t s = g.choices.size();
    if (n > UINT64_MAX / 2 / s) return INT64_MAX;
    n *= s;
  }
  return n;
}

std::vector<int> FeatureVector::ones() const {
  std::vector<int> idx;
  for (int i = 0; i < size(); ++i)
    if (bits[i]) idx.push_back(i);
  return idx;
}

Eigen::VectorXd FeatureVector::to_eigen() const {
  Eigen::VectorXd v(size());
  for (int i = 0; i < size(); ++i) v[i] = bits[i] ? 1.0 : 0.0;
  return v;
}

double dot(const Eigen::VectorXd& v, const FeatureVector& x) {
  if (v.size() != x.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i)
    if (x.bits[i]) s += v[i];
  return s;
}

Eigen::VectorXd mat_vec(const Eigen::MatrixXd& m, const FeatureVector& x) {
  if (m.cols() != x.size())
    throw std::invalid_argument("mat_vec: dimension mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.rows());
  for (int i = 0; i < x.size(); ++i)
    if (x.bits[i]) out += m.col(i);
  return out;
}

double quad_form(const Eigen::MatrixXd& m, const FeatureVector& x) {
  if (m.rows() != x.size() || m.cols() != x.size())
    throw std::invalid_argument("quad_form: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    if (!x.bits[i]) continue;
    for (int j = 0; j < x.size(); ++j)
      if (x.bits[j]) s += m(i, j);
  }
  return s;
}

FeatureVector encode(const FeatureCatalog& catalog, const Assignment& assignment) {
  FeatureVector x;
  x.bits.assign(catalog.dimension(), 0);
  for (const auto& [name, label] : assignment)
    if (catalog.find_group(name) < 0)
      throw std::invalid_argument("encode: unknown group '" + name + "'");
  for (int g = 0; g < catalog.group_count(); ++g) {
    const auto& group = catalog.groups()[g];
    auto it = assignment.find(group.name);
    if (it == assignment.end())
      throw std::invalid_argument("encode: assignment missing group '" + group.name + "'");
    const int c = catalog.find_choice(g, it->second);
    if (c < 0)
      throw std::invalid_argument("encode: unknown choice '" + it->second +
                                  "' in group '" + group.name + "'");
    x.bits[catalog.offset(g) + c] = 1;
  }
  return x;
}

Assignment decode(const FeatureCatalog& catalog, const FeatureVector& x) {
  if (x.size() != catalog.dimension())
    throw std::invalid_argument("decode: vector length does not match catalog dimension");
  Assignment out;
  for (int g = 0; g < catalog.group_count(); ++g) {
    const auto& group = catalog.groups()[g];
    int chosen = -1;
    for (int c = 0; c < catalog.group_size(g); ++c) {
      if (!x.bits[catalog.offset(g) + c]) continue;
      if (chosen >= 0)
        throw std::invalid_argument("decode: group '" + group.name +
                                    "' has more than one bit set");
      chosen = c;
    }
    if (chosen < 0)
      throw std::invalid_argument("decode: group '" + group.name + "' has no bit set");
    out[group.name] = group.choices[chosen];
  }
  return out;
}

ConstraintSet::ConstraintSet(int dimension, Eigen::MatrixXd a, Eigen::VectorXd h,
                             Eigen::MatrixXd b, Eigen::VectorXd g)
    : dimension_(dimension), a_(std::move(a)), h_(std::move(h)),
      b_(std::move(b)), g_(std::move(g)) {
  if (a_.cols() != dimension_ && a_.rows() > 0)
    throw std::invalid_argument("constraints: equality column count != dimension");
  if (b_.cols() != dimension_ && b_.rows() > 0)
    throw std::invalid_argument("constraints: inequality column count != dimension");
  if (a_.rows() != h_.size() || b_.rows() != g_.size())
    throw std::invalid_argument("constraints: rhs length mismatch");
}

void ConstraintSet::append_equality(const Eigen::RowVectorXd& row, double rhs) {
  if (row.size() != dimension_)
    throw std::invalid_argument("append_equality: row length != dimension");
  a_.conservativeResize(a_.rows() + 1, dimension_);
  a_.row(a_.rows() - 1) = row;
  h_.conservativeResize(h_.size() + 1);
  h_[h_.size() - 1] = rhs;
  ++extra_eq_;
}

void ConstraintSet::append_inequality(const Eigen::RowVectorXd& row, double rhs) {
  if (row.size() != dimension_)
    throw std::invalid_argument("append_inequality: row length != dimension");
  b_.conservativeResize(b_.rows() + 1, dimension_);
  b_.row(b_.rows() - 1) = row;
  g_.conservativeResize(g_.size() + 1);
  g_[g_.size() - 1] = rhs;
}

ConstraintSet default_constraints(const FeatureCatalog& catalog) {
  const int d = catalog.dimension();
  const int groups = catalog.group_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(groups, d);
  for (int g = 0; g < groups; ++g)
    for (int c = 0; c < catalog.group_size(g); ++c)
      a(g, catalog.offset(g) + c) = 1.0;
  return ConstraintSet(d, std::move(a), Eigen::VectorXd::Ones(groups),
                       Eigen::MatrixXd(0, d), Eigen::VectorXd(0));
}

namespace {

bool all_integral(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m(i, j) != std::round(m(i, j))) return false;
  for (int i = 0; i < v.size(); ++i)
    if (v[i] != std::round(v[i])) return false;
  return true;
}

}  // namespace

bool is_feasible(const ConstraintSet& c, const FeatureVector& x) {
  if (x.size() != c.dimension())
    throw std::invalid_argument("is_feasible: dimension mismatch");
  const double eq_tol =
      all_integral(c.equality_matrix(), c.equality_rhs()) ? 0.0 : 1e-9;
  for (int r = 0; r < c.equality_matrix().rows(); ++r) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i)
      if (x.bits[i]) s += c.equality_matrix()(r, i);
    if (std::abs(s - c.equality_rhs()[r]) > eq_tol) return false;
  }
  for (int r = 0; r < c.inequality_matrix().rows(); ++r) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i)
      if (x.bits[i]) s += c.inequality_matrix()(r, i);
    if (s > c.inequality_rhs()[r] + 1e-9) return false;
  }
  return true;
}

Enumerator::Enumerator(const FeatureCatalog& catalog,
                       const ConstraintSet& constraints, std::uint64_t cap)
    : catalog_(catalog), constraints_(constraints) {
  if (constraints.dimension() != catalog.dimension())
    throw std::invalid_argument("enumerate: constraint dimension mismatch");
  if (catalog.combination_count() > cap)
    throw std::runtime_error(
        "enumerate: combination count " + std::to_string(catalog.combination_count()) +
        " exceeds the enumeration cap " + std::to_string(cap) +
        "; use sampled-candidate mode");
  odometer_.assign(catalog.group_count(), 0);
}

std::optional<FeatureVector> Enumerator::next() {
  while (!done_) {
    FeatureVector x;
    x.bits.assign(catalog_.dimension(), 0);
    for (int g = 0; g < catalog_.group_count(); ++g)
      x.bits[catalog_.offset(g) + odometer_[g]] = 1;

    // advance the odometer, last group fastest
    int g = catalog_.group_count() - 1;
    while (g >= 0) {
      if (++odometer_[g] < catalog_.group_size(g)) break;
      odometer_[g] = 0;
      --g;
    }
    if (g < 0) done_ = true;

    if (is_feasible(constraints_, x)) return x;
  }
  return std::nullopt;
}

std::vector<FeatureVector> enumerate_all(const FeatureCatalog& catalog,
                                         const ConstraintSet& constraints,
                                         std::uint64_t cap) {
  Enumerator e(catalog, constraints, cap);
  std::vector<FeatureVector> out;
  while (auto x = e.next()) out.push_back(std::move(*x));
  return out;
}

std::vector<FeatureVector> sample_uniform(const FeatureCatalog& catalog,
                                          const ConstraintSet& constraints,
                                          int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("sample_uniform: k must be >= 1");
  if (constraints.dimension() != catalog.dimension())
    throw std::invalid_argument("sample_uniform: constraint dimension mismatch");
  Rng rng(substream_seed(seed, "sampler"));
  std::vector<FeatureVector> out;
  out.reserve(k);
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
  constexpr std::uint64_t kWindow = 20000;
  while (out.size() < static_cast<std::size_t>(k)) {
    FeatureVector x;
    x.bits.assign(catalog.dimension(), 0);
    for (int g = 0; g < catalog.group_count(); ++g) {
      const int c = static_cast<int>(rng.uniform_below(catalog.group_size(g)));
      x.bits[catalog.offset(g) + c] = 1;
    }
    ++attempts;
    if (is_feasible(constraints, x)) {
      ++accepted;
      out.push_back(std::move(x));
    }
    if (attempts >= kWindow &&
        static_cast<double>(accepted) / static_cast<double>(attempts) < 1e-4)
      throw std::runtime_error(
          "sample_uniform: rejection acceptance rate below 1e-4; "
          "the extra constraints are too tight for sampling, use enumeration");
  }
  return out;
}

}  // namespace splearn
