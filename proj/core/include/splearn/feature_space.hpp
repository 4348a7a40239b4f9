#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace splearn {

/// One categorical prompt feature: a named group of mutually exclusive
/// choices. `payloads` carries optional per-choice text (demonstration-example
/// blocks, role pairs, ...) consumed by the evaluators; it is either empty or
/// has one entry per choice.
struct FeatureGroup {
  std::string name;
  std::vector<std::string> choices;
  std::vector<std::string> payloads;
};

/// Ordered collection of feature groups. The binary representation is the
/// concatenation of the one-hot blocks in group order, total length D.
class FeatureCatalog {
 public:
  explicit FeatureCatalog(std::vector<FeatureGroup> groups);

  int dimension() const { return dimension_; }
  const std::vector<FeatureGroup>& groups() const { return groups_; }
  int group_count() const { return static_cast<int>(groups_.size()); }

  /// First bit index of group g.
  int offset(int g) const { return offsets_[g]; }
  int group_size(int g) const { return static_cast<int>(groups_[g].choices.size()); }

  /// Index of the named group, or -1.
  int find_group(std::string_view name) const;
  /// Index of the labelled choice within group g, or -1.
  int find_choice(int g, std::string_view label) const;

  /// Total number of one-hot combinations (product of group sizes).
  /// Saturates at 2^63-1 for absurdly large catalogs.
  std::uint64_t combination_count() const;

 private:
  std::vector<FeatureGroup> groups_;
  std::vector<int> offsets_;
  int dimension_ = 0;
};

/// Binary prompt representation of catalog dimension D.
struct FeatureVector {
  std::vector<std::uint8_t> bits;

  int size() const { return static_cast<int>(bits.size()); }
  std::vector<int> ones() const;
  Eigen::VectorXd to_eigen() const;

  bool operator==(const FeatureVector& o) const { return bits == o.bits; }
  /// Lexicographic order on the bit pattern; the global tie-break rule.
  bool operator<(const FeatureVector& o) const { return bits < o.bits; }
};

/// theta' x for a binary x, touching only the set bits.
double dot(const Eigen::VectorXd& v, const FeatureVector& x);
/// M x restricted to set bits (column sums).
Eigen::VectorXd mat_vec(const Eigen::MatrixXd& m, const FeatureVector& x);
/// x' M x over set bits.
double quad_form(const Eigen::MatrixXd& m, const FeatureVector& x);

using Assignment = std::map<std::string, std::string>;

/// One-hot encodes a full group -> choice assignment.
FeatureVector encode(const FeatureCatalog& catalog, const Assignment& assignment);

/// Inverse of encode; rejects vectors that are not one-hot per group.
Assignment decode(const FeatureCatalog& catalog, const FeatureVector& x);

/// The feasible set X = {x | Ax = h, Bx <= g}. Generated constraint sets
/// always start with the per-group one-hot equality rows; user rows are
/// appended after them.
class ConstraintSet {
 public:
  ConstraintSet(int dimension, Eigen::MatrixXd a, Eigen::VectorXd h,
                Eigen::MatrixXd b, Eigen::VectorXd g);

  int dimension() const { return dimension_; }
  const Eigen::MatrixXd& equality_matrix() const { return a_; }
  const Eigen::VectorXd& equality_rhs() const { return h_; }
  const Eigen::MatrixXd& inequality_matrix() const { return b_; }
  const Eigen::VectorXd& inequality_rhs() const { return g_; }

  /// Number of user-appended rows beyond the generated one-hot block.
  int extra_equalities() const { return extra_eq_; }
  int extra_inequalities() const { return static_cast<int>(b_.rows()); }

  void append_equality(const Eigen::RowVectorXd& row, double rhs);
  void append_inequality(const Eigen::RowVectorXd& row, double rhs);

 private:
  int dimension_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd h_;
  Eigen::MatrixXd b_;
  Eigen::VectorXd g_;
  int extra_eq_ = 0;

  friend ConstraintSet default_constraints(const FeatureCatalog&);
};

/// One equality row per group: sum of the group's bits equals 1.
ConstraintSet default_constraints(const FeatureCatalog& catalog);

/// Ax = h (exact for integral data, 1e-9 otherwise) and Bx <= g + 1e-9.
bool is_feasible(const ConstraintSet& c, const FeatureVector& x);

/// Streams the feasible vectors in lexicographic group/choice order.
/// Cartesian product over the groups, filtered by the extra constraints.
class Enumerator {
 public:
  Enumerator(const FeatureCatalog& catalog, const ConstraintSet& constraints,
             std::uint64_t cap = 200000);

  std::optional<FeatureVector> next();

 private:
  const FeatureCatalog& catalog_;
  const ConstraintSet& constraints_;
  std::vector<int> odometer_;
  bool done_ = false;
};

/// Materializes the full enumeration. Throws when the raw combination count
/// exceeds `cap` (use sampled-candidate mode instead).
std::vector<FeatureVector> enumerate_all(const FeatureCatalog& catalog,
                                         const ConstraintSet& constraints,
                                         std::uint64_t cap = 200000);

/// k feasible vectors drawn uniformly (rejection over per-group uniform
/// choices). Deterministic for a given seed; duplicates permitted.
std::vector<FeatureVector> sample_uniform(const FeatureCatalog& catalog,
                                          const ConstraintSet& constraints,
                                          int k, std::uint64_t seed);

}  // namespace splearn
