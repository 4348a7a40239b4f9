#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "splearn/belief.hpp"
#include "splearn/feature_space.hpp"
#include "splearn/quantizer.hpp"

namespace splearn {

/// Symbolic mixed-integer second-order-cone model for the one-step
/// knowledge-gradient selection, over variables x, xhat, tau, y^1..y^J:
///
///   maximize   sum_j w_j theta' y^j + tau
///   subject to ||P^{1/2} xhat||_2 <= sum_j w_j t_j x' Sigma y^j
///              tau 1 - M(1 - x) <= xhat <= M x,  tau <= M
///              A x = h, B x <= g        (same for every y^j)
///              A xhat = tau h           (homogenized membership)
///   with P = (a/b) (A'A / h'h + Sigma + Sigma_Theta).
///
/// The model is emitted for external conic solvers and is not solved here;
/// the enumeration policy computes the identical objective exactly and is the
/// reference implementation. Note the cone right-hand side is bilinear in the
/// binaries, which is why the file carries it as an annotated quadratic
/// section rather than a plain LP row.
struct MisocpModel {
  int dimension = 0;
  int quantizer_points = 0;
  double big_m = 0.0;
  double a = 0.0;
  double b = 0.0;
  Eigen::VectorXd theta;
  Eigen::VectorXd weights;
  Eigen::VectorXd points;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd p;       // P as defined above, symmetrized
  Eigen::MatrixXd p_sqrt;  // symmetric eigen square root of P
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;
  std::vector<std::string> advisories;

  int variable_count() const {
    return dimension * (quantizer_points + 1) + dimension + 1;
  }

  bool operator==(const MisocpModel& other) const;
};

/// Builds the model from the current state, quantizer and feasible set.
/// Requires at least one equality row (P needs A and h) and h'h > 0.
MisocpModel build_kg_misocp(const KnowledgeState& state,
                            const Quantizer& quantizer,
                            const ConstraintSet& constraints,
                            double big_m = 1e4);

/// LP-style text serialization. The linear sections are ordinary LP syntax;
/// the cone section is annotated; a `Data` section carries every numeric
/// field at full precision and is what the parser reads back.
void write_model(const MisocpModel& model, std::ostream& os);
std::string model_to_string(const MisocpModel& model);

MisocpModel parse_model(std::istream& is);
MisocpModel parse_model_string(const std::string& text);

}  // namespace splearn
