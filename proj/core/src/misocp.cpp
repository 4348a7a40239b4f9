#include "splearn/misocp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace splearn {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool mat_equal(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

bool vec_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

void write_vector(std::ostream& os, const char* key, const Eigen::VectorXd& v) {
  os << key;
  for (int i = 0; i < v.size(); ++i) os << ' ' << fmt(v[i]);
  os << '\n';
}

void write_matrix(std::ostream& os, const char* key, const Eigen::MatrixXd& m) {
  os << key << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) os << (j ? " " : " ") << fmt(m(i, j));
    os << '\n';
  }
}

Eigen::VectorXd read_vector(std::istream& is, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    if (!(is >> v[i])) throw std::runtime_error("model parse: truncated vector");
  return v;
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  int rows = 0, cols = 0;
  if (!(is >> rows >> cols))
    throw std::runtime_error("model parse: missing matrix dimensions");
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(is >> m(i, j)))
        throw std::runtime_error("model parse: truncated matrix");
  return m;
}

}  // namespace

bool MisocpModel::operator==(const MisocpModel& other) const {
  return dimension == other.dimension &&
         quantizer_points == other.quantizer_points && big_m == other.big_m &&
         a == other.a && b == other.b && vec_equal(theta, other.theta) &&
         vec_equal(weights, other.weights) && vec_equal(points, other.points) &&
         mat_equal(sigma, other.sigma) && mat_equal(p, other.p) &&
         mat_equal(p_sqrt, other.p_sqrt) &&
         mat_equal(eq_matrix, other.eq_matrix) && vec_equal(eq_rhs, other.eq_rhs) &&
         mat_equal(ineq_matrix, other.ineq_matrix) &&
         vec_equal(ineq_rhs, other.ineq_rhs) && advisories == other.advisories;
}

MisocpModel build_kg_misocp(const KnowledgeState& state,
                            const Quantizer& quantizer,
                            const ConstraintSet& constraints, double big_m) {
  if (constraints.equality_matrix().rows() < 1)
    throw std::invalid_argument(
        "misocp: at least one equality row is required (P uses A and h)");
  if (constraints.dimension() != state.dimension())
    throw std::invalid_argument("misocp: constraint dimension mismatch");
  const double hth = constraints.equality_rhs().squaredNorm();
  if (!(hth > 0.0))
    throw std::invalid_argument("misocp: equality rhs must be nonzero (h'h > 0)");

  MisocpModel m;
  m.dimension = state.dimension();
  m.quantizer_points = quantizer.size();
  m.big_m = big_m;
  m.a = state.a();
  m.b = state.b();
  m.theta = state.theta();
  m.weights = Eigen::Map<const Eigen::VectorXd>(quantizer.weights.data(),
                                                quantizer.size());
  m.points = Eigen::Map<const Eigen::VectorXd>(quantizer.points.data(),
                                               quantizer.size());
  m.sigma = state.sigma();
  m.eq_matrix = constraints.equality_matrix();
  m.eq_rhs = constraints.equality_rhs();
  m.ineq_matrix = constraints.inequality_matrix();
  m.ineq_rhs = constraints.inequality_rhs();

  const Eigen::MatrixXd& a_mat = constraints.equality_matrix();
  Eigen::MatrixXd p = (state.a() / state.b()) *
                      (a_mat.transpose() * a_mat / hth + state.sigma() +
                       state.sigma_theta());
  p = 0.5 * (p + p.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("misocp: eigen decomposition of P failed");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-10 * scale)
      throw std::runtime_error("misocp: P is not PSD after symmetrization");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  m.p = std::move(p);
  m.p_sqrt = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();

  m.advisories.push_back(
      "homogenization: membership of (xhat, tau) encoded as A xhat = tau h");
  const double wt_sum = m.weights.dot(m.points);
  if (std::abs(wt_sum) < 1e-6)
    m.advisories.push_back(
        "cone_rhs_weight_sum=" + fmt(wt_sum) +
        ": the w_j t_j coefficients of the cone right-hand side sum to ~0 "
        "under a symmetric quantizer; emitted verbatim, cross-check against "
        "the enumeration solver");
  return m;
}

void write_model(const MisocpModel& m, std::ostream& os) {
  const int d = m.dimension;
  const int j_count = m.quantizer_points;
  os << "* splearn kg misocp v1\n";
  os << "* maximize sum_j w_j theta'y_j + tau subject to the annotated cone,\n";
  os << "* big-M links and per-block membership rows; " << m.variable_count()
     << " variables total\n";
  for (const auto& note : m.advisories) os << "* advisory: " << note << '\n';

  os << "Maximize\n obj:";
  for (int j = 0; j < j_count; ++j)
    for (int i = 0; i < d; ++i) {
      const double c = m.weights[j] * m.theta[i];
      if (c == 0.0) continue;
      os << (c < 0 ? " - " : " + ") << fmt(std::abs(c)) << " y" << (j + 1) << "_" << i;
    }
  os << " + tau\n";

  os << "Subject To\n";
  auto emit_block = [&](const std::string& var, const std::string& tag) {
    for (int r = 0; r < m.eq_matrix.rows(); ++r) {
      os << ' ' << tag << "_eq_" << r << ':';
      for (int i = 0; i < d; ++i) {
        const double c = m.eq_matrix(r, i);
        if (c == 0.0) continue;
        os << (c < 0 ? " - " : " + ") << fmt(std::abs(c)) << ' ' << var << '_' << i;
      }
      os << " = " << fmt(m.eq_rhs[r]) << '\n';
    }
    for (int r = 0; r < m.ineq_matrix.rows(); ++r) {
      os << ' ' << tag << "_le_" << r << ':';
      for (int i = 0; i < d; ++i) {
        const double c = m.ineq_matrix(r, i);
        if (c == 0.0) continue;
        os << (c < 0 ? " - " : " + ") << fmt(std::abs(c)) << ' ' << var << '_' << i;
      }
      os << " <= " << fmt(m.ineq_rhs[r]) << '\n';
    }
  };
  emit_block("x", "x");
  for (int j = 0; j < j_count; ++j)
    emit_block("y" + std::to_string(j + 1), "y" + std::to_string(j + 1));
  for (int r = 0; r < m.eq_matrix.rows(); ++r) {
    os << " hom_" << r << ':';
    for (int i = 0; i < d; ++i) {
      const double c = m.eq_matrix(r, i);
      if (c == 0.0) continue;
      os << (c < 0 ? " - " : " + ") << fmt(std::abs(c)) << " xhat_" << i;
    }
    os << " - " << fmt(m.eq_rhs[r]) << " tau = 0\n";
  }
  for (int i = 0; i < d; ++i)
    os << " link_lo_" << i << ": tau + " << fmt(m.big_m) << " x_" << i
       << " - xhat_" << i << " <= " << fmt(m.big_m) << '\n';
  for (int i = 0; i < d; ++i)
    os << " link_up_" << i << ": xhat_" << i << " - " << fmt(m.big_m) << " x_"
       << i << " <= 0\n";
  os << " tau_cap: tau <= " << fmt(m.big_m) << '\n';

  os << "Cone\n";
  os << " * ||P^{1/2} xhat||_2 <= sum_j w_j t_j x' Sigma y^j\n";
  os << " * the right side is bilinear in the binary blocks; coefficient of\n";
  os << " * x_i y{j}_k is w_j t_j Sigma_{i,k} with Sigma in the Data section\n";
  for (int r = 0; r < d; ++r) {
    os << " psqrt_row_" << r << ':';
    for (int i = 0; i < d; ++i) os << ' ' << fmt(m.p_sqrt(r, i));
    os << '\n';
  }
  os << " rhs_scales:";
  for (int j = 0; j < j_count; ++j) os << ' ' << fmt(m.weights[j] * m.points[j]);
  os << '\n';

  os << "Bounds\n tau free\n";
  for (int i = 0; i < d; ++i) os << " xhat_" << i << " free\n";

  os << "Binary\n";
  for (int i = 0; i < d; ++i) os << " x_" << i;
  os << '\n';
  for (int j = 0; j < j_count; ++j) {
    for (int i = 0; i < d; ++i) os << " y" << (j + 1) << "_" << i;
    os << '\n';
  }

  os << "Data\n";
  os << "dimension " << d << '\n';
  os << "quantizer_points " << j_count << '\n';
  os << "big_m " << fmt(m.big_m) << '\n';
  os << "a " << fmt(m.a) << '\n';
  os << "b " << fmt(m.b) << '\n';
  write_vector(os, "theta", m.theta);
  write_vector(os, "weights", m.weights);
  write_vector(os, "points", m.points);
  write_matrix(os, "sigma", m.sigma);
  write_matrix(os, "p", m.p);
  write_matrix(os, "p_sqrt", m.p_sqrt);
  write_matrix(os, "eq_matrix", m.eq_matrix);
  write_vector(os, "eq_rhs", m.eq_rhs);
  write_matrix(os, "ineq_matrix", m.ineq_matrix);
  write_vector(os, "ineq_rhs", m.ineq_rhs);
  os << "advisories " << m.advisories.size() << '\n';
  for (const auto& note : m.advisories) os << note << '\n';
  os << "End\n";
}

std::string model_to_string(const MisocpModel& model) {
  std::ostringstream os;
  write_model(model, os);
  return os.str();
}

MisocpModel parse_model(std::istream& is) {
  std::string line;
  bool in_data = false;
  std::ostringstream data;
  while (std::getline(is, line)) {
    if (!in_data) {
      if (line == "Data") in_data = true;
      continue;
    }
    if (line == "End") break;
    data << line << '\n';
  }
  if (!in_data) throw std::runtime_error("model parse: no Data section");

  std::istringstream ds(data.str());
  MisocpModel m;
  std::string key;
  while (ds >> key) {
    if (key == "dimension") ds >> m.dimension;
    else if (key == "quantizer_points") ds >> m.quantizer_points;
    else if (key == "big_m") ds >> m.big_m;
    else if (key == "a") ds >> m.a;
    else if (key == "b") ds >> m.b;
    else if (key == "theta") m.theta = read_vector(ds, m.dimension);
    else if (key == "weights") m.weights = read_vector(ds, m.quantizer_points);
    else if (key == "points") m.points = read_vector(ds, m.quantizer_points);
    else if (key == "sigma") m.sigma = read_matrix(ds);
    else if (key == "p") m.p = read_matrix(ds);
    else if (key == "p_sqrt") m.p_sqrt = read_matrix(ds);
    else if (key == "eq_matrix") m.eq_matrix = read_matrix(ds);
    else if (key == "eq_rhs") m.eq_rhs = read_vector(ds, static_cast<int>(m.eq_matrix.rows()));
    else if (key == "ineq_matrix") m.ineq_matrix = read_matrix(ds);
    else if (key == "ineq_rhs") m.ineq_rhs = read_vector(ds, static_cast<int>(m.ineq_matrix.rows()));
    else if (key == "advisories") {
      int n = 0;
      ds >> n;
      std::getline(ds, key);  // eat the rest of the count line
      m.advisories.resize(n);
      for (int i = 0; i < n; ++i)
        if (!std::getline(ds, m.advisories[i]))
          throw std::runtime_error("model parse: truncated advisories");
    } else {
      throw std::runtime_error("model parse: unknown key '" + key + "'");
    }
  }
  if (m.dimension <= 0 || m.quantizer_points <= 0)
    throw std::runtime_error("model parse: missing dimensions");
  return m;
}

MisocpModel parse_model_string(const std::string& text) {
  std::istringstream is(text);
  return parse_model(is);
}

}  // namespace splearn
