#include "splearn/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "splearn/rng.hpp"
#include "splearn/student_t.hpp"

namespace splearn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMoveTol = 1e-8;
constexpr int kMaxIterations = 10000;

struct CellStats {
  std::vector<double> boundaries;  // size J+1, open at both ends
  std::vector<double> mass;        // size J
  std::vector<double> cond_mean;   // size J
};

std::vector<double> midpoint_boundaries(const std::vector<double>& pts) {
  const int j = static_cast<int>(pts.size());
  std::vector<double> b(j + 1);
  b[0] = -kInf;
  b[j] = kInf;
  for (int i = 1; i < j; ++i) b[i] = 0.5 * (pts[i - 1] + pts[i]);
  return b;
}

bool cells_of(double df, const std::vector<double>& pts, CellStats* out) {
  const int j = static_cast<int>(pts.size());
  out->boundaries = midpoint_boundaries(pts);
  out->mass.resize(j);
  out->cond_mean.resize(j);
  for (int i = 0; i < j; ++i) {
    const double m0 = student_t_mass(df, out->boundaries[i], out->boundaries[i + 1]);
    if (!(m0 > 0.0)) return false;
    out->mass[i] = m0;
    out->cond_mean[i] =
        student_t_partial_m1(df, out->boundaries[i], out->boundaries[i + 1]) / m0;
    if (!std::isfinite(out->cond_mean[i])) return false;
  }
  return true;
}

double max_residual(const std::vector<double>& pts, const CellStats& cells) {
  double mv = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    mv = std::max(mv, std::abs(cells.cond_mean[i] - pts[i]));
  return mv;
}

bool strictly_increasing(const std::vector<double>& pts) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i] > pts[i - 1])) return false;
  return true;
}

/// Newton step for F(t) = t - condmean(cells(t)). The Jacobian is
/// tridiagonal: each conditional mean depends only on its two midpoint
/// boundaries. Solved with the Thomas algorithm; the step is damped until it
/// keeps the points increasing and reduces the residual.
bool newton_step(double df, std::vector<double>* pts, CellStats* cells,
                 double current_residual) {
  const int j = static_cast<int>(pts->size());
  std::vector<double> dl(j, 0.0);  // d condmean_i / d lower boundary
  std::vector<double> du(j, 0.0);  // d condmean_i / d upper boundary
  for (int i = 1; i < j; ++i) {
    const double fb = student_t_pdf(df, cells->boundaries[i]);
    dl[i] = fb * (cells->cond_mean[i] - cells->boundaries[i]) / cells->mass[i];
    du[i - 1] =
        fb * (cells->boundaries[i] - cells->cond_mean[i - 1]) / cells->mass[i - 1];
  }
  std::vector<double> sub(j, 0.0), diag(j, 0.0), sup(j, 0.0), rhs(j, 0.0);
  for (int i = 0; i < j; ++i) {
    diag[i] = 1.0 - 0.5 * (dl[i] + du[i]);
    if (i > 0) sub[i] = -0.5 * dl[i];
    if (i < j - 1) sup[i] = -0.5 * du[i];
    rhs[i] = (*pts)[i] - cells->cond_mean[i];
  }
  // Thomas solve (tridiagonal)
  std::vector<double> cp(j, 0.0), dp(j, 0.0);
  if (diag[0] == 0.0) return false;
  cp[0] = j > 1 ? sup[0] / diag[0] : 0.0;
  dp[0] = rhs[0] / diag[0];
  for (int i = 1; i < j; ++i) {
    const double den = diag[i] - sub[i] * cp[i - 1];
    if (den == 0.0) return false;
    cp[i] = i < j - 1 ? sup[i] / den : 0.0;
    dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / den;
  }
  std::vector<double> delta(j);
  delta[j - 1] = dp[j - 1];
  for (int i = j - 2; i >= 0; --i) delta[i] = dp[i] - cp[i] * delta[i + 1];

  double step = 1.0;
  std::vector<double> cand(j);
  CellStats cand_cells;
  for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
    for (int i = 0; i < j; ++i) cand[i] = (*pts)[i] - step * delta[i];
    if (j > 1 && !strictly_increasing(cand)) continue;
    if (!cells_of(df, cand, &cand_cells)) continue;
    if (max_residual(cand, cand_cells) < current_residual) {
      *pts = std::move(cand);
      *cells = std::move(cand_cells);
      return true;
    }
  }
  return false;
}

/// Companded quantile initialization: the asymptotically optimal point
/// density for quadratic distortion is proportional to f^(1/3), and for a
/// Student-t that is again a (rescaled) Student-t with (df-2)/3 degrees of
/// freedom. This places the outer points near their stationary locations,
/// which plain quantile spacing does not for heavy tails.
std::vector<double> companded_init(int j, double df) {
  std::vector<double> pts(j);
  if (j == 1) {
    pts[0] = 0.0;
    return pts;
  }
  const double dfc = (df - 2.0) / 3.0;
  const double scale = std::sqrt(df / dfc);
  for (int i = 0; i < j; ++i)
    pts[i] = scale * student_t_quantile(dfc, (i + 0.5) / j);
  return pts;
}

double cell_distortion(double df, double lo, double hi, double point) {
  if (std::isfinite(lo) && std::isfinite(hi)) {
    auto integrand = [&](double t) {
      const double d = t - point;
      return d * d * student_t_pdf(df, t);
    };
    return adaptive_gk(integrand, lo, hi, 1e-10, 1e-16);
  }
  // unbounded outer cells: closed-form partial moments
  return student_t_partial_m2(df, lo, hi) -
         2.0 * point * student_t_partial_m1(df, lo, hi) +
         point * point * student_t_mass(df, lo, hi);
}

Quantizer assemble(int j, double df, std::vector<double> pts, int iterations) {
  Quantizer q;
  q.df = df;
  q.iterations = iterations;
  q.points = std::move(pts);
  const auto b = midpoint_boundaries(q.points);
  q.weights.resize(j);
  for (int i = 0; i < j; ++i)
    q.weights[i] = student_t_mass(df, b[i], b[i + 1]);
  q.distortion = 0.0;
  for (int i = 0; i < j; ++i)
    q.distortion += cell_distortion(df, b[i], b[i + 1], q.points[i]);
  return q;
}

bool solve_fixed_point(double df, std::vector<double>* pts, int* iterations) {
  CellStats cells;
  if (!cells_of(df, *pts, &cells)) return false;
  for (int it = 1; it <= kMaxIterations; ++it) {
    *iterations = it;
    const double residual = max_residual(*pts, cells);
    if (residual < kMoveTol) return true;
    // a couple of plain Lloyd sweeps smooth the start, then Newton takes over
    if (it > 2 && newton_step(df, pts, &cells, residual)) continue;
    *pts = cells.cond_mean;
    if (!cells_of(df, *pts, &cells)) return false;
  }
  return false;
}

}  // namespace

Quantizer build_quantizer(int points, double df, std::uint64_t seed) {
  if (points < 1)
    throw std::invalid_argument("quantizer: needs at least one point");
  if (!(df > 2.0))
    throw std::invalid_argument(
        "quantizer: df must exceed 2; the t distribution has infinite "
        "variance otherwise and the quadratic distortion is undefined");

  if (points == 1) {
    Quantizer q;
    q.points = {0.0};
    q.weights = {1.0};
    q.df = df;
    q.distortion = df / (df - 2.0);
    q.iterations = 0;
    return q;
  }

  std::vector<double> pts = companded_init(points, df);
  int iterations = 0;
  if (!solve_fixed_point(df, &pts, &iterations)) {
    // one retry with a seed-derived relative jitter on the initialization
    Rng rng(substream_seed(seed, "quantizer-restart"));
    pts = companded_init(points, df);
    for (auto& p : pts) p *= 1.0 + 0.05 * (rng.uniform01() - 0.5);
    std::sort(pts.begin(), pts.end());
    if (!solve_fixed_point(df, &pts, &iterations)) {
      CellStats cells;
      std::ostringstream msg;
      msg << "quantizer: fixed point not reached in " << kMaxIterations
          << " iterations (J=" << points << ", df=" << df << ")";
      if (cells_of(df, pts, &cells))
        msg << "; last max movement " << max_residual(pts, cells);
      throw std::runtime_error(msg.str());
    }
  }
  return assemble(points, df, std::move(pts), iterations);
}

std::shared_ptr<const Quantizer> cached_quantizer(int points, double df) {
  static std::mutex mu;
  static std::map<std::pair<int, long long>, std::shared_ptr<const Quantizer>> cache;
  const auto key = std::make_pair(points, std::llround(df * 1e6));
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const Quantizer>(build_quantizer(points, df));
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(built));
  return it->second;
}

}  // namespace splearn
