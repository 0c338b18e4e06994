#include <cmath>
#include <limits>

#include "anneal/metrics/metrics.hpp"
#include "detail.hpp"

namespace anneal {

double mean_pairwise_distance(const Points& points, int jobs) {
  const Eigen::Index n = points.rows();
  if (n < 2) return 0.0;
  Eigen::VectorXd rows(n);
#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) acc += (points.row(i) - points.row(j)).norm();
    rows[i] = acc;
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return detail::ordered_sum(rows) / pairs;
}

namespace {

// Log-domain half-step making every row of the plan sum to exp(log_w):
// out_i = eps * log_w - eps * log sum_j exp((pot_j - cost_ij) / eps).
void soft_min(const Points& cost, const Eigen::VectorXd& pot, double log_w, double eps,
              Eigen::VectorXd& out, int jobs) {
  const Eigen::Index rows = cost.rows();
#pragma omp parallel num_threads(jobs) if (jobs > 1)
  {
    Eigen::ArrayXd v(cost.cols());
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) {
      v = (pot.array() - cost.row(i).transpose().array()) / eps;
      const double top = v.maxCoeff();
      out[i] = eps * (log_w - top - std::log((v - top).exp().sum()));
    }
  }
}

// kernel_ij = exp((f_i + g_j - cost_ij) / eps), and its transpose.
void build_kernel(const Points& cost, const Eigen::VectorXd& f, const Eigen::VectorXd& g, double eps,
                  Points& kernel, Points& kernel_t, int jobs) {
#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    kernel.row(i) = ((f[i] + g.transpose().array() - cost.row(i).array()) / eps).exp();
  }
  kernel_t = kernel.transpose();
}

void row_products(const Points& k, const Eigen::VectorXd& x, Eigen::VectorXd& out, int jobs) {
#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
  for (Eigen::Index i = 0; i < k.rows(); ++i) out[i] = k.row(i).dot(x.transpose());
}

}  // namespace

// Stabilized log-domain Sinkhorn: potentials f, g carry the log-domain part of
// the plan P_ij = u_i exp((f_i + g_j - C_ij) / eps) v_j, and the scalings u, v
// are folded back into them whenever they leave [e^-30, e^30] or a row of the
// kernel underflows. Between absorptions an iteration is two matrix-vector
// products instead of two passes of exponentials.
SinkhornResult sinkhorn_w2(const Points& cloud, const Points& reference, const MetricConfig& cfg) {
  const Eigen::Index n = cloud.rows();
  const Eigen::Index m = reference.rows();
  if (n < 1 || m < 1) throw InputError("sinkhorn_w2: both sets need at least one point");
  if (cloud.cols() != reference.cols()) throw InputError("sinkhorn_w2: dimension mismatch");
  const double eps = cfg.ot.epsilon;
  if (!(eps > 0.0)) throw InputError("sinkhorn_w2: epsilon must be positive");
  const int jobs = cfg.jobs;

  SinkhornResult result;
  result.epsilon = eps;
  if (cfg.ot.standardize) {
    const double scale = mean_pairwise_distance(reference, jobs);
    if (scale > 0.0 && std::isfinite(scale)) result.scale = scale;
  }
  const double inv = 1.0 / result.scale;

  Points cost(n, m), cost_t(m, n);
#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      cost(i, j) = (cloud.row(i) - reference.row(j)).squaredNorm() * inv * inv;
    }
  }
  cost_t = cost.transpose();

  const double a = 1.0 / static_cast<double>(n);
  const double b = 1.0 / static_cast<double>(m);
  const double log_a = std::log(a), log_b = std::log(b);
  constexpr double kAbsorb = 30.0;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n), g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n), v = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd kv(n), ktu(m);
  Points kernel(n, m), kernel_t(m, n);

  auto log_domain_reset = [&] {
    for (Eigen::Index i = 0; i < n; ++i) f[i] += eps * std::log(u[i]);
    for (Eigen::Index j = 0; j < m; ++j) g[j] += eps * std::log(v[j]);
    if (!f.allFinite()) f.setZero();
    if (!g.allFinite()) g.setZero();
    soft_min(cost, g, log_a, eps, f, jobs);
    soft_min(cost_t, f, log_b, eps, g, jobs);
    u.setOnes();
    v.setOnes();
    build_kernel(cost, f, g, eps, kernel, kernel_t, jobs);
  };
  log_domain_reset();

  for (std::size_t it = 1;; ++it) {
    // Column marginals are exact here; measure the row marginal.
    row_products(kernel, v, kv, jobs);
    bool degenerate = false;
    double err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(kv[i] > 0.0) || !std::isfinite(kv[i])) degenerate = true;
      err += std::abs(u[i] * kv[i] - a);
    }
    result.iterations = it;
    result.marginal_error = err;
    if (!degenerate && err < cfg.ot.tolerance) {
      result.converged = true;
      break;
    }
    if (it >= cfg.ot.max_iterations) break;
    if (degenerate) {
      log_domain_reset();
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i) u[i] = a / kv[i];
    row_products(kernel_t, u, ktu, jobs);
    bool absorb = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      v[j] = b / ktu[j];
      if (!(ktu[j] > 0.0) || !std::isfinite(v[j])) absorb = true;
    }
    absorb = absorb || (u.array().log().abs() > kAbsorb).any() || (v.array().log().abs() > kAbsorb).any();
    if (absorb) log_domain_reset();
  }

  Eigen::VectorXd rows(n);
#pragma omp parallel for schedule(static) num_threads(jobs) if (jobs > 1)
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) acc += kernel(i, j) * v[j] * cost(i, j);
    rows[i] = u[i] * acc;
  }
  result.w2 = std::sqrt(std::max(0.0, detail::ordered_sum(rows))) * result.scale;
  return result;
}

}  // namespace anneal
