#include "nlo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlo/errors.hpp"

namespace nlo {

namespace {

constexpr double kSingularRatio = 1e-12;
constexpr double kMaxDamping = 1e16;

struct NormalInverse {
  Eigen::MatrixXd inverse;
  ConditionFlag condition = ConditionFlag::ok;
};

// Inverse of a symmetric PSD normal matrix, analysed in correlation form so the
// conditioning test does not depend on parameter units.
NormalInverse invert_normal_matrix(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  NormalInverse out{Eigen::MatrixXd::Zero(n, n), ConditionFlag::ok};
  Eigen::VectorXd scale(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = a(j, j);
    if (!(d > 0.0) || !std::isfinite(d)) {
      out.condition = ConditionFlag::near_singular;
      scale(j) = 0.0;
    } else {
      scale(j) = 1.0 / std::sqrt(d);
    }
  }
  const Eigen::MatrixXd corr = scale.asDiagonal() * a * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.info() != Eigen::Success) {
    out.condition = ConditionFlag::near_singular;
    return out;
  }
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double top = values.size() > 0 ? values.maxCoeff() : 0.0;
  Eigen::VectorXd inv_values = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (top > 0.0 && values(j) > kSingularRatio * top) {
      inv_values(j) = 1.0 / values(j);
    } else {
      out.condition = ConditionFlag::near_singular;
    }
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::MatrixXd corr_inv = v * inv_values.asDiagonal() * v.transpose();
  out.inverse = scale.asDiagonal() * corr_inv * scale.asDiagonal();
  out.inverse = 0.5 * (out.inverse + out.inverse.transpose());
  return out;
}

Eigen::MatrixXd jacobian_columns(const ModelFn& model, std::span<const double> theta,
                                 std::span<const double> xs, const std::vector<int>& columns,
                                 double eps_rel, double eps_abs) {
  Eigen::MatrixXd jac(static_cast<Eigen::Index>(xs.size()),
                      static_cast<Eigen::Index>(columns.size()));
  std::vector<double> plus(theta.begin(), theta.end());
  std::vector<double> minus(theta.begin(), theta.end());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const int j = columns[c];
    const double h = std::max(eps_rel * std::abs(theta[j]), eps_abs);
    plus[j] = theta[j] + h;
    minus[j] = theta[j] - h;
    const double width = plus[j] - minus[j];
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double d = (model(plus, xs[i]) - model(minus, xs[i])) / width;
      if (!std::isfinite(d)) {
        throw FitError("non-finite model output while differentiating parameter " +
                       std::to_string(j));
      }
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = d;
    }
    plus[j] = theta[j];
    minus[j] = theta[j];
  }
  return jac;
}

class Problem {
 public:
  Problem(const FitProblem& p) : p_(p) {
    xs_.reserve(p.data.size());
    for (const auto& d : p.data) {
      xs_.push_back(d.x);
      ys_.push_back(d.y);
      ws_.push_back(d.weight);
    }
  }

  std::span<const double> xs() const { return xs_; }
  std::span<const double> weights() const { return ws_; }

  // Residuals y - f; returns false if any is non-finite.
  bool residuals(std::span<const double> theta, Eigen::VectorXd& r) const {
    r.resize(static_cast<Eigen::Index>(xs_.size()));
    for (std::size_t i = 0; i < xs_.size(); ++i) {
      const double v = ys_[i] - p_.model(theta, xs_[i]);
      if (!std::isfinite(v)) return false;
      r(static_cast<Eigen::Index>(i)) = v;
    }
    return true;
  }

  double cost(const Eigen::VectorXd& r) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += ws_[i] * r(i) * r(i);
    return s;
  }

 private:
  const FitProblem& p_;
  std::vector<double> xs_, ys_, ws_;
};

void check_problem(const FitProblem& p, std::size_t n_free) {
  if (!p.model) throw FitError("fit problem has no model");
  if (p.data.empty()) throw FitError("fit problem has no data");
  if (p.theta0.empty()) throw FitError("fit problem has no parameters");
  const std::size_t n_par = p.theta0.size();
  if (!p.bounds.empty() && p.bounds.size() != n_par)
    throw FitError("bounds size does not match parameter count");
  if (!p.fixed_mask.empty() && p.fixed_mask.size() != n_par)
    throw FitError("fixed_mask size does not match parameter count");
  std::size_t n_weighted = 0;
  for (const auto& d : p.data) {
    if (!(d.weight >= 0.0) || !std::isfinite(d.x) || !std::isfinite(d.y))
      throw FitError("data points need finite x, y and non-negative weight");
    if (d.weight > 0.0) ++n_weighted;
  }
  if (n_free > n_weighted)
    throw FitError("more free parameters than weighted data points");
  for (std::size_t j = 0; j < p.bounds.size(); ++j) {
    const auto& b = p.bounds[j];
    if (!(b.lower <= b.upper)) throw FitError("bounds with lower > upper");
    if (p.theta0[j] < b.lower || p.theta0[j] > b.upper)
      throw FitError("theta0[" + std::to_string(j) + "] lies outside its bounds");
  }
}

}  // namespace

std::string_view to_string(ConditionFlag flag) {
  return flag == ConditionFlag::ok ? "ok" : "near-singular";
}

Eigen::MatrixXd numeric_jacobian(const ModelFn& model, std::span<const double> theta,
                                 std::span<const double> abscissas, double eps_rel,
                                 double eps_abs) {
  std::vector<int> all(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) all[j] = static_cast<int>(j);
  return jacobian_columns(model, theta, abscissas, all, eps_rel, eps_abs);
}

Uncertainties parameter_uncertainties(const Eigen::MatrixXd& jacobian,
                                      std::span<const double> residuals,
                                      std::span<const double> weights, int n_free) {
  const auto n_rows = static_cast<std::size_t>(jacobian.rows());
  if (residuals.size() != n_rows || (!weights.empty() && weights.size() != n_rows))
    throw DomainError("jacobian, residual and weight sizes disagree");
  std::size_t n_points = 0;
  double rss = 0.0;
  Eigen::VectorXd w(static_cast<Eigen::Index>(n_rows));
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double wi = weights.empty() ? 1.0 : weights[i];
    w(static_cast<Eigen::Index>(i)) = wi;
    rss += wi * residuals[i] * residuals[i];
    if (wi > 0.0) ++n_points;
  }
  if (n_points <= static_cast<std::size_t>(n_free))
    throw DomainError("parameter uncertainties need more points than free parameters");
  const double s2 = rss / static_cast<double>(n_points - static_cast<std::size_t>(n_free));
  const Eigen::MatrixXd normal = jacobian.transpose() * w.asDiagonal() * jacobian;
  auto inv = invert_normal_matrix(normal);
  Uncertainties out;
  out.covariance = s2 * inv.inverse;
  out.condition = inv.condition;
  out.sigma.resize(static_cast<std::size_t>(jacobian.cols()));
  for (Eigen::Index j = 0; j < jacobian.cols(); ++j)
    out.sigma[static_cast<std::size_t>(j)] = std::sqrt(std::max(out.covariance(j, j), 0.0));
  return out;
}

FitResult fit_least_squares(const FitProblem& problem, const FitOptions& options) {
  const std::size_t n_par = problem.theta0.size();
  std::vector<int> free;
  for (std::size_t j = 0; j < n_par; ++j)
    if (problem.fixed_mask.empty() || !problem.fixed_mask[j]) free.push_back(static_cast<int>(j));
  check_problem(problem, free.size());

  const Problem prob(problem);
  auto project = [&](std::vector<double>& theta) {
    if (problem.bounds.empty()) return;
    for (int j : free)
      theta[j] = std::clamp(theta[j], problem.bounds[j].lower, problem.bounds[j].upper);
  };
  auto at_lower = [&](int j, const std::vector<double>& t) {
    return !problem.bounds.empty() && t[j] <= problem.bounds[j].lower;
  };
  auto at_upper = [&](int j, const std::vector<double>& t) {
    return !problem.bounds.empty() && t[j] >= problem.bounds[j].upper;
  };

  FitResult result;
  std::vector<double> theta = problem.theta0;
  Eigen::VectorXd r;
  if (!prob.residuals(theta, r)) throw FitError("model is non-finite at theta0");
  double cost = prob.cost(r);
  const auto nf = static_cast<Eigen::Index>(free.size());
  const Eigen::Map<const Eigen::VectorXd> w(prob.weights().data(),
                                            static_cast<Eigen::Index>(prob.weights().size()));

  double damping = options.damping_init;
  bool stalled = false;
  std::vector<double> trial(n_par);
  Eigen::VectorXd r_trial;

  for (int iter = 0; iter < options.max_iter && nf > 0; ++iter) {
    result.iterations = iter + 1;
    const Eigen::MatrixXd jac =
        jacobian_columns(problem.model, theta, prob.xs(), free, options.eps_rel, options.eps_abs);
    const Eigen::MatrixXd jw = jac.transpose() * w.asDiagonal();
    const Eigen::MatrixXd normal = jw * jac;
    const Eigen::VectorXd grad = jw * r;

    // Parameters held at a bound by the descent direction stay put this
    // iteration; the step is solved over the remaining ones.
    double pg_norm = 0.0;
    std::vector<bool> active(static_cast<std::size_t>(nf), true);
    for (Eigen::Index c = 0; c < nf; ++c) {
      const int j = free[static_cast<std::size_t>(c)];
      const double g = grad(c);
      if ((g < 0.0 && at_lower(j, theta)) || (g > 0.0 && at_upper(j, theta))) {
        active[static_cast<std::size_t>(c)] = false;
        continue;
      }
      pg_norm = std::max(pg_norm, std::abs(g));
    }
    if (pg_norm < options.grad_tol) {
      result.converged = true;
      break;
    }

    const double diag_floor = std::max(normal.diagonal().maxCoeff(), 1.0) * 1e-30;
    Eigen::VectorXd theta_free(nf);
    for (Eigen::Index c = 0; c < nf; ++c) theta_free(c) = theta[free[static_cast<std::size_t>(c)]];
    const double step_limit = options.step_tol * (theta_free.norm() + options.step_tol);

    while (true) {
      Eigen::MatrixXd damped = normal;
      Eigen::VectorXd rhs = grad;
      for (Eigen::Index c = 0; c < nf; ++c) {
        damped(c, c) += damping * std::max(normal(c, c), diag_floor);
        if (active[static_cast<std::size_t>(c)]) continue;
        damped.row(c).setZero();
        damped.col(c).setZero();
        damped(c, c) = 1.0;
        rhs(c) = 0.0;
      }
      Eigen::VectorXd delta = damped.ldlt().solve(rhs);
      if (!delta.allFinite()) delta = invert_normal_matrix(damped).inverse * rhs;

      trial = theta;
      for (Eigen::Index c = 0; c < nf; ++c) trial[free[static_cast<std::size_t>(c)]] += delta(c);
      project(trial);
      double step_norm2 = 0.0;
      for (int j : free) step_norm2 += (trial[j] - theta[j]) * (trial[j] - theta[j]);
      const bool small_step = std::sqrt(step_norm2) < step_limit;

      const double trial_cost = prob.residuals(trial, r_trial)
                                    ? prob.cost(r_trial)
                                    : std::numeric_limits<double>::infinity();
      if (trial_cost <= cost) {
        Eigen::VectorXd taken(nf);
        for (Eigen::Index c = 0; c < nf; ++c) {
          const int j = free[static_cast<std::size_t>(c)];
          taken(c) = trial[j] - theta[j];
        }
        const double predicted = 2.0 * taken.dot(grad) - taken.dot(normal * taken);
        const double actual = cost - trial_cost;
        const bool flat = actual <= options.cost_tol * cost && predicted <= options.cost_tol * cost;
        // Trust the local model more only when it predicted the decrease well.
        const double gain = predicted > 0.0 ? actual / predicted : 1.0;
        if (gain > 0.75) damping = std::max(damping / 10.0, 1e-15);
        else if (gain < 0.25) damping *= 2.0;
        theta = trial;
        r = r_trial;
        cost = trial_cost;
        if (small_step || flat) result.converged = true;
        break;
      }
      if (small_step) {
        // No descent left at the resolution of step_tol.
        result.converged = true;
        break;
      }
      damping *= 10.0;
      if (damping > kMaxDamping) {
        stalled = true;
        break;
      }
    }
    if (result.converged || stalled) break;
  }
  if (nf == 0) result.converged = true;

  result.theta = theta;
  result.residual_norm = cost;
  result.sigma.assign(n_par, 0.0);
  result.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_par),
                                            static_cast<Eigen::Index>(n_par));
  std::size_t n_weighted = 0;
  for (double wi : prob.weights())
    if (wi > 0.0) ++n_weighted;
  if (nf > 0 && n_weighted > free.size()) {
    const Eigen::MatrixXd jac =
        jacobian_columns(problem.model, theta, prob.xs(), free, options.eps_rel, options.eps_abs);
    const auto unc = parameter_uncertainties(
        jac, std::span<const double>(r.data(), static_cast<std::size_t>(r.size())),
        prob.weights(), static_cast<int>(free.size()));
    result.condition = unc.condition;
    for (Eigen::Index a = 0; a < nf; ++a) {
      const int ja = free[static_cast<std::size_t>(a)];
      result.sigma[ja] = unc.sigma[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < nf; ++b)
        result.covariance(ja, free[static_cast<std::size_t>(b)]) = unc.covariance(a, b);
    }
  }
  return result;
}

}  // namespace nlo
