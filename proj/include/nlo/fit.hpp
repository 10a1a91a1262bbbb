#pragma once

// Small dense nonlinear least squares: damped Gauss-Newton with Marquardt
// scaling, central-difference Jacobians and covariance-based parameter
// standard deviations.

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nlo {

using ModelFn = std::function<double(std::span<const double> theta, double x)>;

struct DataPoint {
  double x;
  double y;
  double weight = 1.0;
};

struct Bounds {
  double lower;
  double upper;
};

struct FitProblem {
  ModelFn model;
  std::vector<DataPoint> data;
  std::vector<double> theta0;
  std::vector<Bounds> bounds;   // empty, or one entry per parameter
  std::vector<bool> fixed_mask; // empty, or one entry per parameter
};

struct FitOptions {
  int max_iter = 200;
  double step_tol = 1e-10;
  double grad_tol = 1e-10;
  // Relative decrease of the objective, actual and predicted, below which an
  // accepted step ends the iteration.
  double cost_tol = 1.49e-8;
  double damping_init = 1e-3;
  double eps_rel = 1e-6;
  double eps_abs = 1e-9;
};

enum class ConditionFlag { ok, near_singular };

std::string_view to_string(ConditionFlag flag);

struct FitResult {
  std::vector<double> theta;
  std::vector<double> sigma;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;  // sum of w_i r_i^2
  int iterations = 0;
  bool converged = false;
  ConditionFlag condition = ConditionFlag::ok;
};

/// Central differences, step h_j = max(eps_rel |theta_j|, eps_abs).
/// Rows follow abscissas, columns follow parameters.
Eigen::MatrixXd numeric_jacobian(const ModelFn& model, std::span<const double> theta,
                                 std::span<const double> abscissas,
                                 double eps_rel = 1e-6, double eps_abs = 1e-9);

struct Uncertainties {
  std::vector<double> sigma;
  Eigen::MatrixXd covariance;
  ConditionFlag condition = ConditionFlag::ok;
};

/// covariance = s^2 (J^T W J)^-1 with s^2 = sum(w r^2) / (n - n_free).
/// Empty weights mean unit weights. A near-singular normal matrix is inverted
/// through its eigen-decomposition with small eigenvalues dropped.
Uncertainties parameter_uncertainties(const Eigen::MatrixXd& jacobian,
                                      std::span<const double> residuals,
                                      std::span<const double> weights, int n_free);

/// Minimises sum w_i (y_i - model(theta, x_i))^2.
///
/// Damping starts at options.damping_init, is multiplied by 10 on a rejected
/// step and divided by 10 on an accepted one. Accepted steps never increase
/// the objective. Bounds are enforced by projection. Fixed parameters keep
/// their theta0 value and get zero sigma.
///
/// Converged means the relative step norm fell below step_tol, the
/// projected gradient norm below grad_tol, or an accepted step lowered the
/// objective by less than cost_tol relative with no larger decrease
/// predicted. Running out of iterations returns the best point with
/// converged = false. Throws FitError on malformed problems or a model that
/// is non-finite at theta0.
FitResult fit_least_squares(const FitProblem& problem, const FitOptions& options = {});

}  // namespace nlo
