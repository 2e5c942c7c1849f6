#pragma once

// Binary logit by IRLS with cluster-robust (sandwich) standard errors.

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ecu::stats {

class RankDeficient : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LogitOptions {
  int max_iter = 100;
  double gradient_tol = 1e-10;
  double divergence_norm = 1e6;  // coefficient norm treated as separation
};

struct LogitResult {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;  // clustered
  Eigen::VectorXd z;
  Eigen::VectorXd p;   // two-sided normal
  Eigen::MatrixXd covariance;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string note;
};

double logit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
Eigen::VectorXd logit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);
/// Hessian of the log-likelihood (negative definite).
Eigen::MatrixXd logit_hessian(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta);

/// Throws RankDeficient for a rank-deficient design and std::invalid_argument
/// for fewer than two clusters or non-binary y.
LogitResult logit_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<long>& clusters,
                      const LogitOptions& options = {});

}  // namespace ecu::stats
