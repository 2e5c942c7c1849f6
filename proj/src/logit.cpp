#include "ecu/logit.hpp"

#include <cmath>
#include <map>

namespace ecu::stats {

namespace {

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

Eigen::VectorXd probabilities(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = X * beta;
  return eta.unaryExpr([](double t) { return sigmoid(t); });
}

}  // namespace

double logit_loglik(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = X * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - softplus(eta[i]);
  return ll;
}

Eigen::VectorXd logit_gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  return X.transpose() * (y - probabilities(X, beta));
}

Eigen::MatrixXd logit_hessian(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  Eigen::VectorXd p = probabilities(X, beta);
  Eigen::VectorXd w = p.array() * (1.0 - p.array());
  return -(X.transpose() * w.asDiagonal() * X);
}

LogitResult logit_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<long>& clusters,
                      const LogitOptions& options) {
  const Eigen::Index n = X.rows(), k = X.cols();
  if (y.size() != n || static_cast<Eigen::Index>(clusters.size()) != n)
    throw std::invalid_argument("design, response and clusters differ in length");
  if (k == 0 || n <= k) throw std::invalid_argument("need more observations than coefficients");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] != 0.0 && y[i] != 1.0) throw std::invalid_argument("response must be 0/1");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) throw RankDeficient("design matrix has rank " + std::to_string(qr.rank()) + " < " + std::to_string(k));
  std::map<long, std::vector<Eigen::Index>> groups;
  for (Eigen::Index i = 0; i < n; ++i) groups[clusters[static_cast<std::size_t>(i)]].push_back(i);
  const auto G = static_cast<double>(groups.size());
  if (groups.size() < 2) throw std::invalid_argument("clustered errors need at least two clusters");

  LogitResult r;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  double ll = logit_loglik(X, y, beta);
  for (r.iterations = 0; r.iterations < options.max_iter; ++r.iterations) {
    Eigen::VectorXd grad = logit_gradient(X, y, beta);
    r.gradient_norm = grad.norm();
    if (r.gradient_norm <= options.gradient_tol) {
      r.converged = true;
      break;
    }
    Eigen::MatrixXd info = -logit_hessian(X, beta);
    Eigen::VectorXd step = info.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    double ll_next = logit_loglik(X, y, next);
    for (int h = 0; h < 40 && ll_next < ll - 1e-12 * std::abs(ll); ++h) {
      scale *= 0.5;
      next = beta + scale * step;
      ll_next = logit_loglik(X, y, next);
    }
    if ((next - beta).norm() <= 1e-15 * (1.0 + beta.norm())) {
      // no representable progress; accept if the gradient is already tiny
      r.converged = r.gradient_norm <= 1e-8;
      break;
    }
    beta = next;
    ll = ll_next;
    if (beta.norm() > options.divergence_norm) {
      r.note = "separation: coefficients diverge";
      break;
    }
  }
  r.beta = beta;
  r.log_likelihood = logit_loglik(X, y, beta);
  r.gradient_norm = logit_gradient(X, y, beta).norm();
  if (r.note.empty()) {
    const Eigen::VectorXd fitted = probabilities(X, beta);
    if ((fitted - y).cwiseAbs().maxCoeff() < 1e-6) {
      r.converged = false;
      r.note = "separation: the data are predicted perfectly";
    } else if ((X * beta).cwiseAbs().maxCoeff() > 35.0) {
      r.note = "possible quasi-separation: some fitted probabilities are numerically 0 or 1";
    }
  }
  if (!r.converged && r.note.empty()) r.note = "IRLS did not converge";

  Eigen::MatrixXd bread = (-logit_hessian(X, beta)).inverse();
  Eigen::VectorXd resid = y - probabilities(X, beta);
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
  for (const auto& [id, rows] : groups) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(k);
    for (auto i : rows) s += X.row(i).transpose() * resid[i];
    meat += s * s.transpose();
  }
  const double N = static_cast<double>(n), K = static_cast<double>(k);
  const double factor = G / (G - 1.0) * (N - 1.0) / (N - K);
  r.covariance = factor * bread * meat * bread;
  r.se = r.covariance.diagonal().array().sqrt();
  r.z = r.beta.array() / r.se.array();
  r.p = r.z.unaryExpr([](double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); });
  return r;
}

}  // namespace ecu::stats
