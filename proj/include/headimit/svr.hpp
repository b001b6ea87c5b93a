#pragma once

// One-dimensional epsilon-SVR with an RBF kernel, trained by SMO.
//
// The dual is written over 2n variables (alpha_i, alpha*_i) exactly as in
// LIBSVM: y = +1 for the first n, -1 for the second n, linear term
// p = eps -/+ z. Working-set selection is the second-order rule of Fan, Chen
// and Lin (2005); ties resolve to the lowest index so the result is
// bit-reproducible for a given input.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "headimit/error.hpp"

namespace headimit::svr {

struct Hyperparams {
  double c = 1000.0;
  double epsilon = 0.5;
  double gamma = 1.0 / (2.0 * 30.0 * 30.0);
};

struct SolverOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 100000;
};

inline double rbf(double a, double b, double gamma) noexcept {
  const double d = a - b;
  return std::exp(-gamma * d * d);
}

struct Model {
  std::vector<double> support;       // support inputs
  std::vector<double> coefficients;  // alpha_i - alpha*_i, same length as support
  double bias = 0.0;
  double gamma = 0.0;

  double predict(double x) const noexcept {
    double f = bias;
    for (std::size_t i = 0; i < support.size(); ++i)
      f += coefficients[i] * rbf(support[i], x, gamma);
    return f;
  }
};

struct FitResult {
  Model model;
  std::size_t iterations = 0;
  bool converged = false;
};

inline FitResult fit(std::span<const double> x, std::span<const double> z, const Hyperparams& hp,
                     const SolverOptions& opts = {}) {
  const std::size_t n = x.size();
  if (n == 0 || z.size() != n) throw FitFailure("svr: empty or mismatched training data");
  if (!(hp.c > 0) || !(hp.epsilon >= 0) || !(hp.gamma > 0))
    throw FitFailure("svr: hyperparameters must be positive");

  const std::size_t l = 2 * n;
  constexpr double kTau = 1e-12;

  std::vector<double> kernel(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) kernel[i * n + j] = rbf(x[i], x[j], hp.gamma);

  auto sign = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
  auto q = [&](std::size_t a, std::size_t b) {
    return sign(a) * sign(b) * kernel[(a % n) * n + (b % n)];
  };

  std::vector<double> alpha(l, 0.0);
  std::vector<double> grad(l);
  for (std::size_t t = 0; t < n; ++t) {
    grad[t] = hp.epsilon - z[t];
    grad[t + n] = hp.epsilon + z[t];
  }
  const double c = hp.c;
  auto at_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  FitResult result;
  std::size_t iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    // Select i: maximal violating index in I_up.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (sign(t) > 0) {
        if (!at_upper(t) && -grad[t] > gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!at_lower(t) && grad[t] > gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    if (i == l) {
      result.converged = true;
      break;
    }

    // Select j in I_low by second-order gain.
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = l;
    const double qii = q(i, i);
    for (std::size_t t = 0; t < l; ++t) {
      if (sign(t) > 0) {
        if (at_lower(t)) continue;
        const double diff = gmax + grad[t];
        if (grad[t] > gmax2) gmax2 = grad[t];
        if (diff > 0) {
          double quad = qii + q(t, t) - 2.0 * sign(i) * q(i, t);
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj < best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      } else {
        if (at_upper(t)) continue;
        const double diff = gmax - grad[t];
        if (-grad[t] > gmax2) gmax2 = -grad[t];
        if (diff > 0) {
          double quad = qii + q(t, t) + 2.0 * sign(i) * q(i, t);
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj < best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      }
    }
    if (gmax + gmax2 < opts.tolerance || j == l) {
      result.converged = true;
      break;
    }

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double qij = q(i, j);
    if (sign(i) != sign(j)) {
      double quad = qii + q(j, j) + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = qii + q(j, j) - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }

    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < l; ++t) grad[t] += q(i, t) * di + q(j, t) * dj;
  }
  result.iterations = iter;

  // rho: average of y*G over free variables, midpoint of the feasible
  // interval if none are free.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = sign(t) * grad[t];
    if (at_upper(t)) {
      if (sign(t) < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (sign(t) > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  Model& m = result.model;
  m.gamma = hp.gamma;
  m.bias = -rho;
  for (std::size_t t = 0; t < n; ++t) {
    const double coef = alpha[t] - alpha[t + n];
    if (coef != 0.0) {
      m.support.push_back(x[t]);
      m.coefficients.push_back(coef);
    }
  }
  return result;
}

}  // namespace headimit::svr
