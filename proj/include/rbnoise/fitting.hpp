// Copyright 2026 The rbnoise Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBNOISE_FITTING_HPP
#define RBNOISE_FITTING_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Damped (Levenberg-style) weighted least squares for the handful of small
// fit models this project needs. The accepted-step residual is monotone
// non-increasing; termination on gradient/step tolerance 1e-10 or 200
// iterations. Positivity-constrained parameters are fitted in log space.

namespace rbnoise::fit {

enum class ParamTransform { identity, log_positive };

struct FitModel {
  std::string name;
  std::vector<std::string> param_names;
  std::vector<ParamTransform> transforms;
  // y at x for natural-space parameters. Returning a non-finite value marks
  // the parameter point invalid (the step is rejected).
  std::function<double(std::span<const double>, double)> predict;
  // Optional analytic natural-space Jacobian row dy/dtheta at x; when absent
  // a central finite difference is used.
  std::function<void(std::span<const double>, double, std::span<double>)>
      jacobian;
};

struct FitReport {
  std::string model_name;
  std::vector<std::string> param_names;
  std::vector<double> params;         // natural space
  std::vector<double> uncertainties;  // 1 sigma, natural space
  double chi2 = 0.0;
  double residual_norm = 0.0;
  int dof = 0;
  bool converged = false;
  int iterations = 0;
  bool regularized = false;
  double condition_number = 0.0;
  std::vector<std::string> notes;

  double param(const std::string& name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i) {
      if (param_names[i] == name) return params[i];
    }
    throw std::out_of_range("FitReport: no parameter named " + name);
  }
  double uncertainty(const std::string& name) const {
    for (std::size_t i = 0; i < param_names.size(); ++i) {
      if (param_names[i] == name) return uncertainties[i];
    }
    throw std::out_of_range("FitReport: no parameter named " + name);
  }
};

namespace detail {

// Solve the symmetric positive (semi)definite system A x = b in place by
// Cholesky; returns false if a pivot collapses.
inline bool cholesky_solve(std::vector<double>& a, std::vector<double>& b,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        a[i * n + i] = std::sqrt(s);
      } else {
        a[i * n + j] = s / a[j * n + j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return true;
}

// Eigenvalues of a small symmetric matrix by cyclic Jacobi; used for the
// covariance and its condition number.
inline std::vector<double> jacobi_eigen(std::vector<double> a, std::size_t n,
                                        std::vector<double>* vectors = nullptr) {
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
    if (off < 1e-300) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = 0.5 * (a[q * n + q] - a[p * n + p]) / apq;
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
  if (vectors) *vectors = std::move(v);
  return eig;
}

}  // namespace detail

// Weighted damped least squares. x, y are the data; yerr may be empty (or
// all-zero), in which case unit weights are used and the covariance is
// rescaled by chi^2/dof.
inline FitReport fit_nonlinear(const FitModel& model, std::span<const double> x,
                               std::span<const double> y,
                               std::span<const double> yerr,
                               std::span<const double> init,
                               int max_iterations = 200) {
  const std::size_t n = x.size();
  const std::size_t np = model.param_names.size();
  if (y.size() != n || (!yerr.empty() && yerr.size() != n)) {
    throw std::invalid_argument("fit_nonlinear: data size mismatch");
  }
  if (init.size() != np) {
    throw std::invalid_argument("fit_nonlinear: wrong number of initial values");
  }
  if (n <= np) {
    throw std::invalid_argument(
        "fit_nonlinear: need more data points than parameters");
  }

  FitReport report;
  report.model_name = model.name;
  report.param_names = model.param_names;
  report.dof = static_cast<int>(n - np);

  bool weighted = false;
  std::vector<double> w(n, 1.0);
  if (!yerr.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (yerr[i] > 0.0) {
        w[i] = 1.0 / (yerr[i] * yerr[i]);
        weighted = true;
      }
    }
    if (weighted) {
      // Any zero-error points get the tightest supplied weight.
      double wmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!yerr.empty() && yerr[i] > 0.0) wmax = std::max(wmax, w[i]);
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (yerr[i] <= 0.0) w[i] = wmax;
      }
    }
  }

  // Internal (possibly log) coordinates.
  auto to_internal = [&](std::span<const double> nat) {
    std::vector<double> u(np);
    for (std::size_t j = 0; j < np; ++j) {
      if (model.transforms[j] == ParamTransform::log_positive) {
        if (!(nat[j] > 0.0)) {
          throw std::domain_error(
              "fit_nonlinear: initial value for log-space parameter '" +
              model.param_names[j] + "' must be positive");
        }
        u[j] = std::log(nat[j]);
      } else {
        u[j] = nat[j];
      }
    }
    return u;
  };
  auto to_natural = [&](const std::vector<double>& u) {
    std::vector<double> nat(np);
    for (std::size_t j = 0; j < np; ++j) {
      nat[j] = model.transforms[j] == ParamTransform::log_positive
                   ? std::exp(u[j])
                   : u[j];
    }
    return nat;
  };

  auto chi2_of = [&](const std::vector<double>& nat,
                     std::vector<double>* residuals) -> double {
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = model.predict(nat, x[i]);
      if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
      const double r = (f - y[i]) * std::sqrt(w[i]);
      if (residuals) (*residuals)[i] = r;
      chi2 += r * r;
    }
    return chi2;
  };

  // Weighted Jacobian in internal coordinates.
  auto jacobian_at = [&](const std::vector<double>& u,
                         const std::vector<double>& nat,
                         std::vector<double>& jac) {
    std::vector<double> row(np);
    if (model.jacobian) {
      for (std::size_t i = 0; i < n; ++i) {
        model.jacobian(nat, x[i], row);
        const double sw = std::sqrt(w[i]);
        for (std::size_t j = 0; j < np; ++j) {
          double d = row[j];
          if (model.transforms[j] == ParamTransform::log_positive) d *= nat[j];
          jac[i * np + j] = d * sw;
        }
      }
    } else {
      for (std::size_t j = 0; j < np; ++j) {
        const double h = 1e-7 * (1.0 + std::abs(u[j]));
        std::vector<double> up = u, dn = u;
        up[j] += h;
        dn[j] -= h;
        const auto nup = to_natural(up), ndn = to_natural(dn);
        for (std::size_t i = 0; i < n; ++i) {
          const double fp = model.predict(nup, x[i]);
          const double fm = model.predict(ndn, x[i]);
          jac[i * np + j] = (fp - fm) / (2.0 * h) * std::sqrt(w[i]);
        }
      }
    }
  };

  std::vector<double> u = to_internal(init);
  std::vector<double> nat = to_natural(u);
  std::vector<double> residuals(n);
  double chi2 = chi2_of(nat, &residuals);
  if (!std::isfinite(chi2)) {
    throw std::domain_error("fit_nonlinear: initial point is invalid");
  }

  double lambda = 1e-3;
  std::vector<double> jac(n * np);
  bool converged = false;
  int iter = 0;
  for (; iter < max_iterations && !converged; ++iter) {
    jacobian_at(u, nat, jac);
    // Normal equations.
    std::vector<double> jtj(np * np, 0.0), jtr(np, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < np; ++a) {
        jtr[a] += jac[i * np + a] * residuals[i];
        for (std::size_t b = 0; b <= a; ++b) {
          jtj[a * np + b] += jac[i * np + a] * jac[i * np + b];
        }
      }
    }
    for (std::size_t a = 0; a < np; ++a)
      for (std::size_t b = a + 1; b < np; ++b) jtj[a * np + b] = jtj[b * np + a];

    // Scale-free gradient measure (cosine of the gradient against the
    // residual, per parameter direction).
    double gcos = 0.0;
    for (std::size_t a = 0; a < np; ++a) {
      const double denom =
          std::sqrt(std::max(jtj[a * np + a], 1e-300)) *
              std::sqrt(std::max(chi2, 1e-300)) +
          1e-300;
      gcos = std::max(gcos, std::abs(jtr[a]) / denom);
    }
    if (gcos < 1e-10) {
      converged = true;
      break;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      std::vector<double> a = jtj;
      for (std::size_t d = 0; d < np; ++d) {
        const double diag = jtj[d * np + d];
        a[d * np + d] = diag + lambda * std::max(diag, 1e-300);
      }
      std::vector<double> delta(np);
      for (std::size_t d = 0; d < np; ++d) delta[d] = -jtr[d];
      if (!detail::cholesky_solve(a, delta, np)) {
        // Singular normal matrix: inflate damping and flag.
        report.regularized = true;
        lambda = std::max(lambda * 10.0, 1e-6);
        continue;
      }
      // Trust-region style cap: an unbounded Gauss-Newton step along a
      // poorly constrained direction (especially in log coordinates) can fly
      // onto a flat plateau and strand the fit there. Log-space components
      // are capped at two e-folds per iteration, identity components at
      // twice their current magnitude (plus an absolute floor).
      double shrink = 1.0;
      for (std::size_t d = 0; d < np; ++d) {
        const double cap =
            model.transforms[d] == ParamTransform::log_positive
                ? 2.0
                : 2.0 * (1.0 + std::abs(u[d]));
        if (std::abs(delta[d]) > cap) {
          shrink = std::min(shrink, cap / std::abs(delta[d]));
        }
      }
      double step_inf = 0.0;
      std::vector<double> u_try = u;
      for (std::size_t d = 0; d < np; ++d) {
        const double dd = delta[d] * shrink;
        u_try[d] += dd;
        step_inf = std::max(step_inf, std::abs(dd) / (1.0 + std::abs(u[d])));
      }
      const auto nat_try = to_natural(u_try);
      std::vector<double> res_try(n);
      const double chi2_try = chi2_of(nat_try, &res_try);
      if (chi2_try <= chi2) {
        const double drop = chi2 - chi2_try;
        u = std::move(u_try);
        nat = nat_try;
        residuals = std::move(res_try);
        chi2 = chi2_try;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        if (step_inf < 1e-10 || drop < 1e-14 * std::max(1.0, chi2)) {
          converged = true;
        }
        break;
      }
      lambda *= 7.0;
      if (lambda > 1e14) break;
    }
    if (!stepped) {
      // No acceptable step: either at a minimum or genuinely stuck.
      converged = gcos < 1e-5;
      break;
    }
  }

  report.iterations = iter;
  report.converged = converged;
  report.params = nat;
  report.chi2 = chi2;
  report.residual_norm = std::sqrt(chi2);
  if (!converged) {
    report.notes.push_back("fit did not converge; values are best effort");
  }

  // Covariance at the optimum: (J^T J)^{-1}, rescaled by chi2/dof when the
  // data carried no errors. The normal matrix is equilibrated first so that
  // parameter-scale disparities do not masquerade as rank deficiency.
  jacobian_at(u, nat, jac);
  std::vector<double> jtj(np * np, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < np; ++a)
      for (std::size_t b = 0; b < np; ++b)
        jtj[a * np + b] += jac[i * np + a] * jac[i * np + b];
  }
  std::vector<double> d(np, 1.0);
  for (std::size_t a = 0; a < np; ++a) {
    const double diag = jtj[a * np + a];
    d[a] = diag > 0.0 ? 1.0 / std::sqrt(diag) : 1.0;
  }
  std::vector<double> scaled(np * np);
  for (std::size_t a = 0; a < np; ++a)
    for (std::size_t b = 0; b < np; ++b)
      scaled[a * np + b] = jtj[a * np + b] * d[a] * d[b];
  std::vector<double> vecs;
  const auto eig = detail::jacobi_eigen(scaled, np, &vecs);
  double emax = 0.0, emin = std::numeric_limits<double>::infinity();
  for (double e : eig) {
    emax = std::max(emax, e);
    emin = std::min(emin, e);
  }
  report.condition_number = emin > 0.0 ? emax / emin
                                       : std::numeric_limits<double>::infinity();
  if (!(emin > emax * 1e-12)) {
    report.regularized = true;
    report.notes.push_back("near-singular covariance; parameters degenerate");
  }
  const double scale = weighted ? 1.0 : chi2 / std::max(report.dof, 1);
  report.uncertainties.assign(np, 0.0);
  for (std::size_t a = 0; a < np; ++a) {
    double var_u = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      const double ek = eig[k];
      if (ek > emax * 1e-12) {
        var_u += vecs[a * np + k] * vecs[a * np + k] / ek;
      }
    }
    var_u *= d[a] * d[a] * scale;
    double sigma = std::sqrt(std::max(var_u, 0.0));
    if (model.transforms[a] == ParamTransform::log_positive) sigma *= nat[a];
    report.uncertainties[a] = sigma;
  }
  return report;
}

}  // namespace rbnoise::fit

#endif  // RBNOISE_FITTING_HPP
