#pragma once

// Small dense Levenberg-Marquardt minimizer for unweighted nonlinear least
// squares, sized for the handful-of-parameter models used by the analysis
// (logistic-on-pedestal, one or two Gaussians). Uncertainties come from the
// residual-variance-scaled inverse of the normal-equations matrix at the
// optimum.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace snnevo {

// Fills `fitted` with model values for the given parameters; when `jacobian`
// is non-null, also fills it row-major with d fitted[i] / d params[j].
using LevMarModel =
    std::function<void(const std::vector<double>& params, std::vector<double>& fitted,
                       std::vector<double>* jacobian)>;

struct LevMarOptions {
    int max_iterations = 200;
    double chi2_rel_tol = 1e-12; // stop when an accepted step improves chi2 by less
    double lambda_init = 1e-3;
    double lambda_max = 1e14;
    // Optional parameter-domain guard; steps leaving the domain are rejected.
    std::function<bool(const std::vector<double>&)> valid;
};

struct LevMarResult {
    std::vector<double> params;
    std::vector<double> uncertainties; // sqrt of covariance diagonal
    std::vector<double> covariance;    // row-major p x p
    double chi2 = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool converged = false;
    std::string message;
};

namespace detail {

// Solves a p x p system in place by Gaussian elimination with partial
// pivoting. Returns false on a (near-)singular matrix.
inline bool solve_dense(std::vector<double> a, std::vector<double> b, std::size_t p,
                        std::vector<double>& x) {
    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::fabs(a[i * p + i]));
    const double tiny = std::max(scale, 1.0) * 1e-14 * static_cast<double>(p);

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(a[r * p + col]) > std::fabs(a[pivot * p + col])) pivot = r;
        if (std::fabs(a[pivot * p + col]) < tiny) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < p; ++c) std::swap(a[col * p + c], a[pivot * p + c]);
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t r = col + 1; r < p; ++r) {
            const double factor = a[r * p + col] / a[col * p + col];
            for (std::size_t c = col; c < p; ++c) a[r * p + c] -= factor * a[col * p + c];
            b[r] -= factor * b[col];
        }
    }
    x.assign(p, 0.0);
    for (std::size_t ri = p; ri-- > 0;) {
        double sum = b[ri];
        for (std::size_t c = ri + 1; c < p; ++c) sum -= a[ri * p + c] * x[c];
        x[ri] = sum / a[ri * p + ri];
    }
    return true;
}

// In-place Gauss-Jordan inverse; returns false on singularity.
inline bool invert_dense(std::vector<double> a, std::size_t p, std::vector<double>& inv) {
    inv.assign(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) inv[i * p + i] = 1.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::fabs(a[i * p + i]));
    const double tiny = std::max(scale, 1.0) * 1e-14 * static_cast<double>(p);

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(a[r * p + col]) > std::fabs(a[pivot * p + col])) pivot = r;
        if (std::fabs(a[pivot * p + col]) < tiny) return false;
        if (pivot != col)
            for (std::size_t c = 0; c < p; ++c) {
                std::swap(a[col * p + c], a[pivot * p + c]);
                std::swap(inv[col * p + c], inv[pivot * p + c]);
            }
        const double d = a[col * p + col];
        for (std::size_t c = 0; c < p; ++c) {
            a[col * p + c] /= d;
            inv[col * p + c] /= d;
        }
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const double factor = a[r * p + col];
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < p; ++c) {
                a[r * p + c] -= factor * a[col * p + c];
                inv[r * p + c] -= factor * inv[col * p + c];
            }
        }
    }
    return true;
}

inline double chi_squared(const std::vector<double>& y, const std::vector<double>& fitted) {
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - fitted[i];
        sum += r * r;
    }
    return sum;
}

} // namespace detail

inline LevMarResult levmar_fit(const std::vector<double>& y, const LevMarModel& model,
                               std::vector<double> initial, const LevMarOptions& opts = {}) {
    const std::size_t n = y.size();
    const std::size_t p = initial.size();

    LevMarResult res;
    res.params = std::move(initial);
    res.uncertainties.assign(p, std::numeric_limits<double>::quiet_NaN());

    if (n == 0 || p == 0) {
        res.message = "empty data or parameter vector";
        return res;
    }
    if (opts.valid && !opts.valid(res.params)) {
        res.message = "initial guess outside the valid domain";
        return res;
    }

    std::vector<double> fitted(n), trial_fitted(n);
    std::vector<double> jac(n * p);
    std::vector<double> normal(p * p), damped(p * p);
    std::vector<double> grad(p), step, trial(p);

    // A fit this close to interpolating the data counts as exact; without an
    // absolute floor the relative-improvement test can chase chi2 toward zero
    // for the whole iteration budget.
    double y_scale = 0.0;
    for (double v : y) y_scale += v * v;
    const double chi2_floor = 1e-12 * std::max(y_scale, 1e-300);

    model(res.params, fitted, &jac);
    res.chi2 = detail::chi_squared(y, fitted);

    double lambda = opts.lambda_init;
    bool need_jacobian = false; // jacobian already current

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (need_jacobian) {
            model(res.params, fitted, &jac);
            need_jacobian = false;
        }

        // Normal equations J^T J and gradient J^T r.
        for (std::size_t a = 0; a < p; ++a) {
            grad[a] = 0.0;
            for (std::size_t b = a; b < p; ++b) {
                double sum = 0.0;
                for (std::size_t i = 0; i < n; ++i) sum += jac[i * p + a] * jac[i * p + b];
                normal[a * p + b] = sum;
                normal[b * p + a] = sum;
            }
            for (std::size_t i = 0; i < n; ++i) grad[a] += jac[i * p + a] * (y[i] - fitted[i]);
        }

        if (res.chi2 <= chi2_floor) {
            res.converged = true;
            res.message = "exact fit";
            break;
        }

        // Marquardt-damped step; escalate lambda until a step is accepted.
        bool accepted = false;
        while (lambda <= opts.lambda_max) {
            damped = normal;
            for (std::size_t a = 0; a < p; ++a) {
                double d = damped[a * p + a];
                if (d <= 0.0) d = 1e-12;
                damped[a * p + a] = d * (1.0 + lambda);
            }
            if (!detail::solve_dense(damped, grad, p, step)) {
                lambda *= 10.0;
                continue;
            }
            for (std::size_t a = 0; a < p; ++a) trial[a] = res.params[a] + step[a];
            if (opts.valid && !opts.valid(trial)) {
                lambda *= 10.0;
                continue;
            }
            model(trial, trial_fitted, nullptr);
            const double trial_chi2 = detail::chi_squared(y, trial_fitted);
            if (std::isfinite(trial_chi2) && trial_chi2 <= res.chi2) {
                const double improvement = res.chi2 - trial_chi2;
                res.params = trial;
                res.chi2 = trial_chi2;
                lambda = std::max(lambda * 0.1, 1e-15);
                need_jacobian = true;
                accepted = true;
                if (improvement <= opts.chi2_rel_tol * std::max(res.chi2, 1e-300)) {
                    res.converged = true;
                    res.message = "chi2 stalled";
                }
                break;
            }
            lambda *= 10.0;
        }

        if (!accepted) {
            // No direction improves chi2 any further: treat as converged at
            // the current point rather than as a failure.
            res.converged = true;
            res.message = "no improving step";
            break;
        }
        if (res.converged) break;
    }

    if (!res.converged && res.iterations >= opts.max_iterations)
        res.message = "iteration limit reached";

    // Covariance from the undamped normal matrix at the final parameters.
    model(res.params, fitted, &jac);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += jac[i * p + a] * jac[i * p + b];
            normal[a * p + b] = sum;
            normal[b * p + a] = sum;
        }

    if (n > p && detail::invert_dense(normal, p, res.covariance)) {
        const double variance = res.chi2 / static_cast<double>(n - p);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) res.covariance[a * p + b] *= variance;
        bool finite = true;
        for (std::size_t a = 0; a < p; ++a) {
            const double va = res.covariance[a * p + a];
            res.uncertainties[a] = va >= 0.0 ? std::sqrt(va) : std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(res.uncertainties[a])) finite = false;
        }
        if (!finite) {
            res.converged = false;
            res.message += res.message.empty() ? "" : "; ";
            res.message += "non-finite parameter uncertainties";
        }
    } else {
        res.covariance.clear();
        res.converged = false;
        res.message += res.message.empty() ? "" : "; ";
        res.message += n > p ? "singular covariance" : "fewer data points than parameters";
    }

    return res;
}

} // namespace snnevo
