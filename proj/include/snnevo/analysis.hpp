#pragma once

// Quantitative characterization of learning trajectories: a logistic curve on
// a flat pedestal fitted to each trajectory, Gaussian (or two-Gaussian)
// fits to ensemble histograms, and the cross-strategy comparison summary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snnevo/config.hpp"
#include "snnevo/experiment.hpp"
#include "snnevo/levmar.hpp"

namespace snnevo {

// Logistic on a flat pedestal:
//   f(g) = amplitude / (1 + exp(steepness * (g - inflection))) + pedestal
// For positive amplitude and steepness this falls from amplitude + pedestal
// (the initial equilibrium) to pedestal (the convergence point), with its
// midpoint at the inflection generation.
inline double eval_logistic(double g, double amplitude, double steepness, double inflection,
                            double pedestal) {
    const double z = steepness * (g - inflection);
    if (z > 500.0) return pedestal;               // saturated low side
    if (z < -500.0) return amplitude + pedestal;  // saturated high side
    return amplitude / (1.0 + std::exp(z)) + pedestal;
}

struct LogisticFit {
    double amplitude = 0.0;  // punctuation amplitude, time-steps
    double steepness = 0.0;  // inflection slope, 1/generations
    double inflection = 0.0; // inflection point, generations
    double pedestal = 0.0;   // convergence point, time-steps
    double amplitude_err = 0.0;
    double steepness_err = 0.0;
    double inflection_err = 0.0;
    double pedestal_err = 0.0;
    double chi2 = std::numeric_limits<double>::quiet_NaN();
    int n_points = 0;
    int iterations = 0;
    bool converged = false;
    std::string message;
};

// Data-driven starting point: pedestal from the tail, amplitude from the
// head, inflection where the trajectory first crosses halfway down.
inline std::vector<double> logistic_initial_guess(const std::vector<TrajectoryPoint>& points,
                                                  double init_slope) {
    const std::size_t n = points.size();
    const std::size_t tenth = std::max<std::size_t>(1, n / 10);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < tenth; ++i) head += points[i].t_value;
    for (std::size_t i = n - tenth; i < n; ++i) tail += points[i].t_value;
    head /= static_cast<double>(tenth);
    tail /= static_cast<double>(tenth);

    const double pedestal = tail;
    const double amplitude = head - tail;
    double inflection =
        0.5 * (static_cast<double>(points.front().generation) + static_cast<double>(points.back().generation));
    if (amplitude > 0.0) {
        const double halfway = pedestal + amplitude / 2.0;
        for (const TrajectoryPoint& pt : points) {
            if (pt.t_value < halfway) {
                inflection = static_cast<double>(pt.generation);
                break;
            }
        }
    }
    return {amplitude, init_slope, inflection, pedestal};
}

inline LogisticFit fit_logistic(const std::vector<TrajectoryPoint>& points,
                                std::optional<std::vector<double>> initial = std::nullopt,
                                double init_slope = 0.02) {
    LogisticFit fit;
    fit.n_points = static_cast<int>(points.size());
    if (points.size() < 20) {
        fit.message = "trajectory has fewer than 20 points";
        return fit;
    }

    double lo = points[0].t_value, hi = points[0].t_value;
    for (const TrajectoryPoint& pt : points) {
        lo = std::min(lo, pt.t_value);
        hi = std::max(hi, pt.t_value);
    }
    if (hi - lo <= 1e-9 * std::max(std::fabs(hi), 1.0)) {
        fit.amplitude = 0.0;
        fit.pedestal = points[0].t_value;
        fit.message = "flat trajectory: amplitude unidentifiable";
        return fit;
    }

    // The generation axis is mapped to [-1, 1] internally; the slope and
    // inflection scale with it, which keeps the normal equations comparably
    // conditioned whether a trajectory spans 10^2 or 10^5 generations. The
    // mapping is linear and diagonal, so parameters and their uncertainties
    // transform back exactly.
    const double g_mid =
        0.5 * (static_cast<double>(points.front().generation) + static_cast<double>(points.back().generation));
    const double g_span = std::max(
        0.5 * (static_cast<double>(points.back().generation) - static_cast<double>(points.front().generation)),
        1.0);

    std::vector<double> y(points.size());
    std::vector<double> g(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        g[i] = (static_cast<double>(points[i].generation) - g_mid) / g_span;
        y[i] = points[i].t_value;
    }

    LevMarModel model = [&g](const std::vector<double>& th, std::vector<double>& fitted,
                             std::vector<double>* jac) {
        const double amplitude = th[0], steepness = th[1], inflection = th[2], pedestal = th[3];
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double z = steepness * (g[i] - inflection);
            double s, slope_term;
            if (z > 500.0) {
                s = 0.0;
                slope_term = 0.0;
            } else if (z < -500.0) {
                s = 1.0;
                slope_term = 0.0;
            } else {
                const double e = std::exp(z);
                s = 1.0 / (1.0 + e);
                slope_term = s * s * e; // s * (1 - s), overflow-safe
            }
            fitted[i] = amplitude * s + pedestal;
            if (jac) {
                double* row = jac->data() + i * 4;
                row[0] = s;
                row[1] = -amplitude * slope_term * (g[i] - inflection);
                row[2] = amplitude * slope_term * steepness;
                row[3] = 1.0;
            }
        }
    };

    // Containment box in scaled units. A trajectory whose steep fall starts
    // at its very first point has a flat chi2 valley toward amplitude ->
    // infinity, inflection -> -infinity (the exponential limit). The box
    // confines the inflection to the observed generation range (with a small
    // margin), so such fits settle at the window edge instead of running
    // away: the reported inflection is then censored at the left edge of the
    // observable axis, which is as much as the data can say.
    const double t_range = hi - lo;
    LevMarOptions opts;
    opts.valid = [lo, hi, t_range](const std::vector<double>& th) {
        return std::fabs(th[0]) <= 10.0 * t_range && std::fabs(th[1]) <= 4000.0 &&
               th[2] >= -1.0 && th[2] <= 1.0 && th[3] >= lo - 2.0 * t_range &&
               th[3] <= hi + 2.0 * t_range;
    };

    // Multi-start: the data-driven recipe plus a few alternative inflection
    // placements across the generation axis; lowest converged chi2 wins.
    std::vector<double> recipe = initial ? *initial : logistic_initial_guess(points, init_slope);
    recipe[1] *= g_span;                     // slope in scaled units
    recipe[2] = (recipe[2] - g_mid) / g_span; // inflection in scaled units
    recipe[2] = std::clamp(recipe[2], -1.0, 1.0);
    if (!opts.valid(recipe)) recipe = {hi - lo, init_slope * g_span, 0.0, lo};

    std::vector<std::vector<double>> starts = {recipe};
    for (double q : {-0.9, -0.6, -0.2, 0.2, 0.6}) {
        std::vector<double> s = recipe;
        s[2] = q;
        starts.push_back(s);
        s[0] = t_range;
        s[3] = lo;
        starts.push_back(s);
    }

    LevMarResult res;
    bool have = false;
    for (const auto& start : starts) {
        LevMarResult candidate = levmar_fit(y, model, start, opts);
        if (!have || (candidate.converged && !res.converged) ||
            (candidate.converged == res.converged && candidate.chi2 < res.chi2)) {
            res = std::move(candidate);
            have = true;
        }
    }

    // A fit pinned against the inflection box is censored: the punctuation
    // center lies outside the generations the trajectory can actually see,
    // so its location (and amplitude) are not resolvable from this data.
    if (res.converged && std::fabs(res.params[2]) >= 1.0 - 1e-9) {
        res.converged = false;
        res.message = res.params[2] < 0.0
                          ? "inflection precedes the observable window"
                          : "inflection beyond the trajectory end";
    }

    fit.amplitude = res.params[0];
    fit.steepness = res.params[1] / g_span;
    fit.inflection = res.params[2] * g_span + g_mid;
    fit.pedestal = res.params[3];
    if (res.uncertainties.size() == 4) {
        fit.amplitude_err = res.uncertainties[0];
        fit.steepness_err = res.uncertainties[1] / g_span;
        fit.inflection_err = res.uncertainties[2] * g_span;
        fit.pedestal_err = res.uncertainties[3];
    }
    fit.chi2 = res.chi2;
    fit.iterations = res.iterations;
    fit.converged = res.converged;
    fit.message = res.message;
    return fit;
}

// ---------------------------------------------------------------------------
// Histograms and Gaussian fits
// ---------------------------------------------------------------------------

struct HistogramSpec {
    double bin_width = 1.0;
    // Explicit range; NaN means derive it from the samples, aligned to
    // multiples of the bin width.
    double range_lo = std::numeric_limits<double>::quiet_NaN();
    double range_hi = std::numeric_limits<double>::quiet_NaN();
};

struct Histogram {
    double lo = 0.0;
    double bin_width = 1.0;
    std::vector<double> counts;

    double edge(std::size_t k) const { return lo + static_cast<double>(k) * bin_width; }
    double center(std::size_t k) const { return lo + (static_cast<double>(k) + 0.5) * bin_width; }
    double total() const {
        double sum = 0.0;
        for (double c : counts) sum += c;
        return sum;
    }
};

inline Histogram build_histogram(const std::vector<double>& samples, const HistogramSpec& spec) {
    if (samples.empty()) throw std::invalid_argument("build_histogram: empty sample set");
    if (!(spec.bin_width > 0.0)) throw std::invalid_argument("build_histogram: bin width must be > 0");

    double lo = spec.range_lo, hi = spec.range_hi;
    if (std::isnan(lo) || std::isnan(hi)) {
        double mn = samples[0], mx = samples[0];
        for (double s : samples) {
            mn = std::min(mn, s);
            mx = std::max(mx, s);
        }
        if (std::isnan(lo)) lo = std::floor(mn / spec.bin_width) * spec.bin_width;
        if (std::isnan(hi)) hi = std::ceil(mx / spec.bin_width) * spec.bin_width;
        if (hi <= lo) hi = lo + spec.bin_width;
    }

    Histogram h;
    h.lo = lo;
    h.bin_width = spec.bin_width;
    const std::size_t n_bins =
        static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / spec.bin_width - 1e-9)));
    h.counts.assign(n_bins, 0.0);
    for (double s : samples) {
        if (s < lo || s > hi) continue; // outside an explicit range
        std::size_t k = static_cast<std::size_t>((s - lo) / spec.bin_width);
        if (k >= n_bins) k = n_bins - 1; // top edge is inclusive
        h.counts[k] += 1.0;
    }
    return h;
}

struct GaussianComponent {
    double area = 0.0; // sample mass under the component
    double mean = 0.0;
    double sigma = 0.0;
    double area_err = 0.0;
    double mean_err = 0.0;
    double sigma_err = 0.0;
    double weight = 0.0; // area / total area
};

struct GaussianFit {
    std::vector<GaussianComponent> components; // ascending mean
    double chi2 = std::numeric_limits<double>::quiet_NaN();
    int n_bins = 0;
    bool converged = false;
    std::string message;

    double minor_weight() const {
        if (components.size() < 2) return 0.0;
        double w = components[0].weight;
        for (const GaussianComponent& c : components) w = std::min(w, c.weight);
        return w;
    }
};

namespace detail {

inline double gauss_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }
inline double gauss_pdf(double z) { return 0.39894228040143267794 * std::exp(-0.5 * z * z); }

// Moment-based single-Gaussian guess for a sample subset. The binning
// inflates the raw variance by width^2/12, which matters when sigma is
// smaller than the bin, so it is subtracted back out.
inline void moment_guess(const std::vector<double>& samples, double bin_width, double& mean,
                         double& sigma) {
    double m = 0.0;
    for (double s : samples) m += s;
    m /= static_cast<double>(samples.size());
    double var = 0.0;
    for (double s : samples) var += (s - m) * (s - m);
    var /= static_cast<double>(samples.size());
    mean = m;
    sigma = std::sqrt(std::max(var, bin_width * bin_width / 16.0));
}

} // namespace detail

// Least-squares fit of bin-integrated Gaussians to the histogram counts.
// Components are parameterized by (area, mean, sigma), so the fitted model
// for bin k is sum_c area_c * (CDF at the upper edge - CDF at the lower
// edge). Using bin integrals rather than center values keeps sigma honest
// when it is comparable to the bin width.
inline GaussianFit fit_gaussians(const std::vector<double>& samples, const HistogramSpec& spec,
                                 int n_components) {
    if (samples.empty()) throw std::invalid_argument("fit_gaussians: empty sample set");
    if (n_components != 1 && n_components != 2)
        throw std::invalid_argument("fit_gaussians: n_components must be 1 or 2");

    const Histogram h = build_histogram(samples, spec);
    GaussianFit fit;
    fit.n_bins = static_cast<int>(h.counts.size());

    const std::size_t p = static_cast<std::size_t>(3 * n_components);
    if (h.counts.size() <= p) {
        fit.message = "degenerate histogram: not enough bins to constrain the fit";
        return fit;
    }

    // Starting points. One component: global moments. Two components: one
    // start splits the samples midway between the two tallest well-separated
    // bins, another splits at the widest run of empty bins (isolating a
    // sparse detached mode), and the winner by chi2 is kept.
    std::vector<std::vector<double>> starts;
    if (n_components == 1) {
        double mean, sigma;
        detail::moment_guess(samples, h.bin_width, mean, sigma);
        starts.push_back({h.total(), mean, sigma});
    } else {
        auto split_start = [&](double split) -> std::optional<std::vector<double>> {
            std::vector<double> left, right;
            for (double s : samples) (s <= split ? left : right).push_back(s);
            if (left.empty() || right.empty()) return std::nullopt;
            double m1, s1, m2, s2;
            detail::moment_guess(left, h.bin_width, m1, s1);
            detail::moment_guess(right, h.bin_width, m2, s2);
            return std::vector<double>{static_cast<double>(left.size()), m1, s1,
                                       static_cast<double>(right.size()), m2, s2};
        };

        std::size_t k1 = 0;
        for (std::size_t k = 0; k < h.counts.size(); ++k)
            if (h.counts[k] > h.counts[k1]) k1 = k;
        std::size_t k2 = h.counts.size();
        for (std::size_t k = 0; k < h.counts.size(); ++k) {
            const std::size_t gap = k > k1 ? k - k1 : k1 - k;
            if (gap < 3) continue;
            if (k2 == h.counts.size() || h.counts[k] > h.counts[k2]) k2 = k;
        }
        if (k2 == h.counts.size()) // no separated peak; fall back to the runner-up bin
            for (std::size_t k = 0; k < h.counts.size(); ++k)
                if (k != k1 && (k2 == h.counts.size() || h.counts[k] > h.counts[k2])) k2 = k;
        if (auto s = split_start(0.5 * (h.center(k1) + h.center(k2)))) starts.push_back(*s);

        // Largest gap between consecutive sorted samples that still leaves at
        // least a tenth of the mass on each side; isolates a sparse detached
        // mode that the per-bin peak search can miss.
        std::vector<double> sorted = samples;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t min_side = std::max<std::size_t>(2, sorted.size() / 10);
        double best_gap = 0.0, gap_split = 0.0;
        for (std::size_t i = min_side; i + min_side <= sorted.size(); ++i) {
            const double gap = sorted[i] - sorted[i - 1];
            if (gap > best_gap) {
                best_gap = gap;
                gap_split = 0.5 * (sorted[i] + sorted[i - 1]);
            }
        }
        if (best_gap > 0.0)
            if (auto s = split_start(gap_split)) starts.push_back(*s);

        if (starts.empty()) {
            fit.message = "degenerate histogram: could not seed two components";
            return fit;
        }
    }

    std::vector<double> edges(h.counts.size() + 1);
    for (std::size_t k = 0; k < edges.size(); ++k) edges[k] = h.edge(k);

    const int nc = n_components;
    LevMarModel model = [&edges, nc](const std::vector<double>& th, std::vector<double>& fitted,
                                     std::vector<double>* jac) {
        const std::size_t n_bins = edges.size() - 1;
        const std::size_t np = static_cast<std::size_t>(3 * nc);
        std::fill(fitted.begin(), fitted.end(), 0.0);
        if (jac) std::fill(jac->begin(), jac->end(), 0.0);
        for (int c = 0; c < nc; ++c) {
            const double area = th[3 * c + 0];
            const double mean = th[3 * c + 1];
            const double sigma = th[3 * c + 2];
            for (std::size_t k = 0; k < n_bins; ++k) {
                const double z0 = (edges[k] - mean) / sigma;
                const double z1 = (edges[k + 1] - mean) / sigma;
                const double mass = detail::gauss_cdf(z1) - detail::gauss_cdf(z0);
                fitted[k] += area * mass;
                if (jac) {
                    double* row = jac->data() + k * np + 3 * c;
                    const double d0 = detail::gauss_pdf(z0);
                    const double d1 = detail::gauss_pdf(z1);
                    row[0] = mass;
                    row[1] = -(area / sigma) * (d1 - d0);
                    row[2] = -(area / sigma) * (z1 * d1 - z0 * d0);
                }
            }
        }
    };

    LevMarOptions opts;
    opts.max_iterations = 500;
    opts.chi2_rel_tol = 1e-10;
    const double sigma_floor = h.bin_width * 1e-6;
    opts.valid = [nc, sigma_floor](const std::vector<double>& th) {
        for (int c = 0; c < nc; ++c)
            if (!(th[3 * c] > 0.0) || !(th[3 * c + 2] > sigma_floor)) return false;
        return true;
    };

    // A converged candidate whose mean uncertainties exceed the data span sits
    // on a degenerate ridge (for example two components reshaping one hump);
    // prefer candidates with meaningful covariance.
    const double data_span =
        h.bin_width * static_cast<double>(h.counts.size());
    auto quality = [&](const LevMarResult& r) {
        if (!r.converged) return 0;
        for (int c = 0; c < nc; ++c) {
            const double mean_err = r.uncertainties[3 * c + 1];
            if (!std::isfinite(mean_err) || mean_err > data_span) return 1;
        }
        return 2;
    };

    LevMarResult res;
    bool have = false;
    for (const auto& start : starts) {
        LevMarResult candidate = levmar_fit(h.counts, model, start, opts);
        if (!have || quality(candidate) > quality(res) ||
            (quality(candidate) == quality(res) && candidate.chi2 < res.chi2)) {
            res = std::move(candidate);
            have = true;
        }
    }

    // A component much narrower than a bin leaves its sigma (and through it
    // the covariance) unconstrained: the histogram cannot resolve widths
    // below its own quantization. Pin such sigmas at the quantization scale
    // (the sigma of a uniform spread across one bin) and refit the remaining
    // parameters, so locations and areas keep meaningful uncertainties.
    if (quality(res) != 2) {
        const double sigma_pin = h.bin_width * 0.2886751345948129; // 1/sqrt(12)
        std::vector<bool> frozen(p, false);
        std::vector<double> pinned = res.params;
        bool any = false;
        for (int c = 0; c < nc; ++c) {
            if (res.params[3 * c + 2] < 0.5 * h.bin_width) {
                frozen[3 * c + 2] = true;
                pinned[3 * c + 2] = std::max(res.params[3 * c + 2], sigma_pin);
                any = true;
            }
        }
        if (any) {
            std::vector<std::size_t> free_idx;
            for (std::size_t i = 0; i < p; ++i)
                if (!frozen[i]) free_idx.push_back(i);
            LevMarModel reduced = [&](const std::vector<double>& th, std::vector<double>& fitted,
                                      std::vector<double>* jac) {
                std::vector<double> full = pinned;
                for (std::size_t i = 0; i < free_idx.size(); ++i) full[free_idx[i]] = th[i];
                if (!jac) {
                    model(full, fitted, nullptr);
                    return;
                }
                std::vector<double> full_jac(fitted.size() * p);
                model(full, fitted, &full_jac);
                for (std::size_t k = 0; k < fitted.size(); ++k)
                    for (std::size_t i = 0; i < free_idx.size(); ++i)
                        (*jac)[k * free_idx.size() + i] = full_jac[k * p + free_idx[i]];
            };
            LevMarOptions reduced_opts = opts;
            reduced_opts.valid = [&](const std::vector<double>& th) {
                for (std::size_t i = 0; i < free_idx.size(); ++i)
                    if (free_idx[i] % 3 == 0 && !(th[i] > 0.0)) return false;
                return true;
            };
            std::vector<double> reduced_start;
            for (std::size_t i : free_idx) reduced_start.push_back(pinned[i]);
            LevMarResult refit = levmar_fit(h.counts, reduced, reduced_start, reduced_opts);
            if (refit.converged) {
                res.params = pinned;
                res.uncertainties.assign(p, 0.0);
                for (std::size_t i = 0; i < free_idx.size(); ++i) {
                    res.params[free_idx[i]] = refit.params[i];
                    res.uncertainties[free_idx[i]] = refit.uncertainties[i];
                }
                res.chi2 = refit.chi2;
                res.converged = true;
                res.message = refit.message + "; sigma pinned at the bin quantization scale";
                bool sane = true;
                for (int c = 0; c < nc; ++c) {
                    const double mean_err = res.uncertainties[3 * c + 1];
                    if (!std::isfinite(mean_err) || mean_err > data_span) sane = false;
                }
                if (!sane) res.converged = false;
            }
        }
    }
    if (quality(res) == 1) {
        res.converged = false;
        res.message += res.message.empty() ? "" : "; ";
        res.message += "degenerate covariance: component locations unresolved";
    }

    double total_area = 0.0;
    for (int c = 0; c < nc; ++c) total_area += res.params[3 * c];
    for (int c = 0; c < nc; ++c) {
        GaussianComponent comp;
        comp.area = res.params[3 * c + 0];
        comp.mean = res.params[3 * c + 1];
        comp.sigma = res.params[3 * c + 2];
        if (res.uncertainties.size() == p) {
            comp.area_err = res.uncertainties[3 * c + 0];
            comp.mean_err = res.uncertainties[3 * c + 1];
            comp.sigma_err = res.uncertainties[3 * c + 2];
        }
        comp.weight = total_area > 0.0 ? comp.area / total_area : 0.0;
        fit.components.push_back(comp);
    }
    std::sort(fit.components.begin(), fit.components.end(),
              [](const GaussianComponent& a, const GaussianComponent& b) { return a.mean < b.mean; });
    fit.chi2 = res.chi2;
    fit.converged = res.converged;
    fit.message = res.message;
    return fit;
}

// ---------------------------------------------------------------------------
// Strategy comparison
// ---------------------------------------------------------------------------

struct BimodalityVerdict {
    bool bimodal = false;
    double chi2_one = std::numeric_limits<double>::quiet_NaN();
    double chi2_two = std::numeric_limits<double>::quiet_NaN();
    double minor_weight = 0.0;
    GaussianFit one;
    GaussianFit two;
};

// Fits one- and two-component models and applies the acceptance rule: the
// two-component model must cut chi2 below `bimodal_chi2_ratio` times the
// one-component chi2, carry a minor weight above `bimodal_min_weight`, and
// its modes must actually separate (mean gap above twice the wider sigma) —
// otherwise the second component is just reshaping a single skewed hump.
inline BimodalityVerdict assess_bimodality(const std::vector<double>& samples,
                                           const HistogramSpec& spec,
                                           const AnalysisParams& params) {
    BimodalityVerdict verdict;
    verdict.one = fit_gaussians(samples, spec, 1);
    verdict.two = fit_gaussians(samples, spec, 2);
    verdict.chi2_one = verdict.one.chi2;
    verdict.chi2_two = verdict.two.chi2;
    verdict.minor_weight = verdict.two.minor_weight();
    bool separated = false;
    if (verdict.two.components.size() == 2) {
        const GaussianComponent& a = verdict.two.components[0];
        const GaussianComponent& b = verdict.two.components[1];
        separated = b.mean - a.mean > 2.0 * std::max(a.sigma, b.sigma);
    }
    verdict.bimodal = verdict.two.converged && separated && std::isfinite(verdict.one.chi2) &&
                      verdict.two.chi2 < params.bimodal_chi2_ratio * verdict.one.chi2 &&
                      verdict.minor_weight > params.bimodal_min_weight;
    return verdict;
}

struct SampleStats {
    int n = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stddev = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
};

inline SampleStats sample_stats(const std::vector<double>& xs) {
    SampleStats s;
    s.n = static_cast<int>(xs.size());
    if (xs.empty()) return s;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - m) * (x - m);
    var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
    s.mean = m;
    s.stddev = std::sqrt(var);
    s.std_error = s.stddev / std::sqrt(static_cast<double>(xs.size()));
    return s;
}

struct StrategyStats {
    std::string name;
    int n_trajectories = 0;
    int n_converged = 0;
    std::vector<double> inflections;  // g0 of each converged fit
    std::vector<double> convergences; // pedestal of each converged fit
    SampleStats inflection_sample;
    SampleStats convergence_sample;
    GaussianFit inflection_fit;          // single Gaussian over the inflection histogram
    BimodalityVerdict convergence_modes; // one- vs two-component verdict
    double suboptimal_fraction = 0.0;    // minor-peak area fraction when bimodal

    // Inflection location used in the speedup ratio: the fitted Gaussian mean
    // when available, otherwise the sample mean.
    double inflection_location() const {
        if (inflection_fit.converged && !inflection_fit.components.empty())
            return inflection_fit.components[0].mean;
        return inflection_sample.mean;
    }
};

struct StrategyComparison {
    StrategyStats first;  // baseline (speedup reference)
    StrategyStats second;
    double speedup = std::numeric_limits<double>::quiet_NaN(); // 1 - g0_second / g0_first
    std::vector<std::string> warnings;
};

// A fit enters the distributions only when it converged onto a physically
// meaningful punctuation: positive amplitude and slope, positive pedestal.
inline bool accepted_fit(const LogisticFit& f) {
    return f.converged && f.amplitude > 0.0 && f.steepness > 0.0 && f.pedestal > 0.0;
}

inline StrategyStats summarize_strategy(const std::string& name,
                                        const std::vector<LogisticFit>& fits,
                                        const AnalysisParams& params,
                                        std::vector<std::string>& warnings) {
    StrategyStats s;
    s.name = name;
    s.n_trajectories = static_cast<int>(fits.size());
    for (const LogisticFit& f : fits) {
        if (!accepted_fit(f)) continue;
        ++s.n_converged;
        s.inflections.push_back(f.inflection);
        s.convergences.push_back(f.pedestal);
    }
    s.inflection_sample = sample_stats(s.inflections);
    s.convergence_sample = sample_stats(s.convergences);
    if (s.n_converged < 10)
        warnings.push_back(name + ": only " + std::to_string(s.n_converged) +
                           " converged fits; distribution estimates are unreliable");
    if (!s.inflections.empty()) {
        s.inflection_fit =
            fit_gaussians(s.inflections, HistogramSpec{params.inflection_bin_width}, 1);
        s.convergence_modes = assess_bimodality(
            s.convergences, HistogramSpec{params.convergence_bin_width}, params);
        s.suboptimal_fraction =
            s.convergence_modes.bimodal ? s.convergence_modes.minor_weight : 0.0;
    }
    return s;
}

// Per-strategy distribution fits plus the headline numbers: the speedup of
// the second strategy over the first and the fraction of runs converging to
// the sub-optimal mode.
inline StrategyComparison compare_strategies(const std::vector<LogisticFit>& first_fits,
                                             const std::vector<LogisticFit>& second_fits,
                                             const AnalysisParams& params,
                                             const std::string& first_name = "mutation",
                                             const std::string& second_name = "crossover") {
    StrategyComparison cmp;
    cmp.first = summarize_strategy(first_name, first_fits, params, cmp.warnings);
    cmp.second = summarize_strategy(second_name, second_fits, params, cmp.warnings);
    const double a = cmp.first.inflection_location();
    const double b = cmp.second.inflection_location();
    if (std::isfinite(a) && std::isfinite(b) && a != 0.0) cmp.speedup = 1.0 - b / a;
    return cmp;
}

} // namespace snnevo
