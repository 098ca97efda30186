#include "lorasf/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace lorasf {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

struct CurvaturePair {
    std::vector<double> s;  // x_{k+1} - x_k
    std::vector<double> y;  // g_{k+1} - g_k
    double rho;             // 1 / (y . s)
};

// phi(a) = f(x + a d); evaluates value and phi'(a), leaving the trial point
// and gradient in scratch buffers for reuse once the step is accepted.
struct LinePoint {
    double alpha;
    double value;
    double slope;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::span<const double> x0,
                           const LbfgsOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("lbfgs: empty parameter vector");

    LbfgsResult result;
    result.x.assign(x0.begin(), x0.end());

    std::vector<double> grad(n);
    double value = objective(result.x, grad);
    if (!std::isfinite(value)) throw std::runtime_error("lbfgs: objective not finite at x0");
    result.value_trace.push_back(value);

    std::deque<CurvaturePair> history;
    std::vector<double> direction(n);
    std::vector<double> trial_x(n);
    std::vector<double> trial_grad(n);
    std::vector<double> alpha_coeffs;

    const double c1 = options.wolfe_c1;
    const double c2 = options.wolfe_c2;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (sup_norm(grad) <= options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        // Two-loop recursion: direction = -H grad.
        std::copy(grad.begin(), grad.end(), direction.begin());
        alpha_coeffs.assign(history.size(), 0.0);
        for (std::size_t i = history.size(); i-- > 0;) {
            const CurvaturePair& p = history[i];
            alpha_coeffs[i] = p.rho * dot(p.s, direction);
            for (std::size_t j = 0; j < n; ++j) direction[j] -= alpha_coeffs[i] * p.y[j];
        }
        if (!history.empty()) {
            const CurvaturePair& last = history.back();
            const double yy = dot(last.y, last.y);
            const double gamma = yy > 0.0 ? 1.0 / (last.rho * yy) : 1.0;
            for (double& d : direction) d *= gamma;
        }
        for (std::size_t i = 0; i < history.size(); ++i) {
            const CurvaturePair& p = history[i];
            const double beta = p.rho * dot(p.y, direction);
            for (std::size_t j = 0; j < n; ++j) direction[j] += (alpha_coeffs[i] - beta) * p.s[j];
        }
        for (double& d : direction) d = -d;

        double slope0 = dot(grad, direction);
        if (!(slope0 < 0.0)) {
            // Curvature info went bad; fall back to steepest descent.
            history.clear();
            for (std::size_t j = 0; j < n; ++j) direction[j] = -grad[j];
            slope0 = dot(grad, direction);
            if (!(slope0 < 0.0)) break;  // gradient numerically zero
        }

        auto eval_at = [&](double alpha) -> LinePoint {
            for (std::size_t j = 0; j < n; ++j) trial_x[j] = result.x[j] + alpha * direction[j];
            const double v = objective(trial_x, trial_grad);
            return {alpha, v, dot(trial_grad, direction)};
        };

        // Strong Wolfe line search: bracketing phase, then zoom.
        const double armijo_ref = value;
        LinePoint accepted{0.0, value, slope0};
        bool found = false;

        LinePoint prev{0.0, value, slope0};
        double alpha = 1.0;
        constexpr double kAlphaMax = 1e20;
        int evals = 0;

        LinePoint lo{}, hi{};
        bool need_zoom = false;

        while (evals < options.max_line_search_steps) {
            LinePoint cur = eval_at(alpha);
            ++evals;
            const bool bad = !std::isfinite(cur.value);
            if (bad || cur.value > armijo_ref + c1 * alpha * slope0 ||
                (evals > 1 && cur.value >= prev.value)) {
                lo = prev;
                hi = cur;
                need_zoom = true;
                break;
            }
            if (std::abs(cur.slope) <= c2 * std::abs(slope0)) {
                accepted = cur;
                found = true;
                break;
            }
            if (cur.slope >= 0.0) {
                lo = cur;
                hi = prev;
                need_zoom = true;
                break;
            }
            prev = cur;
            if (alpha >= kAlphaMax) break;
            alpha = std::min(2.0 * alpha, kAlphaMax);
        }

        if (!found && !need_zoom && prev.alpha > 0.0 && prev.value < value) {
            // Expansion exhausted without bracketing: every point satisfied
            // Armijo with a still-negative slope. Take the farthest one; the
            // resulting curvature pair re-scales later iterations.
            accepted = eval_at(prev.alpha);
            found = true;
        }

        if (need_zoom) {
            // lo satisfies Armijo with the lowest value seen; hi brackets it.
            while (evals < options.max_line_search_steps) {
                const double mid = 0.5 * (lo.alpha + hi.alpha);
                LinePoint cur = eval_at(mid);
                ++evals;
                if (!std::isfinite(cur.value) ||
                    cur.value > armijo_ref + c1 * mid * slope0 || cur.value >= lo.value) {
                    hi = cur;
                } else {
                    if (std::abs(cur.slope) <= c2 * std::abs(slope0)) {
                        accepted = cur;
                        found = true;
                        break;
                    }
                    if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                    lo = cur;
                }
                if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
            }
            if (!found && lo.alpha > 0.0 && lo.value < value && std::isfinite(lo.value)) {
                // Armijo-only fallback: still a decrease, take it.
                accepted = eval_at(lo.alpha);
                found = true;
            }
        }

        if (!found || accepted.alpha <= 0.0) {
            break;  // no usable step; report not converged unless tol already met
        }

        // Every found=true path ends with eval_at(accepted.alpha), so
        // trial_grad already holds the gradient at the accepted point.
        std::vector<double> s(n);
        std::vector<double> y(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double new_x = result.x[j] + accepted.alpha * direction[j];
            s[j] = new_x - result.x[j];
            result.x[j] = new_x;
        }
        // trial_grad corresponds to accepted.alpha (last evaluation).
        for (std::size_t j = 0; j < n; ++j) {
            y[j] = trial_grad[j] - grad[j];
            grad[j] = trial_grad[j];
        }
        value = accepted.value;
        result.value_trace.push_back(value);
        result.iterations = iter + 1;

        const double ys = dot(y, s);
        if (ys > 1e-10 * std::sqrt(dot(y, y)) * std::sqrt(dot(s, s))) {
            history.push_back({std::move(s), std::move(y), 1.0 / ys});
            if (static_cast<int>(history.size()) > options.memory) history.pop_front();
        }
    }

    if (!result.converged) {
        result.converged = sup_norm(grad) <= options.gradient_tolerance;
    }
    result.value = value;
    result.gradient_norm = sup_norm(grad);
    return result;
}

}  // namespace lorasf
