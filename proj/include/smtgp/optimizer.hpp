#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace smtgp {

struct OptimizerOptions {
    int max_iterations = 50;
    double grad_tolerance = 1e-6;
    double step_tolerance = 1e-10;
    int max_line_search_evals = 20;

    void validate() const {
        if (max_iterations <= 0 || max_line_search_evals <= 0 ||
            !(grad_tolerance > 0.0) || !(step_tolerance > 0.0))
            throw std::invalid_argument("OptimizerOptions: all fields must be positive");
    }
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Objective contract: return the cost at x and fill `grad` with the
/// gradient. Non-finite returns are treated as "out of domain" by the line
/// search and cause it to back off.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

namespace detail {

struct WolfeSample {
    double step = 0.0;
    double cost = 0.0;
    double slope = 0.0;  // directional derivative
    Eigen::VectorXd x;
    Eigen::VectorXd grad;
    bool finite = false;
};

/// Minimizer of the cubic Hermite interpolant through two (step, cost, slope)
/// samples (Nocedal & Wright Eq. 3.59). Callers safeguard the result.
inline double cubic_interp_step(const WolfeSample& s0, const WolfeSample& s1) {
    const double d1 = s0.slope + s1.slope - 3.0 * (s0.cost - s1.cost) / (s0.step - s1.step);
    const double disc = d1 * d1 - s0.slope * s1.slope;
    if (!(disc >= 0.0) || !std::isfinite(disc))
        return 0.5 * (s0.step + s1.step);
    const double d2 = std::copysign(std::sqrt(disc), s1.step - s0.step);
    const double denom = s1.slope - s0.slope + 2.0 * d2;
    if (denom == 0.0 || !std::isfinite(denom))
        return 0.5 * (s0.step + s1.step);
    return s1.step - (s1.step - s0.step) * (s1.slope + d2 - d1) / denom;
}

struct LineSearchOutcome {
    bool ok = false;
    WolfeSample accepted;
};

/// Strong-Wolfe line search (c1 = 1e-4, c2 = 0.9) with cubic-interpolation
/// zoom. If the curvature condition cannot be met within the evaluation
/// budget, the best sample satisfying sufficient decrease is accepted; the
/// caller's curvature guard then decides whether to update the Hessian.
inline LineSearchOutcome wolfe_line_search(const Objective& objective,
                                           const Eigen::VectorXd& x0, double cost0,
                                           const Eigen::VectorXd& grad0,
                                           const Eigen::VectorXd& dir, int max_evals,
                                           double initial_step = 1.0) {
    constexpr double c1 = 1e-4;
    constexpr double c2 = 0.9;
    const double slope0 = grad0.dot(dir);

    int evals = 0;
    Eigen::VectorXd grad_buffer(x0.size());
    const auto evaluate = [&](double step) {
        WolfeSample s;
        s.step = step;
        s.x = x0 + step * dir;
        s.cost = objective(s.x, grad_buffer);
        s.finite = std::isfinite(s.cost) && grad_buffer.allFinite();
        s.grad = grad_buffer;
        s.slope = s.finite ? grad_buffer.dot(dir) : std::numeric_limits<double>::quiet_NaN();
        ++evals;
        return s;
    };
    const auto sufficient_decrease = [&](const WolfeSample& s) {
        return s.finite && s.cost <= cost0 + c1 * s.step * slope0;
    };
    const auto curvature_ok = [&](const WolfeSample& s) {
        return std::abs(s.slope) <= -c2 * slope0;
    };
    const auto accept = [](WolfeSample s) {
        LineSearchOutcome out;
        out.ok = true;
        out.accepted = std::move(s);
        return out;
    };

    // Zoom phase: lo satisfies sufficient decrease with the lowest cost seen,
    // the interval [lo, hi] brackets a strong-Wolfe point.
    const auto zoom = [&](WolfeSample lo, WolfeSample hi) -> LineSearchOutcome {
        while (evals < max_evals) {
            const double width = std::abs(hi.step - lo.step);
            if (width < 1e-14 * std::max(1.0, std::abs(lo.step)))
                break;
            double trial;
            if (hi.finite) {
                trial = cubic_interp_step(lo, hi);
                const double lo_end = std::min(lo.step, hi.step);
                const double hi_end = std::max(lo.step, hi.step);
                const double margin = 0.1 * width;
                if (!std::isfinite(trial) || trial < lo_end + margin || trial > hi_end - margin)
                    trial = 0.5 * (lo.step + hi.step);
            } else {
                trial = 0.5 * (lo.step + hi.step);
            }
            WolfeSample s = evaluate(trial);
            if (!sufficient_decrease(s) || s.cost >= lo.cost) {
                hi = std::move(s);
            } else {
                if (curvature_ok(s))
                    return accept(std::move(s));
                if (s.slope * (hi.step - lo.step) >= 0.0)
                    hi = lo;
                lo = std::move(s);
            }
        }
        if (lo.step > 0.0 && sufficient_decrease(lo))
            return accept(std::move(lo));
        return {};
    };

    WolfeSample prev;
    prev.step = 0.0;
    prev.cost = cost0;
    prev.slope = slope0;
    prev.x = x0;
    prev.grad = grad0;
    prev.finite = true;

    double step = initial_step;
    bool first = true;
    while (evals < max_evals) {
        WolfeSample s = evaluate(step);
        if (!sufficient_decrease(s) || (!first && s.cost >= prev.cost))
            return zoom(std::move(prev), std::move(s));
        if (curvature_ok(s))
            return accept(std::move(s));
        if (s.slope >= 0.0)
            return zoom(std::move(s), std::move(prev));
        prev = std::move(s);
        step *= 2.0;
        first = false;
    }
    if (prev.step > 0.0)
        return accept(std::move(prev));
    return {};
}

}  // namespace detail

/// BFGS quasi-Newton minimization with a cubic-polynomial strong-Wolfe line
/// search. The inverse-Hessian approximation starts from the identity and is
/// rescaled by (s.y)/(y.y) after the first accepted step; updates are
/// skipped when the curvature condition fails, so it stays SPD.
inline MinimizeResult minimize(const Objective& objective, Eigen::VectorXd x0,
                               const OptimizerOptions& opts = {}) {
    opts.validate();
    const Eigen::Index n = x0.size();
    Eigen::VectorXd grad(n);
    double cost = objective(x0, grad);
    if (!std::isfinite(cost) || !grad.allFinite())
        throw std::invalid_argument("minimize: objective is not finite at the starting point");

    MinimizeResult result;
    result.x = std::move(x0);
    result.cost = cost;

    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    bool first_step = true;

    while (result.iterations < opts.max_iterations) {
        if (grad.norm() < opts.grad_tolerance) {
            result.converged = true;
            return result;
        }
        Eigen::VectorXd dir = -(inv_hessian.selfadjointView<Eigen::Lower>() * grad);
        if (!(dir.dot(grad) < 0.0)) {
            inv_hessian.setIdentity();
            dir = -grad;
        }
        // Until the inverse Hessian picks up the problem's scale, start the
        // search with a gradient-damped trial step; unit steps along a raw
        // steepest-descent direction can leap over narrow basins.
        const double trial =
            first_step ? std::min(1.0, 1.0 / (1.0 + grad.squaredNorm())) : 1.0;
        const auto ls = detail::wolfe_line_search(objective, result.x, result.cost, grad, dir,
                                                  opts.max_line_search_evals, trial);
        if (!ls.ok)
            return result;  // stuck; best finite iterate retained, converged = false

        ++result.iterations;
        const Eigen::VectorXd step_vec = ls.accepted.x - result.x;
        const Eigen::VectorXd grad_diff = ls.accepted.grad - grad;
        result.x = ls.accepted.x;
        result.cost = ls.accepted.cost;
        grad = ls.accepted.grad;

        const double sy = step_vec.dot(grad_diff);
        if (sy > 1e-12 * step_vec.norm() * grad_diff.norm()) {
            if (first_step) {
                inv_hessian *= sy / grad_diff.squaredNorm();
                first_step = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = inv_hessian.selfadjointView<Eigen::Lower>() * grad_diff;
            const double yhy = grad_diff.dot(hy);
            inv_hessian.triangularView<Eigen::Lower>() -=
                rho * (step_vec * hy.transpose() + hy * step_vec.transpose());
            inv_hessian.triangularView<Eigen::Lower>() +=
                (rho * rho * yhy + rho) * (step_vec * step_vec.transpose());
        }
        if (step_vec.norm() < opts.step_tolerance) {
            result.converged = true;
            return result;
        }
    }
    result.converged = grad.norm() < opts.grad_tolerance;
    return result;
}

}  // namespace smtgp
