#pragma once

#include "smtgp/gaussian_divergence.hpp"
#include "smtgp/kernels.hpp"
#include "smtgp/optimizer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace smtgp {

enum class TgpMethod { kl, ikl, sm_quadratic, sm_cubic };

struct CostGrad {
    double cost = 0.0;
    Eigen::VectorXd grad;
};

struct Certainty {
    double phi = 0.0;
    double eta_x = 0.0;
    double eta_y = 0.0;
    double eta_xy = 0.0;
};

struct Prediction {
    Eigen::VectorXd y_hat;
    double final_cost = 0.0;
    double phi = 0.0;
    double eta_x = 0.0;
    double eta_y = 0.0;
    double eta_xy = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Everything the O(N^2) prediction paths need, precomputed once from the
/// training pairs: both kernel matrices with their inverses and
/// log-determinants, plus the inverse and log-determinant of the mixed
/// kernel (1-alpha) K_X + alpha K_Y for the model's alpha.
///
/// Immutable after construction. `with_params` produces a new model value
/// re-keyed to different (alpha, beta); that re-factorizes the mixed kernel
/// (O(N^3)) but reuses both kernel caches.
class TrainedModel {
public:
    TrainedModel(Eigen::MatrixXd inputs, Eigen::MatrixXd outputs, const KernelConfig& cfg_x,
                 const KernelConfig& cfg_y, const SMParams& params)
        : inputs_(std::move(inputs)),
          outputs_(std::move(outputs)),
          cfg_x_(cfg_x),
          cfg_y_(cfg_y),
          params_(params),
          kx_(kernel_matrix(validated_inputs(), cfg_x_)),
          ky_(kernel_matrix(outputs_, cfg_y_)) {
        params_.validate();
        compute_mixed();
    }

    TrainedModel with_params(const SMParams& params) const {
        params.validate();
        TrainedModel copy(*this);
        copy.params_ = params;
        copy.compute_mixed();
        return copy;
    }

    Eigen::Index size() const { return inputs_.rows(); }
    Eigen::Index input_dim() const { return inputs_.cols(); }
    Eigen::Index output_dim() const { return outputs_.cols(); }

    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::MatrixXd& outputs() const { return outputs_; }
    const KernelMatrix& kx() const { return kx_; }
    const KernelMatrix& ky() const { return ky_; }
    const KernelConfig& cfg_x() const { return cfg_x_; }
    const KernelConfig& cfg_y() const { return cfg_y_; }
    const SMParams& params() const { return params_; }
    const Eigen::MatrixXd& mixed_inverse() const { return mixed_inverse_; }
    double mixed_log_det() const { return mixed_log_det_; }

    /// k(z, z) for a fresh point in each space; the delta term applies
    /// because the new point is its own index.
    double self_kernel_x() const { return 1.0 + cfg_x_.lambda; }
    double self_kernel_y() const { return 1.0 + cfg_y_.lambda; }

    void check_input(const Eigen::VectorXd& x) const {
        if (x.size() != input_dim())
            throw std::invalid_argument("TrainedModel: input point has dimension " +
                                        std::to_string(x.size()) + ", expected " +
                                        std::to_string(input_dim()));
    }
    void check_output(const Eigen::VectorXd& y) const {
        if (y.size() != output_dim())
            throw std::invalid_argument("TrainedModel: output point has dimension " +
                                        std::to_string(y.size()) + ", expected " +
                                        std::to_string(output_dim()));
    }

private:
    const Eigen::MatrixXd& validated_inputs() const {
        if (inputs_.rows() != outputs_.rows())
            throw std::invalid_argument("TrainedModel: inputs and outputs row counts differ");
        if (inputs_.rows() < 2)
            throw std::invalid_argument("TrainedModel: need at least two training pairs");
        return inputs_;
    }

    void compute_mixed() {
        const double a = params_.alpha;
        const Eigen::MatrixXd blend = (1.0 - a) * kx_.matrix() + a * ky_.matrix();
        const auto llt = detail::spd_llt(blend, "TrainedModel (mixed kernel)");
        mixed_log_det_ = detail::llt_log_det(llt);
        mixed_inverse_ = llt.solve(Eigen::MatrixXd::Identity(blend.rows(), blend.cols()));
    }

    Eigen::MatrixXd inputs_;
    Eigen::MatrixXd outputs_;
    KernelConfig cfg_x_;
    KernelConfig cfg_y_;
    SMParams params_;
    KernelMatrix kx_;
    KernelMatrix ky_;
    Eigen::MatrixXd mixed_inverse_;
    double mixed_log_det_ = 0.0;
};

inline TrainedModel train(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& outputs,
                          const KernelConfig& cfg_x, const KernelConfig& cfg_y,
                          const SMParams& params) {
    return TrainedModel(inputs, outputs, cfg_x, cfg_y, params);
}

namespace detail {

/// Schur complements k(z,z) - v^T K^{-1} v feed logs and fractional powers;
/// they are floored at 1e-12 near interpolation points, while values below
/// -1e-8 indicate real trouble and are hard errors.
inline double guarded_schur(double raw, const char* what) {
    if (raw < -1e-8)
        throw std::runtime_error(std::string(what) + ": Schur complement " +
                                 std::to_string(raw) + " is negative beyond round-off");
    return raw < 1e-12 ? 1e-12 : raw;
}

/// Per-candidate-output quantities shared by every cost path.
struct OutputSide {
    Eigen::VectorXd ky_vec;  // K_Y^y
    Eigen::VectorXd u_y;     // K_Y^{-1} K_Y^y
    double c_y = 0.0;        // guarded k_Y(y,y) - K_Y^y^T u_y
    Eigen::MatrixXd jac;     // d K_Y^y / d y, N x d_y
};

inline OutputSide output_side(const TrainedModel& m, const Eigen::VectorXd& y, const char* what) {
    OutputSide o;
    o.ky_vec = kernel_vector(m.outputs(), y, m.cfg_y());
    o.u_y = m.ky().solve(o.ky_vec);
    o.c_y = guarded_schur(m.self_kernel_y() - o.ky_vec.dot(o.u_y), what);
    const Eigen::Index n = m.size();
    const double scale = -2.0 / m.cfg_y().bandwidth2;
    o.jac.resize(n, m.output_dim());
    for (Eigen::Index i = 0; i < n; ++i)
        o.jac.row(i) = scale * o.ky_vec(i) * (y.transpose() - m.outputs().row(i));
    return o;
}

struct KlCache {
    Eigen::VectorXd u_x;  // K_X^{-1} K_X^x
    double eta_x = 0.0;
};

inline KlCache kl_cache(const TrainedModel& m, const Eigen::VectorXd& x) {
    KlCache c;
    const Eigen::VectorXd kx_vec = kernel_vector(m.inputs(), x, m.cfg_x());
    c.u_x = m.kx().solve(kx_vec);
    c.eta_x = guarded_schur(m.self_kernel_x() - kx_vec.dot(c.u_x), "kltgp: eta_x");
    return c;
}

inline CostGrad kl_impl(const TrainedModel& m, const KlCache& c, const Eigen::VectorXd& y) {
    const OutputSide o = output_side(m, y, "kltgp: log argument");
    CostGrad out;
    out.cost = m.self_kernel_y() - 2.0 * o.ky_vec.dot(c.u_x) - c.eta_x * std::log(o.c_y);
    const Eigen::VectorXd combo = -2.0 * c.u_x + (2.0 * c.eta_x / o.c_y) * o.u_y;
    out.grad = o.jac.transpose() * combo;
    return out;
}

struct IklCache {
    Eigen::VectorXd kx_vec;
    Eigen::VectorXd w1;  // K_Y^{-1} K_X^x
    double eta_x = 0.0;
};

inline IklCache ikl_cache(const TrainedModel& m, const Eigen::VectorXd& x) {
    IklCache c;
    c.kx_vec = kernel_vector(m.inputs(), x, m.cfg_x());
    c.w1 = m.ky().solve(c.kx_vec);
    const Eigen::VectorXd u_x = m.kx().solve(c.kx_vec);
    c.eta_x = guarded_schur(m.self_kernel_x() - c.kx_vec.dot(u_x), "ikltgp: eta_x");
    return c;
}

inline CostGrad ikl_impl(const TrainedModel& m, const IklCache& c, const Eigen::VectorXd& y) {
    const OutputSide o = output_side(m, y, "ikltgp: eta_y");
    const double eta_y = o.c_y;
    const Eigen::VectorXd kx_uy = m.kx().matrix() * o.u_y;
    const double log_ratio = std::log(eta_y) - std::log(c.eta_x);
    CostGrad out;
    out.cost = -2.0 * c.kx_vec.dot(o.u_y) + o.u_y.dot(kx_uy) + eta_y * log_ratio;
    const Eigen::VectorXd w2 = m.ky().solve(kx_uy);
    const Eigen::VectorXd combo = -2.0 * c.w1 + 2.0 * w2 - 2.0 * (log_ratio + 1.0) * o.u_y;
    out.grad = o.jac.transpose() * combo;
    return out;
}

struct SmQuadCache {
    Eigen::VectorXd kx_vec;
    Eigen::VectorXd mixed_kx;  // Mixed^{-1} K_X^x
};

inline SmQuadCache sm_quad_cache(const TrainedModel& m, const Eigen::VectorXd& x) {
    SmQuadCache c;
    c.kx_vec = kernel_vector(m.inputs(), x, m.cfg_x());
    c.mixed_kx = m.mixed_inverse() * c.kx_vec;
    return c;
}

/// The two y-dependent log factors of the quadratic cost and their
/// gradients: log c_y and log q with q the mixed-kernel Schur complement.
struct SmQuadParts {
    double log_cy = 0.0;
    double log_q = 0.0;
    Eigen::VectorXd grad_log_cy;
    Eigen::VectorXd grad_log_q;
};

inline SmQuadParts sm_quad_parts(const TrainedModel& m, const SmQuadCache& c,
                                 const Eigen::VectorXd& y) {
    const double a = m.params().alpha;
    const OutputSide o = output_side(m, y, "smtgp: output Schur complement");

    const Eigen::VectorXd mixed_w = (1.0 - a) * c.mixed_kx + a * (m.mixed_inverse() * o.ky_vec);
    const Eigen::VectorXd v_xy = (1.0 - a) * c.kx_vec + a * o.ky_vec;
    const double kxy_alpha = (1.0 - a) * m.self_kernel_x() + a * m.self_kernel_y();
    const double q = guarded_schur(kxy_alpha - v_xy.dot(mixed_w), "smtgp: mixed Schur complement");

    SmQuadParts parts;
    parts.log_cy = std::log(o.c_y);
    parts.log_q = std::log(q);
    parts.grad_log_cy = o.jac.transpose() * ((-2.0 / o.c_y) * o.u_y);
    parts.grad_log_q = o.jac.transpose() * ((-2.0 * a / q) * mixed_w);
    return parts;
}

inline CostGrad sm_quad_impl(const TrainedModel& m, const SmQuadCache& c, const Eigen::VectorXd& y) {
    const double a = m.params().alpha;
    const double b = m.params().beta;
    const SmQuadParts parts = sm_quad_parts(m, c, y);
    const double exp_cy = a * (1.0 - b) / (2.0 * (1.0 - a));
    const double exp_q = -(1.0 - b) / (2.0 * (1.0 - a));
    CostGrad out;
    out.cost = std::exp(exp_cy * parts.log_cy + exp_q * parts.log_q) / (b - 1.0);
    out.grad = out.cost * (exp_cy * parts.grad_log_cy + exp_q * parts.grad_log_q);
    return out;
}

struct SmCubicCache {
    Eigen::MatrixXd kx_ext_inv;  // K_{X+x}^{-1} via the bordered-inverse identity
};

inline SmCubicCache sm_cubic_cache(const TrainedModel& m, const Eigen::VectorXd& x) {
    SmCubicCache c;
    const Eigen::VectorXd kx_vec = kernel_vector(m.inputs(), x, m.cfg_x());
    c.kx_ext_inv = extend_inverse(m.kx(), kx_vec, m.self_kernel_x());
    return c;
}

inline CostGrad sm_cubic_impl(const TrainedModel& m, const SmCubicCache& c,
                              const Eigen::VectorXd& y) {
    const double a = m.params().alpha;
    const double b = m.params().beta;
    const Eigen::Index n = m.size();
    const OutputSide o = output_side(m, y, "smtgp_cubic: output Schur complement");

    const Eigen::MatrixXd ky_ext_inv = extend_inverse(m.ky(), o.ky_vec, m.self_kernel_y());
    const Eigen::MatrixXd blended = a * c.kx_ext_inv + (1.0 - a) * ky_ext_inv;
    Eigen::LLT<Eigen::MatrixXd> llt(blended);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("smtgp_cubic: blended precision matrix is not SPD");
    const double log_det_blend = llt_log_det(llt);

    CostGrad out;
    out.cost = -0.5 * (1.0 - b) * std::log(o.c_y) -
               (1.0 - b) / (2.0 * (1.0 - a)) * log_det_blend;

    // mu' solves (a K_{Y+y} K_{X+x}^{-1} K_{Y+y} + (1-a) K_{Y+y}) mu' = e_{N+1};
    // that system factors as K_{Y+y} * blended * K_{Y+y}, so mu' reuses the
    // bordered inverse and the blended factorization.
    const Eigen::VectorXd t = llt.solve(ky_ext_inv.col(n));
    const Eigen::VectorXd mu_full = ky_ext_inv * t;
    const Eigen::VectorXd combo = (1.0 - b) * (o.u_y / o.c_y + mu_full.head(n));
    out.grad = o.jac.transpose() * combo;
    return out;
}

}  // namespace detail

/// KLTGP cost and analytic gradient (gradient of the cost in y). O(N^2)
/// given the model caches.
inline CostGrad kltgp_cost_grad(const TrainedModel& m, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) {
    m.check_input(x);
    m.check_output(y);
    return detail::kl_impl(m, detail::kl_cache(m, x), y);
}

/// Inverse-KLTGP cost and gradient. O(N^2).
inline CostGrad ikltgp_cost_grad(const TrainedModel& m, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& y) {
    m.check_input(x);
    m.check_output(y);
    return detail::ikl_impl(m, detail::ikl_cache(m, x), y);
}

/// Log of the cubic-form SMTGP cost (constants dropped) and its gradient.
/// Retained for cross-validation of the quadratic path; O(N^3) per call
/// because of the blended (N+1)-sized solve.
inline CostGrad smtgp_cubic_cost_grad(const TrainedModel& m, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) {
    m.check_input(x);
    m.check_output(y);
    return detail::sm_cubic_impl(m, detail::sm_cubic_cache(m, x), y);
}

/// Quadratic-form SMTGP cost and gradient, the default prediction path.
/// Both base quantities are handled in log space before exponentiation.
/// O(N^2) given the cached mixed inverse.
inline CostGrad smtgp_quadratic_cost_grad(const TrainedModel& m, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y) {
    m.check_input(x);
    m.check_output(y);
    return detail::sm_quad_impl(m, detail::sm_quad_cache(m, x), y);
}

/// The certainty measure phi = eta_x^(1-alpha) eta_y^alpha / eta_xy(alpha)
/// together with its three uncertainty extensions.
inline Certainty certainty_phi(const TrainedModel& m, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
    m.check_input(x);
    m.check_output(y);
    const double a = m.params().alpha;
    const Eigen::VectorXd kx_vec = kernel_vector(m.inputs(), x, m.cfg_x());
    const Eigen::VectorXd ky_vec = kernel_vector(m.outputs(), y, m.cfg_y());

    Certainty c;
    c.eta_x = eta(m.kx(), kx_vec, m.self_kernel_x());
    c.eta_y = eta(m.ky(), ky_vec, m.self_kernel_y());

    const Eigen::VectorXd v_xy = a * ky_vec + (1.0 - a) * kx_vec;
    const double kxy_alpha = a * m.self_kernel_y() + (1.0 - a) * m.self_kernel_x();
    const double raw = kxy_alpha - v_xy.dot(m.mixed_inverse() * v_xy);
    if (raw <= 0.0) {
        if (raw < -1e-10)
            throw std::runtime_error("certainty_phi: eta_xy is nonpositive (" +
                                     std::to_string(raw) + ")");
        c.eta_xy = 1e-12;
    } else {
        c.eta_xy = raw;
    }
    c.phi = std::exp((1.0 - a) * std::log(c.eta_x) + a * std::log(c.eta_y) -
                     std::log(c.eta_xy));
    return c;
}

namespace detail {

/// Wraps a cost path as an optimizer objective. Domain errors during a
/// line-search probe surface as +inf so the search backs off.
///
/// Both SM paths are optimized through the log of the raw divergence
/// factor, oriented by the sign of beta - 1 so that minimizing always
/// follows the divergence. The log transform shares its minimizers with
/// the raw cost and keeps the curvature scale moderate near interpolation
/// points.
inline Objective make_objective(const TrainedModel& m, const Eigen::VectorXd& x,
                                TgpMethod method) {
    const auto guard = [](auto&& fn) {
        return [fn](const Eigen::VectorXd& y, Eigen::VectorXd& grad) -> double {
            try {
                CostGrad cg = fn(y);
                grad = std::move(cg.grad);
                return cg.cost;
            } catch (const std::runtime_error&) {
                grad.setConstant(std::numeric_limits<double>::quiet_NaN());
                return std::numeric_limits<double>::infinity();
            }
        };
    };
    switch (method) {
        case TgpMethod::kl: {
            auto cache = kl_cache(m, x);
            return guard([&m, cache](const Eigen::VectorXd& y) { return kl_impl(m, cache, y); });
        }
        case TgpMethod::ikl: {
            auto cache = ikl_cache(m, x);
            return guard([&m, cache](const Eigen::VectorXd& y) { return ikl_impl(m, cache, y); });
        }
        case TgpMethod::sm_quadratic: {
            auto cache = sm_quad_cache(m, x);
            const double a = m.params().alpha;
            const double b = m.params().beta;
            const double sign = b > 1.0 ? 1.0 : -1.0;
            const double exp_cy = sign * a * (1.0 - b) / (2.0 * (1.0 - a));
            const double exp_q = sign * -(1.0 - b) / (2.0 * (1.0 - a));
            return guard([&m, cache, exp_cy, exp_q](const Eigen::VectorXd& y) {
                const SmQuadParts parts = sm_quad_parts(m, cache, y);
                CostGrad cg;
                cg.cost = exp_cy * parts.log_cy + exp_q * parts.log_q;
                cg.grad = exp_cy * parts.grad_log_cy + exp_q * parts.grad_log_q;
                return cg;
            });
        }
        case TgpMethod::sm_cubic: {
            auto cache = sm_cubic_cache(m, x);
            const double sign = m.params().beta > 1.0 ? 1.0 : -1.0;
            return guard([&m, cache, sign](const Eigen::VectorXd& y) {
                CostGrad cg = sm_cubic_impl(m, cache, y);
                cg.cost *= sign;
                cg.grad *= sign;
                return cg;
            });
        }
    }
    throw std::invalid_argument("make_objective: unknown method");
}

inline CostGrad raw_cost_grad(const TrainedModel& m, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y, TgpMethod method) {
    switch (method) {
        case TgpMethod::kl: return kltgp_cost_grad(m, x, y);
        case TgpMethod::ikl: return ikltgp_cost_grad(m, x, y);
        case TgpMethod::sm_quadratic: return smtgp_quadratic_cost_grad(m, x, y);
        case TgpMethod::sm_cubic: return smtgp_cubic_cost_grad(m, x, y);
    }
    throw std::invalid_argument("raw_cost_grad: unknown method");
}

}  // namespace detail

/// Training output of the input nearest to x, the default starting point.
inline Eigen::VectorXd nearest_output_init(const TrainedModel& m, const Eigen::VectorXd& x) {
    m.check_input(x);
    Eigen::Index best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double d = (m.inputs().row(i).transpose() - x).squaredNorm();
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return m.outputs().row(best).transpose();
}

/// Minimizes the selected cost from `init`. Optimizer failure is not an
/// exception: the best iterate is retained with converged = false. The
/// returned cost and certainty diagnostics are evaluated at the final
/// iterate.
inline Prediction predict(const TrainedModel& m, const Eigen::VectorXd& x, TgpMethod method,
                          const Eigen::VectorXd& init, const OptimizerOptions& opts = {}) {
    m.check_input(x);
    m.check_output(init);
    Prediction p;
    try {
        const MinimizeResult r = minimize(detail::make_objective(m, x, method), init, opts);
        p.y_hat = r.x;
        p.iterations = r.iterations;
        p.converged = r.converged;
    } catch (const std::invalid_argument&) {
        p.y_hat = init;  // cost not finite at the starting point
        p.converged = false;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
        p.final_cost = detail::raw_cost_grad(m, x, p.y_hat, method).cost;
    } catch (const std::runtime_error&) {
        p.final_cost = nan;
    }
    try {
        const Certainty c = certainty_phi(m, x, p.y_hat);
        p.phi = c.phi;
        p.eta_x = c.eta_x;
        p.eta_y = c.eta_y;
        p.eta_xy = c.eta_xy;
    } catch (const std::runtime_error&) {
        p.phi = p.eta_x = p.eta_y = p.eta_xy = nan;
    }
    return p;
}

/// Prediction with the default starting point: the nearest training output
/// for the KL paths, chained through a KLTGP prediction for the SM paths.
inline Prediction predict(const TrainedModel& m, const Eigen::VectorXd& x, TgpMethod method,
                          const OptimizerOptions& opts = {}) {
    Eigen::VectorXd init = nearest_output_init(m, x);
    if (method == TgpMethod::sm_quadratic || method == TgpMethod::sm_cubic)
        init = predict(m, x, TgpMethod::kl, init, opts).y_hat;
    return predict(m, x, method, init, opts);
}

}  // namespace smtgp
