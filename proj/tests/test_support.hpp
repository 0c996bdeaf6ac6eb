// Shared test oracles: seeded random problem generators, central
// finite-difference gradients, and numerical integration of the divergence
// integrand. Everything here is independent of the library code paths it
// checks (dense Eigen calls only).

#pragma once

#include "smtgp/gaussian_divergence.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace smtgp::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::VectorXd random_vector(std::mt19937_64& gen, Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = normal(gen);
    return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                                     double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m(i, j) = normal(gen);
    return m;
}

/// SPD matrix with eigenvalues drawn uniformly from [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& gen, Eigen::Index n, double lo = 0.5,
                                  double hi = 2.0) {
    const Eigen::MatrixXd g = random_matrix(gen, n, n);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    std::uniform_real_distribution<double> unif(lo, hi);
    Eigen::VectorXd eigs(n);
    for (Eigen::Index i = 0; i < n; ++i)
        eigs(i) = unif(gen);
    Eigen::MatrixXd m = q * eigs.asDiagonal() * q.transpose();
    return 0.5 * (m + m.transpose());
}

inline GaussianSpec random_gaussian(std::mt19937_64& gen, Eigen::Index n, bool zero_mean,
                                    double eig_lo = 0.5, double eig_hi = 2.0) {
    GaussianSpec spec{Eigen::VectorXd::Zero(n), random_spd(gen, n, eig_lo, eig_hi)};
    if (!zero_mean) {
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (Eigen::Index i = 0; i < n; ++i)
            spec.mean(i) = unif(gen);
    }
    return spec;
}

/// Central finite differences with the given step.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double step = 1e-5) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe(i) = x(i) + step;
        const double up = f(probe);
        probe(i) = x(i) - step;
        const double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * step);
    }
    return g;
}

inline double max_rel_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    return (got - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff());
}

inline double gaussian_log_pdf(const GaussianSpec& spec, const Eigen::VectorXd& t) {
    const Eigen::Index d = spec.dim();
    const Eigen::LLT<Eigen::MatrixXd> llt(spec.cov);
    const Eigen::VectorXd diff = t - spec.mean;
    const double maha = diff.dot(llt.solve(diff));
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det + maha);
}

/// int p^alpha q^(1-alpha) dt by adaptive Gauss-Kronrod over +-40 sigma (1-D).
inline double alpha_integral_quadrature_1d(const GaussianSpec& p, const GaussianSpec& q,
                                           double alpha) {
    const double sigma = std::sqrt(std::max(p.cov(0, 0), q.cov(0, 0)));
    const double lo = std::min(p.mean(0), q.mean(0)) - 40.0 * sigma;
    const double hi = std::max(p.mean(0), q.mean(0)) + 40.0 * sigma;
    const auto integrand = [&](double t) {
        Eigen::VectorXd v(1);
        v(0) = t;
        return std::exp(alpha * gaussian_log_pdf(p, v) + (1.0 - alpha) * gaussian_log_pdf(q, v));
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 12,
                                                                         1e-10);
}

/// int p^alpha q^(1-alpha) dt on a 400 x 400 midpoint tensor grid (2-D).
inline double alpha_integral_quadrature_2d(const GaussianSpec& p, const GaussianSpec& q,
                                           double alpha) {
    constexpr int cells = 400;
    Eigen::Vector2d lo, hi;
    for (int j = 0; j < 2; ++j) {
        const double sigma = std::sqrt(std::max(p.cov(j, j), q.cov(j, j)));
        lo(j) = std::min(p.mean(j), q.mean(j)) - 40.0 * sigma;
        hi(j) = std::max(p.mean(j), q.mean(j)) + 40.0 * sigma;
    }
    const double dx = (hi(0) - lo(0)) / cells;
    const double dy = (hi(1) - lo(1)) / cells;
    double sum = 0.0;
    Eigen::VectorXd t(2);
    for (int i = 0; i < cells; ++i) {
        t(0) = lo(0) + (i + 0.5) * dx;
        for (int j = 0; j < cells; ++j) {
            t(1) = lo(1) + (j + 0.5) * dy;
            sum += std::exp(alpha * gaussian_log_pdf(p, t) +
                            (1.0 - alpha) * gaussian_log_pdf(q, t));
        }
    }
    return sum * dx * dy;
}

/// Sharma-Mittal divergence straight from the defining integral.
inline double sm_divergence_quadrature(const GaussianSpec& p, const GaussianSpec& q,
                                       const SMParams& params) {
    const double integral = p.dim() == 1 ? alpha_integral_quadrature_1d(p, q, params.alpha)
                                         : alpha_integral_quadrature_2d(p, q, params.alpha);
    const double power = (1.0 - params.beta) / (1.0 - params.alpha);
    return (std::pow(integral, power) - 1.0) / (params.beta - 1.0);
}

}  // namespace smtgp::testing
