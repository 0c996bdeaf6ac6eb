#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace smtgp {

/// A multivariate Gaussian N(mean, cov). The covariance must be symmetric
/// (within 1e-10 relative) and positive definite; both are checked by the
/// operations that factorize it.
struct GaussianSpec {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;

    Eigen::Index dim() const { return mean.size(); }

    void validate() const {
        if (cov.rows() != cov.cols() || cov.rows() != mean.size())
            throw std::invalid_argument("GaussianSpec: mean/cov dimensions disagree");
        const double scale = 1.0 + cov.cwiseAbs().maxCoeff();
        if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw std::invalid_argument("GaussianSpec: covariance is not symmetric");
    }
};

/// Sharma-Mittal parameters. alpha is restricted to the open interval (0,1);
/// the endpoints and beta = 1 are served by the dedicated limit operations.
struct SMParams {
    double alpha = 0.5;
    double beta = 0.5;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("SMParams: alpha must lie strictly inside (0, 1)");
        if (!(std::abs(beta - 1.0) > 1e-12))
            throw std::invalid_argument("SMParams: beta is too close to 1; "
                                        "use the Renyi/KL limit operations instead");
    }
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> spd_llt(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error(std::string(what) + ": matrix is not positive definite");
    return llt;
}

inline double llt_log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline void check_pair(const GaussianSpec& p, const GaussianSpec& q) {
    p.validate();
    q.validate();
    if (p.dim() != q.dim())
        throw std::invalid_argument("divergence: p and q have different dimensions");
}

/// log of the alpha-integral  I = int p^alpha q^(1-alpha) dt  for Gaussians:
///   log I = 1/2 [ (1-a) log|S_p| + a log|S_q| - log|M| ]
///           - a(1-a)/2 * dmu^T M^{-1} dmu,      M = a S_q + (1-a) S_p.
inline double log_alpha_integral(const GaussianSpec& p, const GaussianSpec& q, double alpha) {
    const Eigen::MatrixXd blend = alpha * q.cov + (1.0 - alpha) * p.cov;
    const auto llt_p = spd_llt(p.cov, "alpha integral (cov p)");
    const auto llt_q = spd_llt(q.cov, "alpha integral (cov q)");
    const auto llt_m = spd_llt(blend, "alpha integral (covariance blend)");
    double log_i = 0.5 * ((1.0 - alpha) * llt_log_det(llt_p) + alpha * llt_log_det(llt_q) -
                          llt_log_det(llt_m));
    const Eigen::VectorXd dmu = p.mean - q.mean;
    if (dmu.squaredNorm() > 0.0)
        log_i -= 0.5 * alpha * (1.0 - alpha) * dmu.dot(llt_m.solve(dmu));
    return log_i;
}

}  // namespace detail

/// Sharma-Mittal divergence through the original closed form: invert both
/// covariances, blend the precisions, and take three log-determinants plus
/// the exponential Mahalanobis term. All determinant arithmetic is done in
/// log space.
inline double sm_divergence_original(const GaussianSpec& p, const GaussianSpec& q,
                                     const SMParams& params) {
    detail::check_pair(p, q);
    params.validate();
    const double a = params.alpha;
    const double b = params.beta;
    const Eigen::Index d = p.dim();

    const auto llt_p = detail::spd_llt(p.cov, "sm_divergence_original (cov p)");
    const auto llt_q = detail::spd_llt(q.cov, "sm_divergence_original (cov q)");
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd prec_p = llt_p.solve(identity);
    const Eigen::MatrixXd prec_q = llt_q.solve(identity);
    const Eigen::MatrixXd prec_blend = a * prec_p + (1.0 - a) * prec_q;
    const auto llt_blend = detail::spd_llt(prec_blend, "sm_divergence_original (precision blend)");

    // log( |S_p|^a |S_q|^(1-a) / |(a S_p^-1 + (1-a) S_q^-1)^-1| )
    const double log_ratio = a * detail::llt_log_det(llt_p) +
                             (1.0 - a) * detail::llt_log_det(llt_q) +
                             detail::llt_log_det(llt_blend);
    double exponent = -(1.0 - b) / (2.0 * (1.0 - a)) * log_ratio;

    const Eigen::VectorXd dmu = p.mean - q.mean;
    if (dmu.squaredNorm() > 0.0) {
        // dmu^T (a S_q + (1-a) S_p)^{-1} dmu expressed through the two
        // precisions: M^{-1} = S_q^{-1} A^{-1} S_p^{-1} with A the blend.
        const double maha = (prec_q * dmu).dot(llt_blend.solve(prec_p * dmu));
        exponent += -(a * (1.0 - b) / 2.0) * maha;
    }
    return std::expm1(exponent) / (b - 1.0);
}

/// Sharma-Mittal divergence through the simplified closed form: three
/// log-determinants of the covariances and their blend, with one extra
/// solve against the blend when the means differ. No covariance inversions.
inline double sm_divergence_simplified(const GaussianSpec& p, const GaussianSpec& q,
                                       const SMParams& params) {
    detail::check_pair(p, q);
    params.validate();
    const double log_i = detail::log_alpha_integral(p, q, params.alpha);
    const double exponent = (1.0 - params.beta) / (1.0 - params.alpha) * log_i;
    return std::expm1(exponent) / (params.beta - 1.0);
}

/// Renyi divergence R_alpha = log(I_alpha) / (alpha - 1), the beta -> 1
/// limit of the Sharma-Mittal family.
inline double renyi_divergence(const GaussianSpec& p, const GaussianSpec& q, double alpha) {
    detail::check_pair(p, q);
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("renyi_divergence: alpha must lie strictly inside (0, 1)");
    return detail::log_alpha_integral(p, q, alpha) / (alpha - 1.0);
}

/// Tsallis divergence, the beta = alpha member of the family.
inline double tsallis_divergence(const GaussianSpec& p, const GaussianSpec& q, double alpha) {
    return sm_divergence_simplified(p, q, SMParams{alpha, alpha});
}

/// Classical Gaussian KL divergence, the alpha, beta -> 1 limit.
inline double kl_divergence(const GaussianSpec& p, const GaussianSpec& q) {
    detail::check_pair(p, q);
    const Eigen::Index d = p.dim();
    const auto llt_p = detail::spd_llt(p.cov, "kl_divergence (cov p)");
    const auto llt_q = detail::spd_llt(q.cov, "kl_divergence (cov q)");
    const Eigen::VectorXd dmu = p.mean - q.mean;
    const double trace_term = llt_q.solve(p.cov).trace();
    const double maha = dmu.dot(llt_q.solve(dmu));
    return 0.5 * (trace_term + maha - static_cast<double>(d) +
                  detail::llt_log_det(llt_q) - detail::llt_log_det(llt_p));
}

/// Bhattacharyya divergence, twice the Renyi divergence at alpha = 1/2.
inline double bhattacharyya_divergence(const GaussianSpec& p, const GaussianSpec& q) {
    return 2.0 * renyi_divergence(p, q, 0.5);
}

/// Timing and operation-count comparison of the two closed forms.
struct BenchReport {
    int dim = 0;
    int reps = 0;
    bool delta_mu_zero = true;
    double seconds_original = 0.0;    // median wall-clock per evaluation
    double seconds_simplified = 0.0;  // median wall-clock per evaluation
    double measured_ratio = 0.0;      // original / simplified
    double model_ops_original = 0.0;  // cubic-term flop model
    double model_ops_simplified = 0.0;
    double model_ratio = 0.0;  // 5/3 when dmu = 0, 3/2 otherwise
};

/// Benchmarks both closed forms on a random SPD pair of the given dimension
/// and reports measured medians next to the cubic-term flop model.
inline BenchReport benchmark_forms(int dim, int reps, bool delta_mu_zero) {
    if (dim < 16)
        throw std::invalid_argument("benchmark_forms: dim must be at least 16");
    if (reps < 3)
        throw std::invalid_argument("benchmark_forms: reps must be at least 3");

    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto random_spd = [&](int n) {
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                g(i, j) = normal(rng);
        Eigen::MatrixXd s = (g * g.transpose()) / static_cast<double>(n);
        s += Eigen::MatrixXd::Identity(n, n);
        return s;
    };

    GaussianSpec p{Eigen::VectorXd::Zero(dim), random_spd(dim)};
    GaussianSpec q{Eigen::VectorXd::Zero(dim), random_spd(dim)};
    if (!delta_mu_zero)
        q.mean = Eigen::VectorXd::Constant(dim, 0.5);
    const SMParams params{0.3, 1.5};

    using clock = std::chrono::steady_clock;
    const auto time_call = [&](auto&& fn) {
        std::vector<double> samples;
        samples.reserve(static_cast<size_t>(reps));
        double sink = 0.0;
        for (int r = 0; r < reps; ++r) {
            const auto t0 = clock::now();
            sink += fn();
            const auto t1 = clock::now();
            samples.push_back(std::chrono::duration<double>(t1 - t0).count());
        }
        if (!std::isfinite(sink))
            throw std::runtime_error("benchmark_forms: non-finite divergence");
        std::sort(samples.begin(), samples.end());
        return samples[samples.size() / 2];
    };

    BenchReport report;
    report.dim = dim;
    report.reps = reps;
    report.delta_mu_zero = delta_mu_zero;
    report.seconds_original = time_call([&] { return sm_divergence_original(p, q, params); });
    report.seconds_simplified = time_call([&] { return sm_divergence_simplified(p, q, params); });
    report.measured_ratio = report.seconds_original / report.seconds_simplified;

    const double n3 = static_cast<double>(dim) * dim * dim;
    report.model_ops_original = delta_mu_zero ? 5.0 * n3 / 3.0 : 2.0 * n3;
    report.model_ops_simplified = delta_mu_zero ? n3 : 4.0 * n3 / 3.0;
    report.model_ratio = delta_mu_zero ? 5.0 / 3.0 : 1.5;
    return report;
}

}  // namespace smtgp
