#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace smtgp {

/// Configuration of one regularized Gaussian-RBF kernel space.
///
/// `bandwidth2` is the full denominator of the RBF exponent, i.e. the
/// quantity 2*rho^2. `lambda` is the regularizer added on the diagonal
/// for same-index pairs.
struct KernelConfig {
    double bandwidth2 = 1.0;
    double lambda = 0.0;

    void validate() const {
        if (!(bandwidth2 > 0.0))
            throw std::invalid_argument("KernelConfig: bandwidth2 must be positive");
        if (!(lambda >= 0.0))
            throw std::invalid_argument("KernelConfig: lambda must be nonnegative");
    }
};

/// k(a, b) = exp(-||a - b||^2 / bandwidth2) + lambda * [same_point].
///
/// `same_point` is the Kronecker delta on *indices*: it must be true only
/// when a and b refer to the same indexed point, not merely equal values.
inline double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         bool same_point, const KernelConfig& cfg) {
    cfg.validate();
    if (a.size() != b.size())
        throw std::invalid_argument("rbf_kernel: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    const double k = std::exp(-(a - b).squaredNorm() / cfg.bandwidth2);
    return same_point ? k + cfg.lambda : k;
}

/// Dense SPD kernel matrix with its Cholesky factor, inverse and
/// log-determinant cached at construction.
///
/// Immutable after construction; all accessors are read-only and safe to
/// call from many threads simultaneously.
class KernelMatrix {
public:
    explicit KernelMatrix(Eigen::MatrixXd matrix, const std::string& context = "KernelMatrix")
        : matrix_(std::move(matrix)) {
        Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error(context +
                                     ": matrix is not numerically positive definite; "
                                     "a larger lambda regularizer may be needed");
        chol_lower_ = llt.matrixL();
        log_det_ = 2.0 * chol_lower_.diagonal().array().log().sum();
        inverse_ = llt.solve(Eigen::MatrixXd::Identity(matrix_.rows(), matrix_.cols()));
    }

    Eigen::Index size() const { return matrix_.rows(); }
    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Eigen::MatrixXd& inverse() const { return inverse_; }
    const Eigen::MatrixXd& chol_lower() const { return chol_lower_; }
    double log_det() const { return log_det_; }

    /// K^{-1} v through the cached triangular factor.
    Eigen::VectorXd solve(const Eigen::VectorXd& v) const {
        Eigen::VectorXd w = chol_lower_.triangularView<Eigen::Lower>().solve(v);
        chol_lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(w);
        return w;
    }

private:
    Eigen::MatrixXd matrix_;
    Eigen::MatrixXd chol_lower_;
    Eigen::MatrixXd inverse_;
    double log_det_ = 0.0;
};

/// Kernel matrix over the rows of `points`: K_ij = k(points_i, points_j),
/// with the lambda delta on the diagonal.
inline KernelMatrix kernel_matrix(const Eigen::MatrixXd& points, const KernelConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = points.rows();
    if (n < 1)
        throw std::invalid_argument("kernel_matrix: need at least one point");
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0 + cfg.lambda;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v =
                std::exp(-(points.row(i) - points.row(j)).squaredNorm() / cfg.bandwidth2);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return KernelMatrix(std::move(k), "kernel_matrix");
}

/// Column vector (K^z)_i = k(points_i, z) for a new point z. The new point
/// carries a fresh index, so no lambda term appears.
inline Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& points, const Eigen::VectorXd& z,
                                     const KernelConfig& cfg) {
    cfg.validate();
    if (points.cols() != z.size())
        throw std::invalid_argument("kernel_vector: point dimension mismatch (" +
                                    std::to_string(points.cols()) + " vs " +
                                    std::to_string(z.size()) + ")");
    Eigen::VectorXd v(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        v(i) = std::exp(-(points.row(i).transpose() - z).squaredNorm() / cfg.bandwidth2);
    return v;
}

/// Inverse of the bordered matrix [[K, v], [v^T, kzz]] built from the cached
/// K^{-1} via the block matrix-inversion identity. O(N^2).
inline Eigen::MatrixXd extend_inverse(const KernelMatrix& k, const Eigen::VectorXd& v,
                                      double kzz) {
    if (v.size() != k.size())
        throw std::invalid_argument("extend_inverse: border size mismatch");
    const Eigen::VectorXd w = k.inverse() * v;  // K^{-1} v
    const double c = kzz - v.dot(w);
    if (!(c > 0.0))
        throw std::runtime_error("extend_inverse: extension is not positive definite "
                                 "(Schur complement " + std::to_string(c) + ")");
    const Eigen::Index n = k.size();
    Eigen::MatrixXd out(n + 1, n + 1);
    out.topLeftCorner(n, n) = k.inverse() + (w * w.transpose()) / c;
    out.topRightCorner(n, 1) = -w / c;
    out.bottomLeftCorner(1, n) = -w.transpose() / c;
    out(n, n) = 1.0 / c;
    return out;
}

/// Uncertainty extension eta = k(z,z) - v^T K^{-1} v, the exact ratio
/// |K^{N+1}| / |K^N| by which the new point z scales the generalized
/// variance of the process.
///
/// Round-off negatives in [-1e-10, 0] are clamped to 1e-12; anything more
/// negative means the extension is genuinely not SPD and is an error.
inline double eta(const KernelMatrix& k, const Eigen::VectorXd& v, double kzz) {
    if (v.size() != k.size())
        throw std::invalid_argument("eta: border size mismatch");
    const double value = kzz - v.dot(k.solve(v));
    if (value <= 0.0) {
        if (value >= -1e-10)
            return 1e-12;
        throw std::runtime_error("eta: nonpositive uncertainty extension (" +
                                 std::to_string(value) + "); extension is not SPD");
    }
    return value;
}

}  // namespace smtgp
