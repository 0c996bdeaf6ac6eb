// Evaluates the Sharma-Mittal family and its limits on a small Gaussian pair.

#include "smtgp/gaussian_divergence.hpp"

#include <cstdio>

int main() {
    smtgp::GaussianSpec p{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    smtgp::GaussianSpec q{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
    q.mean << 1.0, 0.0;
    q.cov(0, 0) = 2.0;
    q.cov(1, 1) = 0.5;

    const smtgp::SMParams params{0.7, 0.5};
    std::printf("sm original    %.10f\n", smtgp::sm_divergence_original(p, q, params));
    std::printf("sm simplified  %.10f\n", smtgp::sm_divergence_simplified(p, q, params));
    std::printf("renyi(0.7)     %.10f\n", smtgp::renyi_divergence(p, q, 0.7));
    std::printf("tsallis(0.7)   %.10f\n", smtgp::tsallis_divergence(p, q, 0.7));
    std::printf("kl             %.10f\n", smtgp::kl_divergence(p, q));
    std::printf("bhattacharyya  %.10f\n", smtgp::bhattacharyya_divergence(p, q));
    return 0;
}
