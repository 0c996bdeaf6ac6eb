// Fits the S-curve toy problem and prints a few predictions from each TGP
// variant next to the certainty measure.

#include "smtgp/datasets.hpp"
#include "smtgp/tgp.hpp"

#include <cstdio>

int main() {
    const auto data = smtgp::generate_toy1(7);
    const smtgp::KernelConfig cfg_x{5.0, 1e-4};
    const smtgp::KernelConfig cfg_y{0.05, 1e-4};
    const auto model = smtgp::train(data.train.inputs, data.train.outputs, cfg_x, cfg_y,
                                    smtgp::SMParams{0.9, 1.5});

    std::printf("%8s %10s %10s %10s %12s\n", "x", "kl", "ikl", "sm", "phi(sm)");
    for (int i = 20; i < 250; i += 50) {
        const Eigen::VectorXd x = data.test_inputs.segment(i, 1);
        const auto kl = smtgp::predict(model, x, smtgp::TgpMethod::kl);
        const auto ikl = smtgp::predict(model, x, smtgp::TgpMethod::ikl);
        const auto sm = smtgp::predict(model, x, smtgp::TgpMethod::sm_quadratic);
        std::printf("%8.4f %10.5f %10.5f %10.5f %12.5g\n", x(0), kl.y_hat(0), ikl.y_hat(0),
                    sm.y_hat(0), sm.phi);
    }
    return 0;
}
