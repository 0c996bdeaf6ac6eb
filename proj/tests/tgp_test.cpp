#include "smtgp/tgp.hpp"

#include "smtgp/datasets.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace smtgp;
namespace st = smtgp::testing;

namespace {

// Straight-line kernel matrix, independent of the library path.
Eigen::MatrixXd direct_kernel(const Eigen::MatrixXd& pts, const KernelConfig& cfg) {
    const Eigen::Index n = pts.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            k(i, j) = std::exp(-(pts.row(i) - pts.row(j)).squaredNorm() / cfg.bandwidth2) +
                      (i == j ? cfg.lambda : 0.0);
    return k;
}

Eigen::VectorXd direct_kernel_vector(const Eigen::MatrixXd& pts, const Eigen::VectorXd& z,
                                     const KernelConfig& cfg) {
    Eigen::VectorXd v(pts.rows());
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
        v(i) = std::exp(-(pts.row(i).transpose() - z).squaredNorm() / cfg.bandwidth2);
    return v;
}

struct SmallProblem {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
    KernelConfig cfg_x{1.3, 0.05};
    KernelConfig cfg_y{0.8, 0.02};
};

SmallProblem small_problem() {
    SmallProblem p;
    p.x.resize(2, 2);
    p.x << 0.1, -0.4, 0.9, 0.3;
    p.y.resize(2, 1);
    p.y << 0.2, 0.7;
    return p;
}

TrainedModel random_model(std::mt19937_64& gen, Eigen::Index n, Eigen::Index d_x,
                          Eigen::Index d_y, double alpha, double beta) {
    const Eigen::MatrixXd x = st::random_matrix(gen, n, d_x);
    const Eigen::MatrixXd y = st::random_matrix(gen, n, d_y);
    return train(x, y, KernelConfig{1.5, 0.05}, KernelConfig{1.2, 0.05},
                 SMParams{alpha, beta});
}

double fd_check(const TrainedModel& m, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                TgpMethod method) {
    const auto f = [&](const Eigen::VectorXd& yy) {
        switch (method) {
            case TgpMethod::kl: return kltgp_cost_grad(m, x, yy).cost;
            case TgpMethod::ikl: return ikltgp_cost_grad(m, x, yy).cost;
            case TgpMethod::sm_quadratic: return smtgp_quadratic_cost_grad(m, x, yy).cost;
            case TgpMethod::sm_cubic: return smtgp_cubic_cost_grad(m, x, yy).cost;
        }
        return 0.0;
    };
    Eigen::VectorXd analytic;
    switch (method) {
        case TgpMethod::kl: analytic = kltgp_cost_grad(m, x, y).grad; break;
        case TgpMethod::ikl: analytic = ikltgp_cost_grad(m, x, y).grad; break;
        case TgpMethod::sm_quadratic: analytic = smtgp_quadratic_cost_grad(m, x, y).grad; break;
        case TgpMethod::sm_cubic: analytic = smtgp_cubic_cost_grad(m, x, y).grad; break;
    }
    return st::max_rel_error(analytic, st::fd_gradient(f, y));
}

}  // namespace

TEST(Train, CachesMatchDenseRecomputation) {
    const auto p = small_problem();
    const SMParams params{0.6, 1.5};
    const auto m = train(p.x, p.y, p.cfg_x, p.cfg_y, params);

    const Eigen::MatrixXd kx = direct_kernel(p.x, p.cfg_x);
    const Eigen::MatrixXd ky = direct_kernel(p.y, p.cfg_y);
    EXPECT_LT((m.kx().matrix() - kx).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((m.ky().matrix() - ky).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((m.kx().inverse() - kx.inverse()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((m.ky().inverse() - ky.inverse()).cwiseAbs().maxCoeff(), 1e-12);

    const Eigen::MatrixXd blend = (1.0 - params.alpha) * kx + params.alpha * ky;
    EXPECT_LT((m.mixed_inverse() - blend.inverse()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(m.mixed_log_det(), std::log(blend.determinant()), 1e-12);
    EXPECT_LT((m.mixed_inverse() * blend - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(),
              1e-8);
}

TEST(Train, DuplicateRowsNeedLambda) {
    Eigen::MatrixXd x(3, 1), y(3, 1);
    x << 0.2, 0.2, 0.8;
    y << 0.5, 0.5, 0.1;
    EXPECT_NO_THROW(train(x, y, KernelConfig{1.0, 1e-3}, KernelConfig{1.0, 1e-3},
                          SMParams{0.5, 1.5}));
    EXPECT_THROW(train(x, y, KernelConfig{1.0, 0.0}, KernelConfig{1.0, 0.0},
                       SMParams{0.5, 1.5}),
                 std::runtime_error);
}

TEST(Train, ValidatesShapes) {
    Eigen::MatrixXd x(3, 1), y(2, 1);
    x << 0.0, 0.5, 1.0;
    y << 0.0, 0.5;
    EXPECT_THROW(train(x, y, KernelConfig{1.0, 0.1}, KernelConfig{1.0, 0.1}, SMParams{0.5, 1.5}),
                 std::invalid_argument);
    Eigen::MatrixXd one(1, 1);
    one << 0.0;
    EXPECT_THROW(train(one, one, KernelConfig{1.0, 0.1}, KernelConfig{1.0, 0.1},
                       SMParams{0.5, 1.5}),
                 std::invalid_argument);
}

TEST(Train, WithParamsRekeysMixedInverse) {
    const auto p = small_problem();
    const auto m = train(p.x, p.y, p.cfg_x, p.cfg_y, SMParams{0.3, 1.5});
    const auto rekeyed = m.with_params(SMParams{0.8, 0.5});
    const auto fresh = train(p.x, p.y, p.cfg_x, p.cfg_y, SMParams{0.8, 0.5});
    EXPECT_LT((rekeyed.mixed_inverse() - fresh.mixed_inverse()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_DOUBLE_EQ(rekeyed.params().alpha, 0.8);
    EXPECT_DOUBLE_EQ(m.params().alpha, 0.3);  // original untouched
}

TEST(KltgpCost, LiteralFormulaOracle) {
    const auto p = small_problem();
    const auto m = train(p.x, p.y, p.cfg_x, p.cfg_y, SMParams{0.5, 1.5});
    Eigen::VectorXd x(2), y(1);
    x << 0.4, 0.0;
    y << 0.45;

    const Eigen::MatrixXd kx = direct_kernel(p.x, p.cfg_x);
    const Eigen::MatrixXd ky = direct_kernel(p.y, p.cfg_y);
    const Eigen::VectorXd kxv = direct_kernel_vector(p.x, x, p.cfg_x);
    const Eigen::VectorXd kyv = direct_kernel_vector(p.y, y, p.cfg_y);
    const Eigen::VectorXd u_x = kx.inverse() * kxv;
    const double eta_x = (1.0 + p.cfg_x.lambda) - kxv.dot(u_x);
    const double c_y = (1.0 + p.cfg_y.lambda) - kyv.dot(ky.inverse() * kyv);
    const double expected =
        (1.0 + p.cfg_y.lambda) - 2.0 * kyv.dot(u_x) - eta_x * std::log(c_y);

    EXPECT_NEAR(kltgp_cost_grad(m, x, y).cost, expected, 1e-12);
}

TEST(KltgpCost, FarInputReducesToEtaTerm) {
    const auto p = small_problem();
    const auto m = train(p.x, p.y, p.cfg_x, p.cfg_y, SMParams{0.5, 1.5});
    Eigen::VectorXd x(2), y(1);
    x << 500.0, -500.0;
    y << 0.3;
    const auto cg = kltgp_cost_grad(m, x, y);
    const Eigen::VectorXd kyv = direct_kernel_vector(p.y, y, p.cfg_y);
    const double c_y =
        (1.0 + p.cfg_y.lambda) - kyv.dot(direct_kernel(p.y, p.cfg_y).inverse() * kyv);
    const double expected = (1.0 + p.cfg_y.lambda) -
                            (1.0 + p.cfg_x.lambda) * std::log(c_y);  // u_x ~ 0
    EXPECT_NEAR(cg.cost, expected, 1e-10);
}

TEST(IkltgpCost, LiteralFormulaOracle) {
    const auto p = small_problem();
    const auto m = train(p.x, p.y, p.cfg_x, p.cfg_y, SMParams{0.5, 1.5});
    Eigen::VectorXd x(2), y(1);
    x << -0.1, 0.6;
    y << 0.55;

    const Eigen::MatrixXd kx = direct_kernel(p.x, p.cfg_x);
    const Eigen::MatrixXd ky = direct_kernel(p.y, p.cfg_y);
    const Eigen::VectorXd kxv = direct_kernel_vector(p.x, x, p.cfg_x);
    const Eigen::VectorXd kyv = direct_kernel_vector(p.y, y, p.cfg_y);
    const Eigen::VectorXd u_y = ky.inverse() * kyv;
    const double eta_x = (1.0 + p.cfg_x.lambda) - kxv.dot(kx.inverse() * kxv);
    const double eta_y = (1.0 + p.cfg_y.lambda) - kyv.dot(u_y);
    const double expected = -2.0 * kxv.dot(u_y) + u_y.dot(kx * u_y) +
                            eta_y * (std::log(eta_y) - std::log(eta_x));

    EXPECT_NEAR(ikltgp_cost_grad(m, x, y).cost, expected, 1e-12);
}

TEST(IkltgpCost, LogRatioVanishesForMatchedEtas) {
    // X == Y with the same kernel config and x == y makes eta_x == eta_y.
    Eigen::MatrixXd pts(3, 1);
    pts << 0.0, 0.4, 1.0;
    const KernelConfig cfg{1.0, 0.05};
    const auto m = train(pts, pts, cfg, cfg, SMParams{0.5, 1.5});
    Eigen::VectorXd z(1);
    z << 0.6;

    const Eigen::MatrixXd k = direct_kernel(pts, cfg);
    const Eigen::VectorXd kv = direct_kernel_vector(pts, z, cfg);
    const Eigen::VectorXd u = k.inverse() * kv;
    const double expected = -2.0 * kv.dot(u) + u.dot(k * u);
    EXPECT_NEAR(ikltgp_cost_grad(m, z, z).cost, expected, 1e-12);
}

TEST(SmtgpQuadraticCost, LiteralFormulaOracle) {
    const auto p = small_problem();
    const SMParams params{0.35, 0.6};
    const auto m = train(p.x, p.y, p.cfg_x, p.cfg_y, params);
    Eigen::VectorXd x(2), y(1);
    x << 0.25, -0.2;
    y << 0.5;

    const double a = params.alpha, b = params.beta;
    const Eigen::MatrixXd kx = direct_kernel(p.x, p.cfg_x);
    const Eigen::MatrixXd ky = direct_kernel(p.y, p.cfg_y);
    const Eigen::VectorXd kxv = direct_kernel_vector(p.x, x, p.cfg_x);
    const Eigen::VectorXd kyv = direct_kernel_vector(p.y, y, p.cfg_y);
    const double c_y = (1.0 + p.cfg_y.lambda) - kyv.dot(ky.inverse() * kyv);
    const Eigen::MatrixXd mixed = (1.0 - a) * kx + a * ky;
    const Eigen::VectorXd v_xy = (1.0 - a) * kxv + a * kyv;
    const double kxy_alpha = (1.0 - a) * (1.0 + p.cfg_x.lambda) + a * (1.0 + p.cfg_y.lambda);
    const double q = kxy_alpha - v_xy.dot(mixed.inverse() * v_xy);
    const double expected = std::pow(c_y, a * (1.0 - b) / (2.0 * (1.0 - a))) *
                            std::pow(q, -(1.0 - b) / (2.0 * (1.0 - a))) / (b - 1.0);

    EXPECT_NEAR(smtgp_quadratic_cost_grad(m, x, y).cost, expected, 1e-12);
}

TEST(SmtgpQuadraticCost, EqualKernelSpacesCollapseTheBases) {
    Eigen::MatrixXd pts(4, 1);
    pts << 0.0, 0.3, 0.7, 1.0;
    const KernelConfig cfg{0.9, 0.05};
    const SMParams params{0.4, 1.5};
    const auto m = train(pts, pts, cfg, cfg, params);
    Eigen::VectorXd z(1);
    z << 0.52;

    // With X == Y and matching configs both base quantities equal the same
    // Schur complement c, so the cost is c^(-(1-beta)/2) / (beta - 1).
    const Eigen::MatrixXd k = direct_kernel(pts, cfg);
    const Eigen::VectorXd kv = direct_kernel_vector(pts, z, cfg);
    const double c = (1.0 + cfg.lambda) - kv.dot(k.inverse() * kv);
    const double expected =
        std::pow(c, -(1.0 - params.beta) / 2.0) / (params.beta - 1.0);
    EXPECT_NEAR(smtgp_quadratic_cost_grad(m, z, z).cost, expected, 1e-12);
}

TEST(Gradients, MatchCentralFiniteDifferences) {
    auto gen = st::rng(314);
    std::uniform_real_distribution<double> ua(0.15, 0.85);
    for (int rep = 0; rep < 8; ++rep) {
        const Eigen::Index n = 6 + 2 * (rep % 5);
        const Eigen::Index d_y = 1 + rep % 3;
        const double beta = rep % 2 == 0 ? 0.5 : 1.5;
        const auto m = random_model(gen, n, 2, d_y, ua(gen), beta);
        const Eigen::VectorXd x = st::random_vector(gen, 2);
        const Eigen::VectorXd y = st::random_vector(gen, d_y);

        EXPECT_LT(fd_check(m, x, y, TgpMethod::kl), 1e-5) << "kl rep " << rep;
        EXPECT_LT(fd_check(m, x, y, TgpMethod::ikl), 1e-5) << "ikl rep " << rep;
        EXPECT_LT(fd_check(m, x, y, TgpMethod::sm_quadratic), 1e-5) << "sm rep " << rep;
        EXPECT_LT(fd_check(m, x, y, TgpMethod::sm_cubic), 1e-4) << "cubic rep " << rep;
    }
}

TEST(SmtgpCubicCost, GradientIsAffineInOneMinusBeta) {
    auto gen = st::rng(99);
    const auto m_low = random_model(gen, 10, 2, 2, 0.45, 0.5);
    const auto m_high = m_low.with_params(SMParams{0.45, 1.5});
    const Eigen::VectorXd x = st::random_vector(gen, 2);
    const Eigen::VectorXd y = st::random_vector(gen, 2);

    const auto low = smtgp_cubic_cost_grad(m_low, x, y);
    const auto high = smtgp_cubic_cost_grad(m_high, x, y);
    for (Eigen::Index i = 0; i < y.size(); ++i)
        EXPECT_DOUBLE_EQ(low.grad(i), -high.grad(i));
    EXPECT_DOUBLE_EQ(low.cost, -high.cost);
}

TEST(SmtgpVariants, SharedStationaryPoints) {
    const auto data = generate_toy1(33);
    const Eigen::MatrixXd x = data.train.inputs.topRows(50);
    const Eigen::MatrixXd y = data.train.outputs.topRows(50);
    const auto m = train(x, y, KernelConfig{5.0, 1e-4}, KernelConfig{0.05, 1e-4},
                         SMParams{0.9, 1.5});
    OptimizerOptions opts;
    opts.max_iterations = 200;
    for (const double xq : {0.15, 0.5, 0.85}) {
        Eigen::VectorXd query(1);
        query << xq;
        const Eigen::VectorXd init = nearest_output_init(m, query);
        const auto quad = predict(m, query, TgpMethod::sm_quadratic, init, opts);
        const auto cubic = predict(m, query, TgpMethod::sm_cubic, init, opts);
        EXPECT_NEAR(quad.y_hat(0), cubic.y_hat(0), 1e-4) << "query " << xq;
    }
}

TEST(CertaintyPhi, IdenticalProcessesGiveUnitPhi) {
    Eigen::MatrixXd pts(5, 1);
    pts << 0.0, 0.25, 0.5, 0.75, 1.0;
    const KernelConfig cfg{1.0, 0.1};
    const auto m = train(pts, pts, cfg, cfg, SMParams{0.5, 1.5});
    Eigen::VectorXd z(1);
    z << 0.6;
    const auto c = certainty_phi(m, z, z);
    EXPECT_NEAR(c.eta_x, c.eta_y, 1e-14);
    EXPECT_NEAR(c.eta_x, c.eta_xy, 1e-12);
    EXPECT_NEAR(c.phi, 1.0, 1e-10);
}

TEST(CertaintyPhi, GeometricMeanStaysBetweenEtas) {
    auto gen = st::rng(17);
    for (int rep = 0; rep < 25; ++rep) {
        const double alpha = 0.05 + 0.9 * (rep / 25.0);
        const auto m = random_model(gen, 12, 2, 2, std::min(0.95, std::max(0.05, alpha)), 1.5);
        const auto c = certainty_phi(m, st::random_vector(gen, 2), st::random_vector(gen, 2));
        const double geo = std::pow(c.eta_x, 1.0 - m.params().alpha) *
                           std::pow(c.eta_y, m.params().alpha);
        EXPECT_GE(geo, std::min(c.eta_x, c.eta_y) - 1e-12);
        EXPECT_LE(geo, std::max(c.eta_x, c.eta_y) + 1e-12);
    }
}

TEST(CertaintyPhi, Lemma41BoundHolds) {
    auto gen = st::rng(2718);
    for (int rep = 0; rep < 20; ++rep) {
        const auto m = random_model(gen, 10, 2, 2, 0.1 + 0.8 * (rep / 20.0), 1.5);
        const auto c = certainty_phi(m, st::random_vector(gen, 2), st::random_vector(gen, 2));
        const double a = m.params().alpha;
        const double log_bound =
            m.mixed_log_det() - (1.0 - a) * m.kx().log_det() - a * m.ky().log_det();
        EXPECT_LE(std::log(c.phi), log_bound + 1e-10);
    }
}

TEST(CertaintyPhi, ZAlphaAtMostOneByDenseDeterminants) {
    auto gen = st::rng(424);
    for (int rep = 0; rep < 15; ++rep) {
        const auto m = random_model(gen, 8, 2, 1, 0.2 + 0.6 * (rep / 15.0), 1.5);
        const Eigen::VectorXd x = st::random_vector(gen, 2);
        const Eigen::VectorXd y = st::random_vector(gen, 1);
        const double a = m.params().alpha;

        const auto border = [](const Eigen::MatrixXd& k, const Eigen::VectorXd& v, double kzz) {
            const Eigen::Index n = k.rows();
            Eigen::MatrixXd b(n + 1, n + 1);
            b.topLeftCorner(n, n) = k;
            b.topRightCorner(n, 1) = v;
            b.bottomLeftCorner(1, n) = v.transpose();
            b(n, n) = kzz;
            return b;
        };
        const Eigen::MatrixXd kx_ext =
            border(m.kx().matrix(), kernel_vector(m.inputs(), x, m.cfg_x()), m.self_kernel_x());
        const Eigen::MatrixXd ky_ext =
            border(m.ky().matrix(), kernel_vector(m.outputs(), y, m.cfg_y()), m.self_kernel_y());
        const Eigen::MatrixXd blend_ext = a * ky_ext + (1.0 - a) * kx_ext;
        const double log_z = (1.0 - a) * std::log(kx_ext.determinant()) +
                             a * std::log(ky_ext.determinant()) -
                             std::log(blend_ext.determinant());
        EXPECT_LE(log_z, 1e-10);

        // Same quantity through the eta route.
        const auto c = certainty_phi(m, x, y);
        const double log_z_eta = (1.0 - a) * (m.kx().log_det() + std::log(c.eta_x)) +
                                 a * (m.ky().log_det() + std::log(c.eta_y)) -
                                 (m.mixed_log_det() + std::log(c.eta_xy));
        EXPECT_NEAR(log_z, log_z_eta, 1e-8);
    }
}

TEST(Predict, StationaryInitStaysPut) {
    // Constant outputs make y = c an exact stationary point of every cost.
    Eigen::MatrixXd x(5, 1), y(5, 1);
    x << 0.0, 0.2, 0.5, 0.7, 1.0;
    y.setConstant(0.42);
    const auto m = train(x, y, KernelConfig{1.0, 1e-3}, KernelConfig{1.0, 1e-3},
                         SMParams{0.6, 1.5});
    Eigen::VectorXd query(1), init(1);
    query << 0.3;
    init << 0.42;
    for (const auto method : {TgpMethod::kl, TgpMethod::ikl, TgpMethod::sm_quadratic,
                              TgpMethod::sm_cubic}) {
        const auto pred = predict(m, query, method, init);
        EXPECT_LE(pred.iterations, 1);
        EXPECT_TRUE(pred.converged);
        EXPECT_NEAR(pred.y_hat(0), 0.42, 1e-9);
    }
}

TEST(Predict, RecoversForwardRelationOnUnimodalSegment) {
    const auto data = generate_toy1(7);
    const auto m = train(data.train.inputs, data.train.outputs, KernelConfig{5.0, 1e-4},
                         KernelConfig{0.05, 1e-4}, SMParams{0.9, 1.5});
    for (const double xq : {0.15, 0.3, 0.85}) {
        Eigen::VectorXd query(1);
        query << xq;
        const auto pred = predict(m, query, TgpMethod::kl);
        EXPECT_LT(std::abs(xq - toy_forward(pred.y_hat(0))), 0.08) << "query " << xq;
    }
}

TEST(Predict, DefaultInitChainsKlForSmMethods) {
    const auto data = generate_toy1(11);
    const Eigen::MatrixXd x = data.train.inputs.topRows(40);
    const Eigen::MatrixXd y = data.train.outputs.topRows(40);
    const auto m = train(x, y, KernelConfig{5.0, 1e-4}, KernelConfig{0.05, 1e-4},
                         SMParams{0.9, 1.5});
    Eigen::VectorXd query(1);
    query << 0.4;
    const auto chained = predict(m, query, TgpMethod::sm_quadratic);
    const auto kl_first = predict(m, query, TgpMethod::kl, nearest_output_init(m, query));
    const auto manual = predict(m, query, TgpMethod::sm_quadratic, kl_first.y_hat);
    EXPECT_DOUBLE_EQ(chained.y_hat(0), manual.y_hat(0));
}

TEST(Predict, BetaIndependenceOfPredictions) {
    const auto data = generate_toy1(3);
    const Eigen::MatrixXd x = data.train.inputs.topRows(60);
    const Eigen::MatrixXd y = data.train.outputs.topRows(60);
    const auto low = train(x, y, KernelConfig{5.0, 1e-4}, KernelConfig{0.05, 1e-4},
                           SMParams{0.9, 0.5});
    const auto high = low.with_params(SMParams{0.9, 1.5});
    OptimizerOptions opts;
    opts.max_iterations = 500;
    opts.grad_tolerance = 1e-10;
    for (const double xq : {0.2, 0.5, 0.9}) {
        Eigen::VectorXd query(1);
        query << xq;
        const Eigen::VectorXd init = predict(low, query, TgpMethod::kl, opts).y_hat;
        const auto a = predict(low, query, TgpMethod::sm_quadratic, init, opts);
        const auto b = predict(high, query, TgpMethod::sm_quadratic, init, opts);
        EXPECT_NEAR(a.y_hat(0), b.y_hat(0), 1e-3) << "query " << xq;
    }
}

TEST(Predict, FillsCertaintyDiagnostics) {
    auto gen = st::rng(5);
    const auto m = random_model(gen, 12, 2, 1, 0.7, 1.5);
    const Eigen::VectorXd x = st::random_vector(gen, 2);
    const auto pred = predict(m, x, TgpMethod::sm_quadratic);
    EXPECT_GT(pred.phi, 0.0);
    EXPECT_GT(pred.eta_x, 0.0);
    EXPECT_LE(pred.eta_x, m.self_kernel_x() + 1e-12);
    EXPECT_GT(pred.eta_y, 0.0);
    EXPECT_GT(pred.eta_xy, 0.0);
    EXPECT_TRUE(std::isfinite(pred.final_cost));
}

TEST(CostGrad, RejectsDimensionMismatch) {
    auto gen = st::rng(1);
    const auto m = random_model(gen, 6, 2, 2, 0.5, 1.5);
    EXPECT_THROW(kltgp_cost_grad(m, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)),
                 std::invalid_argument);
    EXPECT_THROW(smtgp_quadratic_cost_grad(m, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1)),
                 std::invalid_argument);
}
