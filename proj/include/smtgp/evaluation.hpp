#pragma once

#include "smtgp/datasets.hpp"
#include "smtgp/tgp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smtgp {

enum class Method { kl, ikl, sm_quadratic, sm_cubic, gpr, wknn };

inline bool is_sm_method(Method m) {
    return m == Method::sm_quadratic || m == Method::sm_cubic;
}
inline bool is_tgp_method(Method m) {
    return m == Method::kl || m == Method::ikl || is_sm_method(m);
}

inline TgpMethod to_tgp_method(Method m) {
    switch (m) {
        case Method::kl: return TgpMethod::kl;
        case Method::ikl: return TgpMethod::ikl;
        case Method::sm_quadratic: return TgpMethod::sm_quadratic;
        case Method::sm_cubic: return TgpMethod::sm_cubic;
        default: throw std::invalid_argument("not a TGP method");
    }
}

/// GP regression posterior mean K_X^x^T K_X^{-1} Y under a zero-mean prior,
/// per output dimension.
inline Eigen::VectorXd gpr_predict(const Dataset& train, const Eigen::VectorXd& x,
                                   const KernelConfig& cfg_x) {
    const KernelMatrix k = kernel_matrix(train.inputs, cfg_x);
    const Eigen::VectorXd kv = kernel_vector(train.inputs, x, cfg_x);
    return (k.solve(kv).transpose() * train.outputs).transpose();
}

/// RBF-weighted mean of the k nearest neighbors' outputs. Falls back to an
/// unweighted mean if every weight underflows.
inline Eigen::VectorXd wknn_predict(const Dataset& train, const Eigen::VectorXd& x, int k,
                                    const KernelConfig& cfg_x) {
    if (k < 1 || k > train.size())
        throw std::invalid_argument("wknn_predict: k must lie in [1, N]");
    cfg_x.validate();
    const auto idx = detail::nearest_indices(train.inputs, x, k);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(train.outputs.cols());
    double total = 0.0;
    for (const auto i : idx) {
        const double w =
            std::exp(-(train.inputs.row(i).transpose() - x).squaredNorm() / cfg_x.bandwidth2);
        acc += w * train.outputs.row(i).transpose();
        total += w;
    }
    if (total <= std::numeric_limits<double>::min()) {
        acc.setZero();
        for (const auto i : idx)
            acc += train.outputs.row(i).transpose();
        return acc / static_cast<double>(idx.size());
    }
    return acc / total;
}

struct PointResult {
    int index = 0;
    Eigen::VectorXd y_hat;
    double error = std::numeric_limits<double>::quiet_NaN();
    double phi = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
    bool ok = true;
    std::string message;
};

struct ExperimentReport {
    Method method = Method::kl;
    std::vector<PointResult> points;
    bool has_truth = false;
    int failures = 0;
    double mean_error = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    double wall_seconds = 0.0;
};

namespace detail {

inline void finalize_stats(ExperimentReport& report) {
    std::vector<double> errors;
    for (const auto& p : report.points)
        if (p.ok && std::isfinite(p.error))
            errors.push_back(p.error);
    if (errors.empty()) {
        report.mean_error = std::numeric_limits<double>::quiet_NaN();
        report.std_error = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) /
                        static_cast<double>(errors.size());
    double var = 0.0;
    for (const double e : errors)
        var += (e - mean) * (e - mean);
    report.mean_error = mean;
    report.std_error = errors.size() > 1
                           ? std::sqrt(var / static_cast<double>(errors.size() - 1))
                           : 0.0;
}

}  // namespace detail

/// Runs one method over a whole test set: per-point prediction (restricted
/// to the k_tr nearest training rows when requested), per-point error when
/// the test set carries outputs, and summary statistics. Individual
/// prediction failures are recorded and excluded from the means.
inline ExperimentReport run_experiment(const Dataset& train_set, const Dataset& test_set,
                                       Method method, const SMParams& params,
                                       const KernelConfig& cfg_x, const KernelConfig& cfg_y,
                                       ErrorKind metric, std::optional<int> k_tr = {},
                                       const OptimizerOptions& opts = {}, int wknn_k = 25) {
    if (train_set.inputs.cols() != test_set.inputs.cols())
        throw std::invalid_argument("run_experiment: train/test input dimensions differ");
    if (test_set.outputs.cols() > 0 && test_set.outputs.cols() != train_set.outputs.cols())
        throw std::invalid_argument("run_experiment: train/test output dimensions differ");
    if (k_tr && (*k_tr < 1 || *k_tr > train_set.size()))
        throw std::invalid_argument("run_experiment: k_tr must lie in [1, N]");

    ExperimentReport report;
    report.method = method;
    report.has_truth = test_set.outputs.cols() > 0;
    const auto t0 = std::chrono::steady_clock::now();

    std::optional<TrainedModel> full_model;
    std::optional<KernelMatrix> gpr_kernel;
    Eigen::MatrixXd gpr_weights;
    if (!k_tr) {
        if (is_tgp_method(method)) {
            full_model.emplace(train_set.inputs, train_set.outputs, cfg_x, cfg_y, params);
        } else if (method == Method::gpr) {
            gpr_kernel.emplace(kernel_matrix(train_set.inputs, cfg_x));
            gpr_weights = gpr_kernel->inverse() * train_set.outputs;
        }
    }

    report.points.reserve(static_cast<size_t>(test_set.size()));
    for (Eigen::Index i = 0; i < test_set.size(); ++i) {
        PointResult pr;
        pr.index = static_cast<int>(i);
        const Eigen::VectorXd x = test_set.inputs.row(i).transpose();
        try {
            if (is_tgp_method(method)) {
                Prediction pred;
                if (k_tr) {
                    const Dataset sub = knn_subset(train_set, x, *k_tr);
                    const TrainedModel local(sub.inputs, sub.outputs, cfg_x, cfg_y, params);
                    pred = predict(local, x, to_tgp_method(method), opts);
                } else {
                    pred = predict(*full_model, x, to_tgp_method(method), opts);
                }
                pr.y_hat = pred.y_hat;
                pr.iterations = pred.iterations;
                if (is_sm_method(method))
                    pr.phi = pred.phi;
            } else if (method == Method::gpr) {
                if (k_tr) {
                    pr.y_hat = gpr_predict(knn_subset(train_set, x, *k_tr), x, cfg_x);
                } else {
                    const Eigen::VectorXd kv = kernel_vector(train_set.inputs, x, cfg_x);
                    pr.y_hat = (kv.transpose() * gpr_weights).transpose();
                }
            } else {
                const int k = std::min<int>(wknn_k, static_cast<int>(train_set.size()));
                pr.y_hat = wknn_predict(train_set, x, k, cfg_x);
            }
            if (report.has_truth)
                pr.error = error_metric(pr.y_hat, test_set.outputs.row(i).transpose(), metric);
        } catch (const std::exception& e) {
            pr.ok = false;
            pr.message = e.what();
            ++report.failures;
        }
        report.points.push_back(std::move(pr));
    }

    detail::finalize_stats(report);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// Replaces per-point errors with the distance to the nearest root of the
/// toy forward relation, for test sets that carry no outputs.
inline void score_against_toy_roots(ExperimentReport& report, const Dataset& test_set,
                                    ToyShape shape) {
    for (auto& p : report.points) {
        if (!p.ok)
            continue;
        if (p.y_hat.size() != 1)
            throw std::invalid_argument("score_against_toy_roots: predictions must be 1-D");
        p.error = toy_ground_truth_error(test_set.inputs(p.index, 0), p.y_hat(0), shape);
    }
    report.has_truth = true;
    detail::finalize_stats(report);
}

struct CVCell {
    double alpha = 0.0;
    double beta = 0.0;
    double mean_error = std::numeric_limits<double>::infinity();
    double mean_iterations = 0.0;
};

struct CVResult {
    double best_alpha = 0.0;
    double best_beta = 0.0;
    std::vector<CVCell> grid;
    int folds = 0;
};

/// Five-fold-style cross validation of SMTGP over an (alpha, beta) grid.
/// Fold assignment is a seeded shuffle; alpha grid endpoints 0 and 1 are
/// mapped to 0.01 and 0.99. A cell whose training or prediction fails is
/// marked infinite rather than aborting the sweep. Ties resolve to the
/// smaller alpha, then the smaller |beta - 1|. Per-cell iteration counts
/// are recorded because beta mostly drives convergence rate.
inline CVResult cross_validate(const Dataset& train_set, const KernelConfig& cfg_x,
                               const KernelConfig& cfg_y, const std::vector<double>& alpha_grid,
                               const std::vector<double>& beta_set, int folds, std::uint64_t seed,
                               ErrorKind metric = ErrorKind::mean_abs_1d,
                               const OptimizerOptions& opts = {}) {
    if (folds < 2)
        throw std::invalid_argument("cross_validate: folds must be at least 2");
    if (folds > train_set.size())
        throw std::invalid_argument("cross_validate: more folds than training rows");
    if (alpha_grid.empty() || beta_set.empty())
        throw std::invalid_argument("cross_validate: empty parameter grid");

    std::vector<double> alphas;
    alphas.reserve(alpha_grid.size());
    for (double a : alpha_grid) {
        if (a <= 0.0)
            a = 0.01;
        else if (a >= 1.0)
            a = 0.99;
        alphas.push_back(a);
    }

    const auto n = train_set.size();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    struct Fold {
        Dataset fit;
        Dataset val;
        std::optional<TrainedModel> base;
        std::vector<Eigen::VectorXd> kl_inits;  // KLTGP predictions, shared across cells
    };
    std::vector<Fold> fold_data(static_cast<size_t>(folds));

    // Fold membership: the row at shuffled position p validates in fold p mod folds.
    std::vector<int> fold_of(static_cast<size_t>(n));
    for (Eigen::Index pos = 0; pos < n; ++pos)
        fold_of[static_cast<size_t>(order[static_cast<size_t>(pos)])] =
            static_cast<int>(pos % folds);

    for (int f = 0; f < folds; ++f) {
        std::vector<Eigen::Index> fit_rows, val_rows;
        for (Eigen::Index i = 0; i < n; ++i)
            (fold_of[static_cast<size_t>(i)] == f ? val_rows : fit_rows).push_back(i);
        auto& fold = fold_data[static_cast<size_t>(f)];
        const auto take = [&](const std::vector<Eigen::Index>& rows) {
            Dataset d;
            d.name = train_set.name;
            d.inputs.resize(static_cast<Eigen::Index>(rows.size()), train_set.inputs.cols());
            d.outputs.resize(static_cast<Eigen::Index>(rows.size()), train_set.outputs.cols());
            for (size_t r = 0; r < rows.size(); ++r) {
                d.inputs.row(static_cast<Eigen::Index>(r)) = train_set.inputs.row(rows[r]);
                d.outputs.row(static_cast<Eigen::Index>(r)) = train_set.outputs.row(rows[r]);
            }
            return d;
        };
        fold.fit = take(fit_rows);
        fold.val = take(val_rows);
        try {
            fold.base.emplace(fold.fit.inputs, fold.fit.outputs, cfg_x, cfg_y,
                              SMParams{alphas.front(), beta_set.front()});
            fold.kl_inits.reserve(static_cast<size_t>(fold.val.size()));
            for (Eigen::Index i = 0; i < fold.val.size(); ++i) {
                const Eigen::VectorXd x = fold.val.inputs.row(i).transpose();
                fold.kl_inits.push_back(
                    predict(*fold.base, x, TgpMethod::kl, opts).y_hat);
            }
        } catch (const std::exception&) {
            fold.base.reset();  // every cell inherits the failure
        }
    }

    CVResult result;
    result.folds = folds;
    for (const double a : alphas) {
        for (const double b : beta_set) {
            CVCell cell;
            cell.alpha = a;
            cell.beta = b;
            double error_sum = 0.0;
            double iter_sum = 0.0;
            Eigen::Index count = 0;
            bool failed = false;
            for (auto& fold : fold_data) {
                if (!fold.base) {
                    failed = true;
                    break;
                }
                try {
                    const TrainedModel model = fold.base->with_params(SMParams{a, b});
                    for (Eigen::Index i = 0; i < fold.val.size(); ++i) {
                        const Eigen::VectorXd x = fold.val.inputs.row(i).transpose();
                        const Prediction pred =
                            predict(model, x, TgpMethod::sm_quadratic,
                                    fold.kl_inits[static_cast<size_t>(i)], opts);
                        error_sum += error_metric(pred.y_hat,
                                                  fold.val.outputs.row(i).transpose(), metric);
                        iter_sum += pred.iterations;
                        ++count;
                    }
                } catch (const std::exception&) {
                    failed = true;
                    break;
                }
            }
            if (!failed && count > 0) {
                cell.mean_error = error_sum / static_cast<double>(count);
                cell.mean_iterations = iter_sum / static_cast<double>(count);
            }
            result.grid.push_back(cell);
        }
    }

    const auto better = [](const CVCell& lhs, const CVCell& rhs) {
        if (lhs.mean_error != rhs.mean_error)
            return lhs.mean_error < rhs.mean_error;
        if (lhs.alpha != rhs.alpha)
            return lhs.alpha < rhs.alpha;
        return std::abs(lhs.beta - 1.0) < std::abs(rhs.beta - 1.0);
    };
    const auto best = std::min_element(result.grid.begin(), result.grid.end(), better);
    result.best_alpha = best->alpha;
    result.best_beta = best->beta;
    return result;
}

struct CertaintyReport {
    std::vector<std::pair<double, double>> pairs;  // (log phi, error)
    double spearman_rho = 0.0;
    bool degenerate = false;  // constant ranks, correlation undefined
};

namespace detail {

inline std::vector<double> average_ranks(const std::vector<double>& values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]])
            ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (size_t k = i; k <= j; ++k)
            ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

inline std::pair<double, bool> pearson(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va <= 0.0 || vb <= 0.0)
        return {0.0, true};
    return {cov / std::sqrt(va * vb), false};
}

}  // namespace detail

/// Spearman rank correlation between log(phi) and the per-point error of an
/// SM-method report.
inline CertaintyReport certainty_report(const ExperimentReport& report) {
    if (!is_sm_method(report.method))
        throw std::invalid_argument("certainty_report: report does not carry phi "
                                    "(not an SM-method run)");
    if (!report.has_truth)
        throw std::invalid_argument("certainty_report: report carries no per-point errors");
    CertaintyReport out;
    std::vector<double> log_phi, errors;
    for (const auto& p : report.points) {
        if (!p.ok || !std::isfinite(p.phi) || !std::isfinite(p.error))
            continue;
        const double lp = std::log(p.phi);
        out.pairs.emplace_back(lp, p.error);
        log_phi.push_back(lp);
        errors.push_back(p.error);
    }
    if (log_phi.size() < 2) {
        out.degenerate = true;
        return out;
    }
    const auto [rho, degenerate] =
        detail::pearson(detail::average_ranks(log_phi), detail::average_ranks(errors));
    out.spearman_rho = rho;
    out.degenerate = degenerate;
    return out;
}

struct EtaBlendCurves {
    std::vector<double> alphas;
    std::vector<double> geometric;   // eta1^(1-a) eta2^a
    std::vector<double> arithmetic;  // (1-a) eta1 + a eta2
};

/// Samples the weighted geometric and arithmetic blends of two uncertainty
/// extensions at 101 points across alpha in [0, 1].
inline EtaBlendCurves emit_eta_blend_curves(double eta1, double eta2) {
    if (!(eta1 > 0.0) || !(eta2 > 0.0))
        throw std::invalid_argument("emit_eta_blend_curves: etas must be positive");
    EtaBlendCurves curves;
    for (int i = 0; i <= 100; ++i) {
        const double a = i / 100.0;
        curves.alphas.push_back(a);
        curves.geometric.push_back(std::pow(eta1, 1.0 - a) * std::pow(eta2, a));
        curves.arithmetic.push_back((1.0 - a) * eta1 + a * eta2);
    }
    return curves;
}

/// Per-point rows of a report as CSV. Column set adapts to the method:
/// phi appears for SM runs, the error column when truth was available.
inline std::string report_csv(const ExperimentReport& report) {
    std::string out = "index";
    Eigen::Index d_y = 0;
    for (const auto& p : report.points)
        if (p.ok) {
            d_y = p.y_hat.size();
            break;
        }
    for (Eigen::Index j = 0; j < d_y; ++j)
        out += ",yhat" + std::to_string(j + 1);
    if (report.has_truth)
        out += ",error";
    if (is_sm_method(report.method))
        out += ",phi";
    out += ",iterations,ok\n";
    for (const auto& p : report.points) {
        out += std::to_string(p.index);
        for (Eigen::Index j = 0; j < d_y; ++j)
            out += "," + (p.ok ? csv::format_full(p.y_hat(j)) : std::string("nan"));
        if (report.has_truth)
            out += "," + (p.ok ? csv::format_full(p.error) : std::string("nan"));
        if (is_sm_method(report.method))
            out += "," + (p.ok ? csv::format_full(p.phi) : std::string("nan"));
        out += "," + std::to_string(p.iterations);
        out += p.ok ? ",1\n" : ",0\n";
    }
    return out;
}

inline std::string method_name(Method m) {
    switch (m) {
        case Method::kl: return "kl";
        case Method::ikl: return "ikl";
        case Method::sm_quadratic: return "sm";
        case Method::sm_cubic: return "sm-cubic";
        case Method::gpr: return "gpr";
        case Method::wknn: return "wknn";
    }
    return "unknown";
}

/// Compact key:value text block summarizing a run (6 significant digits).
inline std::string summary_block(const ExperimentReport& report) {
    std::ostringstream os;
    os.precision(6);
    os << "method: " << method_name(report.method) << '\n';
    os << "points: " << report.points.size() << '\n';
    os << "failures: " << report.failures << '\n';
    if (report.has_truth) {
        os << "mean_error: " << report.mean_error << '\n';
        os << "std_error: " << report.std_error << '\n';
    }
    os << "wall_seconds: " << report.wall_seconds << '\n';
    return os.str();
}

}  // namespace smtgp
