#pragma once

#include "smtgp/csv.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smtgp {

struct Dataset {
    Eigen::MatrixXd inputs;   // N x d_x
    Eigen::MatrixXd outputs;  // N x d_y (d_y may be 0 for unlabeled test sets)
    std::string name;

    Eigen::Index size() const { return inputs.rows(); }
};

struct ToyData {
    Dataset train;
    Eigen::VectorXd test_inputs;
};

enum class ToyShape { toy1, toy2 };

/// The noiseless forward relation of both toy problems.
inline double toy_forward(double y) {
    return y + 0.3 * std::sin(2.0 * std::numbers::pi * y);
}

namespace detail {

inline std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform_open01(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double v = unif(rng);
    while (v == 0.0)
        v = unif(rng);
    return v;
}

}  // namespace detail

/// 250 training pairs x = y + 0.3 sin(2 pi y) + eps, y uniform in (0,1),
/// eps ~ N(0, 0.005^2), plus 250 equally spaced test inputs in (0,1)
/// (endpoints excluded). Pure function of the seed.
inline ToyData generate_toy1(std::uint64_t seed) {
    constexpr int n = 250;
    auto rng = detail::seeded_rng(seed);
    std::normal_distribution<double> noise(0.0, 0.005);

    ToyData data;
    data.train.name = "toy1";
    data.train.inputs.resize(n, 1);
    data.train.outputs.resize(n, 1);
    for (int i = 0; i < n; ++i) {
        const double y = detail::uniform_open01(rng);
        data.train.outputs(i, 0) = y;
        data.train.inputs(i, 0) = toy_forward(y) + noise(rng);
    }
    data.test_inputs.resize(n);
    for (int i = 0; i < n; ++i)
        data.test_inputs(i) = (i + 0.5) / n;
    return data;
}

/// Double-S toy problem: 500 base pairs, half shifted to x in (-1,0) and
/// half in (0,1), down-sampled by two so the training size matches toy 1.
/// Test inputs are 500 equally spaced x in (-1,1).
inline ToyData generate_toy2(std::uint64_t seed) {
    constexpr int base = 500;
    constexpr int kept = base / 2;
    auto rng = detail::seeded_rng(seed);
    std::normal_distribution<double> noise(0.0, 0.005);

    Eigen::MatrixXd base_x(base, 1), base_y(base, 1);
    for (int i = 0; i < base; ++i) {
        const double y = detail::uniform_open01(rng);
        const double shift = i < base / 2 ? -1.0 : 0.0;
        base_y(i, 0) = y;
        base_x(i, 0) = toy_forward(y) + noise(rng) + shift;
    }

    ToyData data;
    data.train.name = "toy2";
    data.train.inputs.resize(kept, 1);
    data.train.outputs.resize(kept, 1);
    for (int i = 0; i < kept; ++i) {
        data.train.inputs(i, 0) = base_x(2 * i, 0);
        data.train.outputs(i, 0) = base_y(2 * i, 0);
    }
    data.test_inputs.resize(base);
    for (int i = 0; i < base; ++i)
        data.test_inputs(i) = -1.0 + (2.0 * i + 1.0) / base;
    return data;
}

/// All solutions y* in [0,1] of the (possibly shifted) forward relation for
/// the given test input: sign changes of the residual on a 10^4-point grid,
/// refined by bisection to 1e-10.
inline std::vector<double> toy_roots(double test_x, ToyShape shape) {
    std::vector<double> roots;
    const auto scan_branch = [&roots](double target) {
        if (target < 0.0 || target > 1.0)
            return;
        constexpr int grid = 10000;
        const auto residual = [target](double y) { return toy_forward(y) - target; };
        double prev_y = 0.0;
        double prev_r = residual(prev_y);
        if (prev_r == 0.0)
            roots.push_back(prev_y);
        for (int i = 1; i <= grid; ++i) {
            const double cur_y = static_cast<double>(i) / grid;
            const double cur_r = residual(cur_y);
            if (cur_r == 0.0) {
                roots.push_back(cur_y);
            } else if ((prev_r < 0.0) != (cur_r < 0.0) && prev_r != 0.0) {
                double lo = prev_y, hi = cur_y;
                double r_lo = prev_r;
                while (hi - lo > 1e-10) {
                    const double mid = 0.5 * (lo + hi);
                    const double r_mid = residual(mid);
                    if (r_mid == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if ((r_lo < 0.0) == (r_mid < 0.0)) {
                        lo = mid;
                        r_lo = r_mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            prev_y = cur_y;
            prev_r = cur_r;
        }
    };

    if (shape == ToyShape::toy1) {
        scan_branch(test_x);
    } else {
        if (test_x <= 0.0)
            scan_branch(test_x + 1.0);  // left S, shifted into (-1,0)
        if (test_x >= 0.0)
            scan_branch(test_x);
    }
    if (roots.empty())
        throw std::runtime_error("toy_roots: no root for test input " + std::to_string(test_x));
    return roots;
}

/// Distance from y_hat to the nearest root of the forward relation; the
/// ground-truth error of a multimodal inverse problem.
inline double toy_ground_truth_error(double test_x, double y_hat, ToyShape shape) {
    const auto roots = toy_roots(test_x, shape);
    double best = std::numeric_limits<double>::infinity();
    for (const double r : roots)
        best = std::min(best, std::abs(y_hat - r));
    return best;
}

/// Dataset CSV: header row "x1,...,xD,y1,...,yM", '.'-decimal, comma
/// separated, LF line endings. `d_x` splits the columns into inputs and
/// outputs; a file with exactly d_x columns loads as an unlabeled set.
inline Dataset load_csv(const std::string& path, int d_x) {
    if (d_x < 1)
        throw std::invalid_argument("load_csv: d_x must be positive");
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ": empty file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    const auto header = csv::split_line(line);
    double ignored = 0.0;
    if (header.empty() || csv::try_parse_cell(header.front(), ignored))
        throw std::runtime_error(path + ": missing header row (expected x1,...,y1,...)");
    const auto width = static_cast<Eigen::Index>(header.size());
    if (d_x > width)
        throw std::runtime_error(path + ": d_x = " + std::to_string(d_x) + " exceeds the " +
                                 std::to_string(width) + " columns in the header");

    std::vector<std::vector<double>> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = csv::split_line(line);
        if (static_cast<Eigen::Index>(cells.size()) != width)
            throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(width) + " columns, found " +
                                     std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells)
            row.push_back(csv::parse_cell(cell, path, line_no));
        rows.push_back(std::move(row));
    }

    Dataset ds;
    ds.name = path;
    const auto n = static_cast<Eigen::Index>(rows.size());
    ds.inputs.resize(n, d_x);
    ds.outputs.resize(n, width - d_x);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d_x; ++j)
            ds.inputs(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
        for (Eigen::Index j = d_x; j < width; ++j)
            ds.outputs(i, j - d_x) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    return ds;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::string out;
    for (Eigen::Index j = 0; j < ds.inputs.cols(); ++j)
        out += (j ? ",x" : "x") + std::to_string(j + 1);
    for (Eigen::Index j = 0; j < ds.outputs.cols(); ++j)
        out += ",y" + std::to_string(j + 1);
    out += '\n';
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        for (Eigen::Index j = 0; j < ds.inputs.cols(); ++j) {
            if (j)
                out += ',';
            out += csv::format_full(ds.inputs(i, j));
        }
        for (Eigen::Index j = 0; j < ds.outputs.cols(); ++j) {
            out += ',';
            out += csv::format_full(ds.outputs(i, j));
        }
        out += '\n';
    }
    csv::write_text_atomic(path, out);
}

namespace detail {

/// Indices of the k nearest rows by Euclidean input distance, ties broken
/// by lower row index; returned in ascending index order.
inline std::vector<Eigen::Index> nearest_indices(const Eigen::MatrixXd& points,
                                                 const Eigen::VectorXd& x, int k) {
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(static_cast<size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        dist.emplace_back((points.row(i).transpose() - x).squaredNorm(), i);
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
    std::sort(dist.begin(), dist.begin() + k);
    std::vector<Eigen::Index> idx(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i)
        idx[static_cast<size_t>(i)] = dist[static_cast<size_t>(i)].second;
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace detail

/// Rows of `train` with the k_tr smallest input distances to x.
inline Dataset knn_subset(const Dataset& train, const Eigen::VectorXd& x, int k_tr) {
    if (k_tr < 1 || k_tr > train.size())
        throw std::invalid_argument("knn_subset: k_tr must lie in [1, N]");
    if (x.size() != train.inputs.cols())
        throw std::invalid_argument("knn_subset: query dimension mismatch");
    const auto idx = detail::nearest_indices(train.inputs, x, k_tr);
    Dataset out;
    out.name = train.name;
    out.inputs.resize(k_tr, train.inputs.cols());
    out.outputs.resize(k_tr, train.outputs.cols());
    for (int i = 0; i < k_tr; ++i) {
        out.inputs.row(i) = train.inputs.row(idx[static_cast<size_t>(i)]);
        out.outputs.row(i) = train.outputs.row(idx[static_cast<size_t>(i)]);
    }
    return out;
}

enum class ErrorKind { mean_abs_1d, usps_center_norm, poser_deg_mod360, heva_marker_mm };

namespace detail {

inline double wrap_degrees(double d) {
    double w = std::fmod(d, 360.0);
    if (w <= -180.0)
        w += 360.0;
    else if (w > 180.0)
        w -= 360.0;
    return w;
}

}  // namespace detail

/// Per-dataset error measures. Dimensions are fixed per kind: 1 for the toy
/// shapes, 16 center pixels, 54 joint angles, 20 3-D markers.
inline double error_metric(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y_star,
                           ErrorKind kind) {
    if (y_hat.size() != y_star.size())
        throw std::invalid_argument("error_metric: prediction/truth dimension mismatch");
    const auto require_dim = [&](Eigen::Index d) {
        if (y_hat.size() != d)
            throw std::invalid_argument("error_metric: this kind expects dimension " +
                                        std::to_string(d) + ", got " +
                                        std::to_string(y_hat.size()));
    };
    switch (kind) {
        case ErrorKind::mean_abs_1d:
            require_dim(1);
            return std::abs(y_hat(0) - y_star(0));
        case ErrorKind::usps_center_norm:
            require_dim(16);
            return (y_hat - y_star).norm();
        case ErrorKind::poser_deg_mod360: {
            require_dim(54);
            double sum = 0.0;
            for (Eigen::Index i = 0; i < 54; ++i)
                sum += std::abs(detail::wrap_degrees(y_hat(i) - y_star(i)));
            return sum / 54.0;
        }
        case ErrorKind::heva_marker_mm: {
            require_dim(60);
            double sum = 0.0;
            for (int m = 0; m < 20; ++m)
                sum += (y_hat.segment(3 * m, 3) - y_star.segment(3 * m, 3)).norm();
            return sum / 20.0;
        }
    }
    throw std::invalid_argument("error_metric: unknown kind");
}

}  // namespace smtgp
