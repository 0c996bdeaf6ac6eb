#pragma once

#include "smtgp/gaussian_divergence.hpp"
#include "smtgp/kernels.hpp"
#include "smtgp/optimizer.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace smtgp {

/// Flat key-value run configuration shared by the CLI commands. Presets
/// encode the per-dataset parameter settings verbatim; an explicit config
/// file overrides preset values key by key.
struct RunConfig {
    double bandwidth2_x = 1.0;  // 2 rho_x^2
    double bandwidth2_y = 1.0;  // 2 rho_y^2
    double lambda_x = 1e-4;
    double lambda_y = 1e-4;
    double alpha = 0.5;
    double beta = 1.5;
    int max_iterations = 50;
    std::optional<int> k_tr;
    std::optional<int> wknn_k;
    std::uint64_t seed = 0;

    static RunConfig preset(const std::string& name) {
        RunConfig c;
        if (name == "toy1") {
            c.bandwidth2_x = 5.0;
            c.bandwidth2_y = 0.05;
            c.lambda_x = c.lambda_y = 1e-4;
            c.alpha = 0.9;
            c.beta = 1.5;
        } else if (name == "toy2") {
            c.bandwidth2_x = 5.0;
            c.bandwidth2_y = 0.05;
            c.lambda_x = c.lambda_y = 1e-4;
            c.alpha = 0.6;
            c.beta = 0.99;
        } else if (name == "usps") {
            c.bandwidth2_x = 2.0;
            c.bandwidth2_y = 2.0;
            c.lambda_x = c.lambda_y = 0.5e-3;
            c.alpha = 0.9;
            c.beta = 0.99;
        } else if (name == "poser") {
            c.bandwidth2_x = 5.0;
            c.bandwidth2_y = 5000.0;
            c.lambda_x = c.lambda_y = 1e-4;
            c.alpha = 0.7;
            c.beta = 0.5;
        } else if (name == "heva") {
            c.bandwidth2_x = 5.0;
            c.bandwidth2_y = 500000.0;
            c.lambda_x = c.lambda_y = 1e-3;
            c.alpha = 0.99;
            c.beta = 0.99;
        } else {
            throw std::invalid_argument("unknown preset '" + name +
                                        "' (expected toy1|toy2|usps|poser|heva)");
        }
        return c;
    }

    void apply_json(const nlohmann::json& doc) {
        if (!doc.is_object())
            throw std::invalid_argument("config: expected a flat JSON object");
        for (const auto& [key, value] : doc.items()) {
            try {
                if (key == "bandwidth2_x") bandwidth2_x = value.get<double>();
                else if (key == "bandwidth2_y") bandwidth2_y = value.get<double>();
                else if (key == "lambda_x") lambda_x = value.get<double>();
                else if (key == "lambda_y") lambda_y = value.get<double>();
                else if (key == "alpha") alpha = value.get<double>();
                else if (key == "beta") beta = value.get<double>();
                else if (key == "max_iterations") max_iterations = value.get<int>();
                else if (key == "k_tr") k_tr = value.get<int>();
                else if (key == "wknn_k") wknn_k = value.get<int>();
                else if (key == "seed") seed = value.get<std::uint64_t>();
                else
                    throw std::invalid_argument("config: unknown field '" + key + "'");
            } catch (const nlohmann::json::exception&) {
                throw std::invalid_argument("config: field '" + key + "' has the wrong type");
            }
        }
    }

    void apply_json_file(const std::string& path) {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("config: cannot open '" + path + "'");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config: '" + path + "' is not valid JSON: " + e.what());
        }
        apply_json(doc);
    }

    KernelConfig kernel_x() const { return KernelConfig{bandwidth2_x, lambda_x}; }
    KernelConfig kernel_y() const { return KernelConfig{bandwidth2_y, lambda_y}; }
    SMParams sm_params() const { return SMParams{alpha, beta}; }
    OptimizerOptions optimizer_options() const {
        OptimizerOptions o;
        o.max_iterations = max_iterations;
        return o;
    }
};

}  // namespace smtgp
