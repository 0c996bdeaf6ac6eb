// Command-line surface for the Sharma-Mittal twin-GP library: toy data
// generation, prediction, cross validation, standalone divergences, the
// closed-form benchmark, and certainty/eta curve exports. All file output
// is plot-ready CSV written atomically; exit codes are 0 on success, 1 on
// runtime or numeric failure, 2 on usage errors.

#include "smtgp/csv.hpp"
#include "smtgp/datasets.hpp"
#include "smtgp/evaluation.hpp"
#include "smtgp/gaussian_divergence.hpp"
#include "smtgp/run_config.hpp"
#include "smtgp/tgp.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

smtgp::Method parse_method(const std::string& name) {
    if (name == "kl") return smtgp::Method::kl;
    if (name == "ikl") return smtgp::Method::ikl;
    if (name == "sm") return smtgp::Method::sm_quadratic;
    if (name == "sm-cubic") return smtgp::Method::sm_cubic;
    if (name == "gpr") return smtgp::Method::gpr;
    if (name == "wknn") return smtgp::Method::wknn;
    throw std::invalid_argument("unknown method '" + name + "'");
}

smtgp::ErrorKind metric_for_output_dim(Eigen::Index d_y) {
    switch (d_y) {
        case 1: return smtgp::ErrorKind::mean_abs_1d;
        case 16: return smtgp::ErrorKind::usps_center_norm;
        case 54: return smtgp::ErrorKind::poser_deg_mod360;
        case 60: return smtgp::ErrorKind::heva_marker_mm;
        default:
            throw std::invalid_argument("no error metric is defined for output dimension " +
                                        std::to_string(d_y) + " (supported: 1, 16, 54, 60)");
    }
}

std::vector<double> parse_grid_spec(const std::string& spec) {
    // "start:step:stop", inclusive of stop up to round-off
    const auto parts = smtgp::csv::split_line(spec, ':');
    if (parts.size() != 3)
        throw std::invalid_argument("grid '" + spec + "' is not of the form start:step:stop");
    double start = 0, step = 0, stop = 0;
    if (!smtgp::csv::try_parse_cell(parts[0], start) ||
        !smtgp::csv::try_parse_cell(parts[1], step) ||
        !smtgp::csv::try_parse_cell(parts[2], stop) || step <= 0.0)
        throw std::invalid_argument("grid '" + spec + "' is not numeric with positive step");
    std::vector<double> values;
    for (double v = start; v <= stop + 0.5 * step; v += step)
        values.push_back(v);
    if (values.empty())
        throw std::invalid_argument("grid '" + spec + "' is empty");
    return values;
}

std::vector<double> parse_double_list(const std::string& spec) {
    std::vector<double> values;
    for (const auto& cell : smtgp::csv::split_line(spec, ',')) {
        double v = 0;
        if (!smtgp::csv::try_parse_cell(cell, v))
            throw std::invalid_argument("list '" + spec + "' contains non-numeric '" + cell + "'");
        values.push_back(v);
    }
    if (values.empty())
        throw std::invalid_argument("list '" + spec + "' is empty");
    return values;
}

struct ConfigFlags {
    std::string preset;
    std::string config_path;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& flags) {
    cmd->add_option("--preset", flags.preset, "parameter preset: toy1|toy2|usps|poser|heva")
        ->check(CLI::IsMember({"toy1", "toy2", "usps", "poser", "heva"}));
    cmd->add_option("--config", flags.config_path, "flat JSON config file (overrides preset)");
}

smtgp::RunConfig resolve_config(const ConfigFlags& flags) {
    smtgp::RunConfig cfg =
        flags.preset.empty() ? smtgp::RunConfig{} : smtgp::RunConfig::preset(flags.preset);
    if (!flags.config_path.empty())
        cfg.apply_json_file(flags.config_path);
    return cfg;
}

struct PredictArgs {
    std::string train_path;
    std::string test_path;
    std::string out_path;
    std::string method = "sm";
    int d_x = 0;
    ConfigFlags config;
    std::optional<int> ktr_flag;
    std::optional<int> toy_truth;
};

void add_predict_args(CLI::App* cmd, PredictArgs& args) {
    cmd->add_option("--train", args.train_path, "training CSV (header x1,...,y1,...)")
        ->required();
    cmd->add_option("--dx", args.d_x, "number of input columns")->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--test", args.test_path, "test CSV (inputs, optionally with outputs)")
        ->required();
    cmd->add_option("--out", args.out_path, "per-point output CSV")->required();
    add_config_flags(cmd, args.config);
    cmd->add_option("--ktr", args.ktr_flag,
                    "train on the k nearest training rows per test point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--toy-truth", args.toy_truth,
                    "score 1-D predictions against the toy forward relation (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
}

smtgp::ExperimentReport run_predict(const PredictArgs& args, smtgp::Method method) {
    smtgp::RunConfig cfg = resolve_config(args.config);
    if (args.ktr_flag)
        cfg.k_tr = *args.ktr_flag;

    const smtgp::Dataset train = smtgp::load_csv(args.train_path, args.d_x);
    const smtgp::Dataset test = smtgp::load_csv(args.test_path, args.d_x);
    if (train.outputs.cols() == 0)
        throw std::invalid_argument("training file '" + args.train_path +
                                    "' has no output columns after dx=" + std::to_string(args.d_x));

    const bool has_truth = test.outputs.cols() > 0;
    smtgp::ErrorKind metric = smtgp::ErrorKind::mean_abs_1d;
    if (has_truth)
        metric = metric_for_output_dim(train.outputs.cols());

    auto report = smtgp::run_experiment(train, test, method, cfg.sm_params(), cfg.kernel_x(),
                                        cfg.kernel_y(), metric, cfg.k_tr,
                                        cfg.optimizer_options(), cfg.wknn_k.value_or(25));
    if (args.toy_truth)
        smtgp::score_against_toy_roots(report, test,
                                       *args.toy_truth == 1 ? smtgp::ToyShape::toy1
                                                            : smtgp::ToyShape::toy2);
    return report;
}

int cmd_gen_toy(int which, std::uint64_t seed, const std::string& train_out,
                const std::string& test_out) {
    const smtgp::ToyData data = which == 1 ? smtgp::generate_toy1(seed) : smtgp::generate_toy2(seed);
    smtgp::save_csv(data.train, train_out);
    smtgp::Dataset test;
    test.inputs = data.test_inputs;
    test.outputs.resize(data.test_inputs.size(), 0);
    smtgp::save_csv(test, test_out);
    std::cout << "train_rows: " << data.train.size() << "\n"
              << "test_rows: " << data.test_inputs.size() << "\n";
    return 0;
}

int cmd_divergence(int dim, const std::string& p_cov_path, const std::string& q_cov_path,
                   const std::string& p_mean_path, const std::string& q_mean_path, double alpha,
                   double beta, const std::string& form) {
    smtgp::GaussianSpec p{Eigen::VectorXd::Zero(dim), smtgp::csv::load_matrix(p_cov_path)};
    smtgp::GaussianSpec q{Eigen::VectorXd::Zero(dim), smtgp::csv::load_matrix(q_cov_path)};
    if (!p_mean_path.empty())
        p.mean = smtgp::csv::load_vector(p_mean_path);
    if (!q_mean_path.empty())
        q.mean = smtgp::csv::load_vector(q_mean_path);
    if (p.cov.rows() != dim || q.cov.rows() != dim)
        throw std::invalid_argument("covariance size does not match --dim");

    double value = 0.0;
    if (form == "original")
        value = smtgp::sm_divergence_original(p, q, smtgp::SMParams{alpha, beta});
    else if (form == "simplified")
        value = smtgp::sm_divergence_simplified(p, q, smtgp::SMParams{alpha, beta});
    else if (form == "renyi")
        value = smtgp::renyi_divergence(p, q, alpha);
    else if (form == "tsallis")
        value = smtgp::tsallis_divergence(p, q, alpha);
    else if (form == "kl")
        value = smtgp::kl_divergence(p, q);
    else if (form == "bhatt")
        value = smtgp::bhattacharyya_divergence(p, q);
    else
        throw std::invalid_argument("unknown form '" + form + "'");

    std::ostringstream os;
    os.precision(12);
    os << value;
    std::cout << os.str() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Twin Gaussian process regression under the Sharma-Mittal divergence family"};
    app.require_subcommand(1);

    // gen-toy
    auto* gen = app.add_subcommand("gen-toy", "generate a toy dataset as CSV");
    int gen_which = 1;
    std::uint64_t gen_seed = 0;
    std::string gen_train_out, gen_test_out;
    gen->add_option("--which", gen_which, "toy problem 1 or 2")->required()
        ->check(CLI::IsMember({1, 2}));
    gen->add_option("--seed", gen_seed, "generator seed")->required();
    gen->add_option("--train-out", gen_train_out, "training CSV path")->required();
    gen->add_option("--test-out", gen_test_out, "test-inputs CSV path")->required();

    // predict
    auto* pred = app.add_subcommand("predict", "run a regression method over a test set");
    PredictArgs pred_args;
    add_predict_args(pred, pred_args);
    pred->add_option("--method", pred_args.method, "kl|ikl|sm|sm-cubic|gpr|wknn")
        ->required()
        ->check(CLI::IsMember({"kl", "ikl", "sm", "sm-cubic", "gpr", "wknn"}));

    // crossval
    auto* cv = app.add_subcommand("crossval", "cross-validate SMTGP alpha/beta on a grid");
    std::string cv_train, cv_out, cv_alpha_spec = "0.05:0.05:0.95", cv_beta_spec = "0.5,0.99,1.5";
    int cv_dx = 0, cv_folds = 5;
    ConfigFlags cv_config;
    cv->add_option("--train", cv_train, "training CSV")->required();
    cv->add_option("--dx", cv_dx, "number of input columns")->required()
        ->check(CLI::PositiveNumber);
    cv->add_option("--folds", cv_folds, "number of folds (>= 2)")->required();
    cv->add_option("--alpha-grid", cv_alpha_spec, "alpha grid start:step:stop");
    cv->add_option("--betas", cv_beta_spec, "comma-separated beta values");
    cv->add_option("--out", cv_out, "grid CSV path")->required();
    add_config_flags(cv, cv_config);

    // divergence
    auto* div = app.add_subcommand("divergence", "closed-form divergence between two Gaussians");
    int div_dim = 0;
    std::string div_pcov, div_qcov, div_pmean, div_qmean, div_form = "simplified";
    double div_alpha = 0.5, div_beta = 0.5;
    div->add_option("--dim", div_dim, "dimension")->required()->check(CLI::PositiveNumber);
    div->add_option("--p-cov", div_pcov, "CSV matrix for cov(p)")->required();
    div->add_option("--q-cov", div_qcov, "CSV matrix for cov(q)")->required();
    div->add_option("--p-mean", div_pmean, "CSV vector for mean(p), default zero");
    div->add_option("--q-mean", div_qmean, "CSV vector for mean(q), default zero");
    div->add_option("--alpha", div_alpha, "alpha in (0,1)");
    div->add_option("--beta", div_beta, "beta != 1");
    div->add_option("--form", div_form, "original|simplified|renyi|tsallis|kl|bhatt")
        ->check(CLI::IsMember({"original", "simplified", "renyi", "tsallis", "kl", "bhatt"}));

    // bench-divergence
    auto* bench = app.add_subcommand("bench-divergence", "time both closed forms");
    int bench_dim = 1000, bench_reps = 5;
    bool bench_nonzero_mean = false;
    bench->add_option("--dim", bench_dim, "matrix dimension (>= 16)");
    bench->add_option("--reps", bench_reps, "repetitions (>= 3)");
    bench->add_flag("--nonzero-mean", bench_nonzero_mean, "benchmark the general-mean case");

    // certainty
    auto* cert = app.add_subcommand("certainty", "per-point (log phi, error) pairs and Spearman rho");
    PredictArgs cert_args;
    add_predict_args(cert, cert_args);
    cert->add_option("--method", cert_args.method, "sm|sm-cubic")
        ->check(CLI::IsMember({"sm", "sm-cubic"}));

    // eta-curves
    auto* curves = app.add_subcommand("eta-curves", "geometric vs arithmetic eta blends over alpha");
    double eta1 = 1.0, eta2 = 1.0;
    std::string curves_out;
    curves->add_option("--eta1", eta1, "first eta (> 0)")->required();
    curves->add_option("--eta2", eta2, "second eta (> 0)")->required();
    curves->add_option("--out", curves_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (gen->parsed())
            return cmd_gen_toy(gen_which, gen_seed, gen_train_out, gen_test_out);

        if (pred->parsed()) {
            const auto report = run_predict(pred_args, parse_method(pred_args.method));
            smtgp::csv::write_text_atomic(pred_args.out_path, smtgp::report_csv(report));
            std::cout << smtgp::summary_block(report);
            return 0;
        }

        if (cv->parsed()) {
            if (cv_folds < 2)
                throw std::invalid_argument("--folds must be at least 2");
            const smtgp::RunConfig cfg = resolve_config(cv_config);
            const smtgp::Dataset train = smtgp::load_csv(cv_train, cv_dx);
            if (train.outputs.cols() == 0)
                throw std::invalid_argument("training file has no output columns");
            const auto result = smtgp::cross_validate(
                train, cfg.kernel_x(), cfg.kernel_y(), parse_grid_spec(cv_alpha_spec),
                parse_double_list(cv_beta_spec), cv_folds, cfg.seed,
                metric_for_output_dim(train.outputs.cols()), cfg.optimizer_options());
            std::string out = "alpha,beta,mean_error,mean_iterations\n";
            for (const auto& cell : result.grid) {
                out += smtgp::csv::format_full(cell.alpha) + "," +
                       smtgp::csv::format_full(cell.beta) + "," +
                       smtgp::csv::format_full(cell.mean_error) + "," +
                       smtgp::csv::format_full(cell.mean_iterations) + "\n";
            }
            smtgp::csv::write_text_atomic(cv_out, out);
            std::ostringstream os;
            os.precision(6);
            os << "folds: " << result.folds << "\n"
               << "best_alpha: " << result.best_alpha << "\n"
               << "best_beta: " << result.best_beta << "\n";
            std::cout << os.str();
            return 0;
        }

        if (div->parsed())
            return cmd_divergence(div_dim, div_pcov, div_qcov, div_pmean, div_qmean, div_alpha,
                                  div_beta, div_form);

        if (bench->parsed()) {
            const auto report = smtgp::benchmark_forms(bench_dim, bench_reps, !bench_nonzero_mean);
            std::ostringstream os;
            os.precision(6);
            os << "dim: " << report.dim << "\n"
               << "reps: " << report.reps << "\n"
               << "delta_mu_zero: " << (report.delta_mu_zero ? "true" : "false") << "\n"
               << "model_ops_original: " << report.model_ops_original << "\n"
               << "model_ops_simplified: " << report.model_ops_simplified << "\n"
               << "model_ratio: " << report.model_ratio << "\n"
               << "median_seconds_original: " << report.seconds_original << "\n"
               << "median_seconds_simplified: " << report.seconds_simplified << "\n"
               << "measured_ratio: " << report.measured_ratio << "\n";
            std::cout << os.str();
            return 0;
        }

        if (cert->parsed()) {
            const auto report = run_predict(cert_args, parse_method(cert_args.method));
            const auto certainty = smtgp::certainty_report(report);
            std::string out = "log_phi,error\n";
            for (const auto& [log_phi, error] : certainty.pairs)
                out += smtgp::csv::format_full(log_phi) + "," + smtgp::csv::format_full(error) +
                       "\n";
            smtgp::csv::write_text_atomic(cert_args.out_path, out);
            std::ostringstream os;
            os.precision(6);
            os << "pairs: " << certainty.pairs.size() << "\n"
               << "spearman_rho: " << certainty.spearman_rho << "\n"
               << "degenerate: " << (certainty.degenerate ? "true" : "false") << "\n";
            std::cout << os.str();
            return 0;
        }

        if (curves->parsed()) {
            const auto sampled = smtgp::emit_eta_blend_curves(eta1, eta2);
            std::string out = "alpha,f1_geometric,f2_arithmetic\n";
            for (size_t i = 0; i < sampled.alphas.size(); ++i)
                out += smtgp::csv::format_full(sampled.alphas[i]) + "," +
                       smtgp::csv::format_full(sampled.geometric[i]) + "," +
                       smtgp::csv::format_full(sampled.arithmetic[i]) + "\n";
            smtgp::csv::write_text_atomic(curves_out, out);
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
