// Command-line front end: simulation, fitting, rate experiments,
// diagnostics, burn-in evaluation, and dependency-matrix tables, all driven
// by flat key-value config files.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "pem/arma.hpp"
#include "pem/config.hpp"
#include "pem/csv.hpp"
#include "pem/errors.hpp"
#include "pem/estimator.hpp"
#include "pem/experiment.hpp"
#include "pem/param_space.hpp"
#include "pem/seeding.hpp"
#include "pem/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEstimation = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool config_required = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "key = value config file");
    if (config_required) {
        opt->required();
    }
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--out", flags.out_path, "override the output path");
    cmd->add_option("--threads", flags.threads, "worker threads");
}

pem::KeyValueConfig load_config(const CommonFlags& flags) {
    auto kv = flags.config_path.empty() ? pem::KeyValueConfig()
                                        : pem::KeyValueConfig::parse_file(flags.config_path);
    if (flags.seed) {
        kv.set("seed", std::to_string(*flags.seed));
    }
    if (!flags.out_path.empty()) {
        kv.set("out", flags.out_path);
    }
    if (flags.threads) {
        kv.set("threads", std::to_string(*flags.threads));
    }
    return kv;
}

void emit_report(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw pem::ConfigError("cannot open '" + out_path + "' for writing");
    }
    out << text;
}

class Report {
public:
    void add(const std::string& key, double value) {
        out_ << key << " = " << pem::format_number(value) << '\n';
    }
    void add(const std::string& key, const std::string& value) {
        out_ << key << " = " << value << '\n';
    }
    void add(const std::string& key, const Eigen::VectorXd& v) {
        std::string joined;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            joined += (i ? ", " : "") + pem::format_number(v[i]);
        }
        add(key, joined);
    }
    void add(const std::string& key, const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            add(key + "." + std::to_string(r), Eigen::VectorXd(m.row(r)));
        }
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

int cmd_simulate(const CommonFlags& flags) {
    const auto kv = load_config(flags);
    const auto config = pem::ExperimentConfig::from_config(kv);
    const int T = static_cast<int>(kv.get_int("simulate.T", config.T_grid.front()));
    const auto traj =
        pem::simulate(config.theta_star, config.noise, T, config.master_seed);
    if (config.output_path.empty()) {
        throw pem::ConfigError("simulate: an output path is required (out key or --out)");
    }
    pem::write_trajectory_csv(config.output_path, traj.outputs, traj.noise);
    std::cout << "wrote " << T << " rows to " << config.output_path << "\n";
    return kExitOk;
}

int cmd_fit(const CommonFlags& flags) {
    const auto kv = load_config(flags);
    const auto config = pem::ExperimentConfig::from_config(kv);
    const std::string data_path = kv.get_string("data");
    const auto data = pem::read_trajectory_csv(data_path);

    const auto order = config.theta_star.order();
    const pem::ParameterClass cls(order.dim(), config.B_theta);
    pem::FitConfig fit_config = config.fit;
    if (fit_config.include_truth_start) {
        fit_config.truth_start = config.theta_star.theta();
    }
    const auto result = pem::fit(order, data.outputs, cls, fit_config);

    Report report;
    report.add("theta_hat", result.theta_hat);
    report.add("loss", result.loss);
    report.add("starts_used", static_cast<double>(result.starts_used));
    report.add("iterations_total", static_cast<double>(result.iterations_total));
    report.add("converged", result.converged ? "true" : "false");
    emit_report(config.output_path, report.str());
    return kExitOk;
}

int cmd_rate(const CommonFlags& flags) {
    const auto kv = load_config(flags);
    auto config = pem::ExperimentConfig::from_config(kv);
    if (config.output_path.empty()) {
        throw pem::ConfigError("rate: an output path is required (out key or --out)");
    }
    const auto table = pem::run_rate_experiment(config);
    const auto slope = pem::fit_rate_slope(table);
    std::cout << "wrote " << table.size() << " rows to " << config.output_path << "\n"
              << "loglog_slope = " << pem::format_number(slope.slope) << "\n"
              << "loglog_r_squared = " << pem::format_number(slope.r_squared) << "\n";
    return kExitOk;
}

int cmd_diagnose(const CommonFlags& flags) {
    const auto kv = load_config(flags);
    const auto config = pem::ExperimentConfig::from_config(kv);
    const auto order = config.theta_star.order();
    const Eigen::VectorXd truth = config.theta_star.theta();
    const pem::ParameterClass cls(order.dim(), config.B_theta);
    const int T = static_cast<int>(kv.get_int("diagnose.T", config.T_grid.front()));
    const int n_mc = static_cast<int>(kv.get_int("diagnose.n_mc", config.n_mc));
    const double net_eps = kv.get_double("diagnose.net_epsilon", config.B_theta / 4.0);
    const auto seed = config.master_seed;

    const auto traj =
        pem::simulate(config.theta_star, config.noise, T, pem::derive_seed(seed, "sim", 0));

    pem::FitConfig fit_config = config.fit;
    if (fit_config.include_truth_start) {
        fit_config.truth_start = truth;
    }
    const auto fit_result = pem::fit(order, traj.outputs, cls, fit_config);
    const auto& theta_hat = fit_result.theta_hat;

    Report report;
    report.add("T", static_cast<double>(T));
    report.add("theta_star", truth);
    report.add("theta_hat", theta_hat);
    report.add("loss_hat", fit_result.loss);
    report.add("loss_star", pem::loss(order, truth, traj.outputs));
    report.add("param_error_sq", (theta_hat - truth).squaredNorm());

    const double offset =
        pem::martingale_offset(order, theta_hat, truth, traj.outputs, traj.noise);
    const double gap = pem::mean_squared_gap(order, theta_hat, truth, traj.outputs);
    report.add("martingale_offset", offset);
    report.add("linearized_offset",
               pem::linearized_offset(order, theta_hat, truth, traj.outputs, traj.noise));
    report.add("mean_squared_gap", gap);
    report.add("basic_inequality_holds", gap <= offset + 1e-12 ? "true" : "false");

    const auto smooth = pem::smoothness_constants_mc(
        order, cls, truth, config.noise, T, net_eps, n_mc,
        pem::derive_seed(seed, "smoothness", 0));
    report.add("L1_hat", smooth.L1);
    report.add("L2_hat", smooth.L2);
    report.add("L3_hat", smooth.L3);
    report.add("smoothness_samples", static_cast<double>(smooth.samples));

    const auto taylor = pem::taylor_decomposition_check(
        order, theta_hat, truth, traj.outputs, traj.noise, smooth.L2, smooth.L3);
    report.add("taylor_lhs", taylor.lhs);
    report.add("taylor_rhs", taylor.rhs);
    report.add("taylor_holds", taylor.holds ? "true" : "false");

    report.add("sigma_hat", pem::empirical_info(order, truth, traj.outputs));
    const auto info = pem::expected_info_mc(order, truth, config.noise, T, n_mc,
                                            pem::derive_seed(seed, "info", 0));
    report.add("sigma_bar", info.sigma_bar);
    report.add("lambda0_hat", info.lambda0);
    const double sigma_w = pem::sub_gaussian_sigma(config.noise);
    report.add("fisher_trace", pem::fisher_info(info.sigma_bar, sigma_w).trace());

    double a_hat = 0.0;
    try {
        a_hat = pem::quad_ident_constant_mc(order, cls, truth, config.noise, T, net_eps,
                                            n_mc, pem::derive_seed(seed, "ident", 0));
        report.add("a_hat", a_hat);
    } catch (const pem::EstimationError&) {
        report.add("a_hat", "degenerate");
    }

    pem::IsometryConstants iso;
    iso.lambda0 = info.lambda0 > 0 ? info.lambda0 : 1.0;
    iso.L1 = smooth.L1 > 0 ? smooth.L1 : 1.0;
    const auto rates = pem::isometry_event_rates(order, truth, config.noise, T, n_mc,
                                                 pem::derive_seed(seed, "isometry", 0), iso);
    report.add("isometry_upper_violation_rate", rates.upper_violation_rate);
    report.add("isometry_lower_violation_rate", rates.lower_violation_rate);
    report.add("isometry_predicted_upper", rates.predicted_upper);
    report.add("isometry_predicted_lower", rates.predicted_lower);

    if (a_hat > 0.0) {
        report.add("parameter_error_bound",
                   pem::parameter_error_bound(a_hat, offset, smooth.L1, config.B_theta,
                                              static_cast<double>(T)));
    }
    emit_report(config.output_path, report.str());
    return kExitOk;
}

int cmd_burnin(const CommonFlags& flags) {
    const auto kv = load_config(flags);
    pem::ConstantSet constants;
    constants.d_theta = static_cast<int>(kv.get_int("const.d_theta"));
    constants.sigma_w = kv.get_double("const.sigma_w");
    constants.B_theta = kv.get_double("const.B_theta");
    constants.L1 = kv.get_double("const.L1");
    constants.L2 = kv.get_double("const.L2", 0.0);
    constants.L3 = kv.get_double("const.L3", 0.0);
    constants.a = kv.get_double("const.a");
    constants.lambda0 = kv.get_double("const.lambda0");
    constants.b1 = kv.get_double("const.b1");
    constants.b2 = kv.get_double("const.b2", 0.0);
    constants.gamma = kv.get_double("const.gamma", 0.25);

    const auto report_values = pem::burn_in_times(constants);
    Report report;
    report.add("T1", report_values.T1);
    report.add("T21", report_values.T21);
    report.add("T22", report_values.T22);
    report.add("T23", report_values.T23);
    report.add("T2", report_values.T2);
    report.add("T3", report_values.T3);
    report.add("T0", report_values.T0);
    report.add("C1", report_values.C1);
    report.add("C2", report_values.C2);
    report.add("C3", report_values.C3);
    report.add("C4", report_values.C4);
    report.add("C5", report_values.C5);
    std::string floored;
    for (const auto& term : report_values.floored_terms) {
        floored += (floored.empty() ? "" : ", ") + term;
    }
    report.add("floored_terms", floored.empty() ? "none" : floored);
    emit_report(kv.get_string("out", ""), report.str());
    return kExitOk;
}

int cmd_depmatrix(const CommonFlags& flags) {
    const auto kv = load_config(flags);
    const int n = static_cast<int>(kv.get_int("markov.n"));
    const auto p_values = kv.get_double_list("markov.P");
    if (p_values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw pem::ConfigError("depmatrix: markov.P must list n*n row-major entries");
    }
    Eigen::MatrixXd P(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            P(r, c) = p_values[static_cast<std::size_t>(r) * n + c];
        }
    }
    const auto init_values = kv.get_double_list("markov.initial");
    if (init_values.size() != static_cast<std::size_t>(n)) {
        throw pem::ConfigError("depmatrix: markov.initial must list n entries");
    }
    const Eigen::VectorXd initial = Eigen::Map<const Eigen::VectorXd>(init_values.data(), n);
    const auto T_grid = kv.get_int_list("depmatrix.T_grid");

    std::vector<std::vector<double>> rows;
    for (const int T : T_grid) {
        const auto dep = pem::dependency_matrix_markov(P, initial, T);
        rows.push_back({static_cast<double>(T), dep.spectral_norm,
                        dep.spectral_norm * dep.spectral_norm});
    }
    const std::string out_path = kv.get_string("out", "");
    if (out_path.empty()) {
        throw pem::ConfigError("depmatrix: an output path is required (out key or --out)");
    }
    pem::write_csv(out_path, {"T", "gamma_norm", "gamma_norm_sq"}, rows);

    const auto growth = pem::fit_dependency_growth(P, initial, T_grid);
    std::cout << "b1 = " << pem::format_number(growth.b1) << "\n"
              << "b2 = " << pem::format_number(growth.b2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadratic prediction error method toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* simulate = app.add_subcommand("simulate", "simulate a trajectory to CSV");
    add_common_flags(simulate, flags);
    auto* fit_cmd = app.add_subcommand("fit", "fit a model to a trajectory CSV");
    add_common_flags(fit_cmd, flags);
    auto* rate = app.add_subcommand("rate", "run the rate-verification experiment");
    add_common_flags(rate, flags);
    auto* diagnose = app.add_subcommand("diagnose", "offsets, information matrices, rates");
    add_common_flags(diagnose, flags);
    auto* burnin = app.add_subcommand("burnin", "burn-in times for a constant set");
    add_common_flags(burnin, flags);
    auto* depmatrix = app.add_subcommand("depmatrix", "Markov dependency-matrix norms");
    add_common_flags(depmatrix, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(flags);
        }
        if (fit_cmd->parsed()) {
            return cmd_fit(flags);
        }
        if (rate->parsed()) {
            return cmd_rate(flags);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(flags);
        }
        if (burnin->parsed()) {
            return cmd_burnin(flags);
        }
        if (depmatrix->parsed()) {
            return cmd_depmatrix(flags);
        }
    } catch (const pem::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pem::EstimationError& e) {
        std::cerr << "estimation failure: " << e.what() << "\n";
        return kExitEstimation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}
