#include "pem/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pem/csv.hpp"
#include "pem/errors.hpp"
#include "pem/param_space.hpp"
#include "pem/seeding.hpp"

namespace pem {

void ExperimentConfig::validate() const {
    if (theta_star.dim() < 1) {
        throw ConfigError("experiment: model must have at least one free parameter");
    }
    if (!(B_theta > 0.0)) {
        throw ConfigError("experiment: class radius must be positive");
    }
    if (theta_star.theta().norm() > B_theta) {
        throw ConfigError("experiment: theta_star lies outside the parameter class");
    }
    const auto stability = check_stability(theta_star, kDefaultStabilityMargin);
    if (!stability.stable || !stability.invertible) {
        throw ConfigError("experiment: theta_star fails the stability/invertibility check");
    }
    if (T_grid.size() < 2 || !std::is_sorted(T_grid.begin(), T_grid.end()) ||
        T_grid.front() < theta_star.dim() + 1) {
        throw ConfigError("experiment: T_grid must be ascending with >= 2 usable sizes");
    }
    if (n_mc < 2 || n_eval < 1) {
        throw ConfigError("experiment: need n_mc >= 2 and n_eval >= 1");
    }
    if (!(gamma > 0.0 && gamma < 0.5)) {
        throw ConfigError("experiment: gamma must lie in (0, 1/2)");
    }
    if (threads < 1) {
        throw ConfigError("experiment: threads must be >= 1");
    }
}

ExperimentConfig ExperimentConfig::from_config(const KeyValueConfig& kv) {
    ExperimentConfig config;
    const int p = static_cast<int>(kv.get_int("model.p"));
    const int q = static_cast<int>(kv.get_int("model.q"));
    if (p < 0 || q < 0) {
        throw ConfigError("experiment: model orders must be non-negative");
    }
    Eigen::VectorXd ar = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd ma = Eigen::VectorXd::Zero(q);
    if (p > 0) {
        const auto values = kv.get_double_list("model.ar");
        if (values.size() != static_cast<std::size_t>(p)) {
            throw ConfigError("experiment: model.ar must list p coefficients");
        }
        ar = Eigen::Map<const Eigen::VectorXd>(values.data(), p);
    }
    if (q > 0) {
        const auto values = kv.get_double_list("model.ma");
        if (values.size() != static_cast<std::size_t>(q)) {
            throw ConfigError("experiment: model.ma must list q coefficients");
        }
        ma = Eigen::Map<const Eigen::VectorXd>(values.data(), q);
    }
    config.theta_star = ArmaParams(std::move(ar), std::move(ma));

    const std::string kind = kv.get_string("noise.kind");
    const double c = kv.get_double("noise.c");
    if (kind == "uniform") {
        config.noise = NoiseSpec::uniform(c);
    } else if (kind == "rademacher") {
        config.noise = NoiseSpec::rademacher(c);
    } else if (kind == "truncated_gaussian") {
        config.noise = NoiseSpec::truncated_gaussian(kv.get_double("noise.sigma"), c);
    } else {
        throw ConfigError("experiment: unknown noise.kind '" + kind + "'");
    }

    config.B_theta = kv.get_double("class.radius");
    config.T_grid = kv.get_int_list("grid.T");
    config.n_mc = static_cast<int>(kv.get_int("mc.n"));
    config.n_eval = static_cast<int>(kv.get_int("mc.n_eval", 1));
    config.master_seed = kv.get_u64("seed", 0);
    config.gamma = kv.get_double("gamma", 0.25);

    config.fit.n_starts = static_cast<int>(kv.get_int("fit.n_starts", 8));
    if (kv.has("fit.start_net_epsilon")) {
        config.fit.start_net_epsilon = kv.get_double("fit.start_net_epsilon");
    }
    config.fit.max_iterations = static_cast<int>(kv.get_int("fit.max_iterations", 200));
    config.fit.gradient_tolerance = kv.get_double("fit.gradient_tolerance", 1e-10);
    config.fit.levenberg_damping_init = kv.get_double("fit.levenberg_damping_init", 1e-3);
    config.fit.include_truth_start = kv.get_bool("fit.include_truth_start", false);

    config.bound_c = kv.get_double("bound.c", 653.0);
    config.bound_L1 = kv.get_double("bound.L1", 1.0);
    config.output_path = kv.get_string("out", "");
    config.threads = static_cast<int>(kv.get_int("threads", 1));
    config.force_truth = kv.get_bool("diagnostic.force_truth", false);
    return config;
}

const std::vector<std::string>& rate_table_header() {
    static const std::vector<std::string> header{
        "T", "mean_pred_error", "std_error", "mean_param_error_sq", "theorem1_bound",
        "n_mc"};
    return header;
}

std::vector<std::vector<double>> rate_table_rows(const RateTable& table) {
    std::vector<std::vector<double>> rows;
    rows.reserve(table.size());
    for (const auto& row : table) {
        rows.push_back({static_cast<double>(row.T), row.mean_pred_error, row.std_error,
                        row.mean_param_error_sq, row.theorem1_bound_value,
                        static_cast<double>(row.n_mc)});
    }
    return rows;
}

namespace {

struct CellResult {
    double pred_error = 0;
    double param_error_sq = 0;
    bool failed = false;
};

CellResult run_cell(const ExperimentConfig& config, int T, int replicate) {
    const ArmaOrder order = config.theta_star.order();
    const Eigen::VectorXd truth = config.theta_star.theta();
    const ParameterClass cls(order.dim(), config.B_theta);

    const auto train_seed =
        derive_seed(config.master_seed, "sim", static_cast<std::uint64_t>(T), replicate);
    const auto traj = simulate(config.theta_star, config.noise, T, train_seed);

    CellResult cell;
    Eigen::VectorXd theta_hat;
    if (config.force_truth) {
        theta_hat = truth;
    } else {
        FitConfig fit_config = config.fit;
        // Rate experiments never start from the truth; that start is a
        // test-only convenience and would bias the estimate.
        fit_config.include_truth_start = false;
        fit_config.truth_start.reset();
        try {
            theta_hat = fit(order, traj.outputs, cls, fit_config).theta_hat;
        } catch (const EstimationError&) {
            cell.failed = true;
            return cell;
        }
    }
    cell.param_error_sq = (theta_hat - truth).squaredNorm();

    const auto hat_params = ArmaParams::from_theta(theta_hat, order);
    double sum = 0.0;
    for (int e = 0; e < config.n_eval; ++e) {
        const auto eval_seed =
            derive_seed(config.master_seed, "eval", static_cast<std::uint64_t>(T),
                        static_cast<std::uint64_t>(replicate) *
                                static_cast<std::uint64_t>(config.n_eval) +
                            e);
        const auto fresh = simulate(config.theta_star, config.noise, T, eval_seed);
        sum += (predict_sequence(hat_params, fresh.outputs) -
                predict_sequence(config.theta_star, fresh.outputs))
                   .squaredNorm() /
               static_cast<double>(T);
    }
    cell.pred_error = sum / config.n_eval;
    return cell;
}

}  // namespace

RateTable run_rate_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto n_grid = config.T_grid.size();
    const auto cells_total = n_grid * static_cast<std::size_t>(config.n_mc);
    std::vector<CellResult> results(cells_total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr worker_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t index = next.fetch_add(1);
            if (index >= cells_total) {
                return;
            }
            const auto grid_index = index / static_cast<std::size_t>(config.n_mc);
            const auto replicate = static_cast<int>(index % config.n_mc);
            try {
                results[index] = run_cell(config, config.T_grid[grid_index], replicate);
            } catch (...) {
                const std::scoped_lock lock(error_mutex);
                if (!worker_error) {
                    worker_error = std::current_exception();
                }
                return;
            }
        }
    };
    if (config.threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < config.threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }
    if (worker_error) {
        std::rethrow_exception(worker_error);
    }

    const double sigma_w = sub_gaussian_sigma(config.noise);
    ConstantSet constants;
    constants.d_theta = config.theta_star.dim();
    constants.sigma_w = sigma_w;
    constants.B_theta = config.B_theta;
    constants.L1 = config.bound_L1;
    constants.gamma = config.gamma;

    RateTable table;
    for (std::size_t g = 0; g < n_grid; ++g) {
        const int T = config.T_grid[g];
        int failures = 0;
        double sum = 0.0;
        double sum_sq = 0.0;
        double param_sum = 0.0;
        for (int r = 0; r < config.n_mc; ++r) {
            const auto& cell = results[g * static_cast<std::size_t>(config.n_mc) +
                                       static_cast<std::size_t>(r)];
            if (cell.failed) {
                ++failures;
                continue;
            }
            sum += cell.pred_error;
            sum_sq += cell.pred_error * cell.pred_error;
            param_sum += cell.param_error_sq;
        }
        if (failures * 20 > config.n_mc) {  // more than 5%
            throw EstimationError("rate experiment: " + std::to_string(failures) + "/" +
                                  std::to_string(config.n_mc) +
                                  " replicates failed at T=" + std::to_string(T));
        }
        const int used = config.n_mc - failures;
        RateRow row;
        row.T = T;
        row.n_mc = used;
        row.mean_pred_error = sum / used;
        const double var =
            used > 1
                ? std::max(0.0, (sum_sq - used * row.mean_pred_error * row.mean_pred_error) /
                                    (used - 1))
                : 0.0;
        row.std_error = std::sqrt(var / used);
        row.mean_param_error_sq = param_sum / used;
        row.theorem1_bound_value =
            theorem1_bound(constants, static_cast<double>(T), config.bound_c);
        table.push_back(row);
    }

    if (!config.output_path.empty()) {
        write_csv(config.output_path, rate_table_header(), rate_table_rows(table));
    }
    return table;
}

SlopeFit fit_rate_slope(const RateTable& table) {
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& row : table) {
        if (row.mean_pred_error > 0.0) {
            x.push_back(std::log(static_cast<double>(row.T)));
            y.push_back(std::log(row.mean_pred_error));
        }
    }
    if (x.size() < 3) {
        throw std::invalid_argument("fit_rate_slope: need >= 3 rows with positive means");
    }
    const auto n = static_cast<double>(x.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mean_x) * (x[i] - mean_x);
        sxy += (x[i] - mean_x) * (y[i] - mean_y);
        syy += (y[i] - mean_y) * (y[i] - mean_y);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

}  // namespace pem
