#include "levykb/bench.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "levykb/parallel.hpp"
#include "levykb/report.hpp"

namespace levykb::bench {

using levy::PathGrid;

namespace {

std::map<std::string, CompetitorFn>& registry() {
    static std::map<std::string, CompetitorFn> r;
    return r;
}
std::mutex registry_mutex;

bool is_builtin(const std::string& name) {
    return name == "degenerate" || name == "limiting" || name == "exact_obs" ||
           name.rfind("standard:", 0) == 0;
}

double parse_standard_cutoff(const std::string& name) {
    const std::string num = name.substr(std::string("standard:").size());
    try {
        const double n = std::stod(num);
        if (!(n > 0.0)) throw std::invalid_argument("");
        return n;
    } catch (...) {
        throw model_error("run_benchmark: bad standard-variant cutoff in '" + name + "'");
    }
}

sde::LinearModel make_ou_model(double alpha, double dispersion) {
    sde::LinearModel m;
    auto scalar = [](double v) {
        return sde::TimeMatrixFunction::constant(Eigen::MatrixXd::Constant(1, 1, v));
    };
    m.A = scalar(-1.0);
    m.B = scalar(1.0);
    m.C = scalar(1.0);
    m.D = scalar(1.0);
    m.system_noise = levy::LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
    m.observation_noise = levy::LevyModel::pure_stable(alpha, dispersion);
    m.mu0 = Eigen::VectorXd::Zero(1);
    m.initial_cov = Eigen::MatrixXd::Zero(1, 1);
    return m;
}

struct VariantPlan {
    std::string name;
    enum class Kind { Degenerate, Limiting, Standard, ExactObs, Competitor } kind;
    double cutoff = 0.0;
    CompetitorFn competitor;
    // precomputed per-step gains and coefficients (degenerate/limiting/standard)
    std::vector<Eigen::MatrixXd> gains;
    bool needs_exact_obs = false;
    bool needs_truncated_obs = false;
};

// shared scalar recursion for the built-in variants
Eigen::VectorXd run_scalar_filter(const sde::LinearModel& model, const TimeGrid& grid,
                                  const std::vector<Eigen::MatrixXd>& gains,
                                  const Eigen::MatrixXd& obs_values) {
    Eigen::VectorXd est(grid.points());
    double y = model.mu0(0);
    est(0) = y;
    const double dt = grid.dt;
    const double a = model.A(0.0)(0, 0);
    const double c = model.C(0.0)(0, 0);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const double dz = obs_values(row + 1, 0) - obs_values(row, 0);
        y += a * y * dt + gains[k](0, 0) * (dz - c * y * dt);
        est(row + 1) = y;
    }
    return est;
}

double path_mse(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
    return (truth - estimate).squaredNorm() / static_cast<double>(truth.size());
}

VariantStats summarize(const std::string& name, std::vector<double> values) {
    const auto m = static_cast<double>(values.size());
    VariantStats s;
    s.name = name;
    s.mean_mse = std::accumulate(values.begin(), values.end(), 0.0) / m;
    double var = 0.0;
    for (double v : values) var += (v - s.mean_mse) * (v - s.mean_mse);
    var /= (m > 1.0 ? m - 1.0 : 1.0);
    const double sd = std::sqrt(var);
    s.se_mean = sd / std::sqrt(m);
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    s.median_mse = (n % 2 == 1) ? values[n / 2]
                                : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    s.se_median = 1.2533 * sd / std::sqrt(m);
    s.root_median = std::sqrt(std::max(0.0, s.median_mse));
    s.se_root_median = s.root_median > 0.0 ? s.se_median / (2.0 * s.root_median) : s.se_median;
    s.root_mean = std::sqrt(std::max(0.0, s.mean_mse));
    return s;
}

} // namespace

void ExperimentConfig::validate() const {
    for (double a : alphas)
        if (!(a > 1.0 && a < 2.0))
            throw regime_error("ExperimentConfig: alpha must lie strictly inside (1,2)");
    if (replicates < 100)
        throw std::invalid_argument("ExperimentConfig: needs at least 100 replicates");
    if (!(dt > 0.0) || !(horizon > 0.0))
        throw grid_error("ExperimentConfig: dt and horizon must be positive");
    if (!(dispersion > 0.0))
        throw regime_error("ExperimentConfig: dispersion must be positive");
}

void register_competitor(const std::string& name, CompetitorFn fn) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    if (is_builtin(name))
        throw registration_error("register_competitor: '" + name + "' is a built-in variant");
    if (registry().count(name))
        throw registration_error("register_competitor: '" + name + "' already registered");
    registry()[name] = std::move(fn);
}

bool competitor_registered(const std::string& name) {
    std::lock_guard<std::mutex> lock(registry_mutex);
    return registry().count(name) > 0;
}

void clear_competitors() {
    std::lock_guard<std::mutex> lock(registry_mutex);
    registry().clear();
}

const VariantStats& BenchReport::stats(double alpha, const std::string& variant) const {
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (std::abs(alphas[i] - alpha) > 1e-12) continue;
        for (const auto& s : rows[i])
            if (s.name == variant) return s;
    }
    throw model_error("BenchReport: no such alpha/variant cell");
}

BenchReport run_benchmark(const ExperimentConfig& config) {
    config.validate();
    const TimeGrid grid = TimeGrid::from_horizon(0.0, config.horizon, config.dt);

    BenchReport report;
    report.config = config;
    report.alphas = config.alphas;

    for (double alpha : config.alphas) {
        const sde::LinearModel model = make_ou_model(alpha, config.dispersion);

        // plan the variants: gains are data-independent, so build them once
        std::vector<VariantPlan> plans;
        bool any_exact_obs_needed = false;
        std::vector<double> truncation_cutoffs;
        for (const auto& name : config.variants) {
            VariantPlan p;
            p.name = name;
            const Eigen::MatrixXd zero_gain = Eigen::MatrixXd::Zero(1, 1);
            if (name == "degenerate") {
                p.kind = VariantPlan::Kind::Degenerate;
                p.gains.assign(grid.steps, zero_gain);
            } else if (name == "limiting") {
                p.kind = VariantPlan::Kind::Limiting;
                riccati::NoiseNormalization norm =
                    riccati::phi_limit(model, {1e2, 1e4, 1e6}, grid);
                riccati::RiccatiSolution s =
                    riccati::solve_riccati(model, norm.phi, riccati::Variant::Limiting, grid);
                p.gains.reserve(grid.steps);
                for (std::size_t k = 0; k < grid.steps; ++k)
                    p.gains.push_back(filter::gain_at(model, s.S[k], norm.phi(grid.time(k)),
                                                      grid.time(k)));
                p.needs_exact_obs = true;
                any_exact_obs_needed = true;
            } else if (name.rfind("standard:", 0) == 0) {
                p.kind = VariantPlan::Kind::Standard;
                p.cutoff = parse_standard_cutoff(name);
                riccati::NoiseNormalization norm =
                    riccati::standard_normalization(model, p.cutoff, grid);
                riccati::RiccatiSolution s = riccati::solve_riccati(
                    model, norm.precision, riccati::Variant::Standard, grid);
                p.gains.reserve(grid.steps);
                for (std::size_t k = 0; k < grid.steps; ++k)
                    p.gains.push_back(filter::gain_at(
                        model, s.S[k], norm.precision(grid.time(k)), grid.time(k)));
                p.needs_truncated_obs = true;
                truncation_cutoffs.push_back(p.cutoff);
            } else if (name == "exact_obs") {
                p.kind = VariantPlan::Kind::ExactObs;
            } else {
                std::lock_guard<std::mutex> lock(registry_mutex);
                auto it = registry().find(name);
                if (it == registry().end())
                    throw model_error("run_benchmark: unknown variant '" + name + "'");
                p.kind = VariantPlan::Kind::Competitor;
                p.competitor = it->second;
                p.needs_exact_obs = true;
                any_exact_obs_needed = true;
            }
            plans.push_back(std::move(p));
        }

        std::vector<std::vector<double>> mses(plans.size(),
                                              std::vector<double>(config.replicates));
        parallel_for(
            config.replicates,
            [&](std::size_t r) {
                const PathGrid system = sde::simulate_system(
                    model, grid, derive_seed(config.root_seed, r, kStreamSystemInit));
                const Eigen::VectorXd truth = system.values.col(0);
                const std::uint64_t obs_seed =
                    derive_seed(config.root_seed, r, kStreamObservationNoise);

                PathGrid exact_obs;
                if (any_exact_obs_needed)
                    exact_obs = sde::simulate_observation(model, system,
                                                          levy::kInfiniteCutoff, obs_seed);
                std::vector<PathGrid> truncated_obs;
                if (!truncation_cutoffs.empty())
                    truncated_obs = sde::simulate_observation_ladder(
                        model, system, truncation_cutoffs, obs_seed);

                std::size_t trunc_index = 0;
                for (std::size_t v = 0; v < plans.size(); ++v) {
                    const auto& p = plans[v];
                    Eigen::VectorXd est;
                    switch (p.kind) {
                        case VariantPlan::Kind::Degenerate:
                            est = run_scalar_filter(model, grid, p.gains,
                                                    Eigen::MatrixXd::Zero(grid.points(), 1));
                            break;
                        case VariantPlan::Kind::Limiting:
                            est = run_scalar_filter(model, grid, p.gains, exact_obs.values);
                            break;
                        case VariantPlan::Kind::Standard:
                            est = run_scalar_filter(model, grid, p.gains,
                                                    truncated_obs[trunc_index++].values);
                            break;
                        case VariantPlan::Kind::ExactObs: {
                            // R -> 0 limit of the Gaussian Kalman update on
                            // noiseless observations: recover Y_k exactly from
                            // dZ/(C dt), then predict one step.
                            est.resize(grid.points());
                            est(0) = model.mu0(0);
                            const double a = model.A(0.0)(0, 0);
                            const double c = model.C(0.0)(0, 0);
                            for (std::size_t k = 0; k < grid.steps; ++k) {
                                const double dz0 =
                                    c * truth(static_cast<Eigen::Index>(k)) * grid.dt;
                                est(static_cast<Eigen::Index>(k) + 1) =
                                    (1.0 + a * grid.dt) * (dz0 / (c * grid.dt));
                            }
                            break;
                        }
                        case VariantPlan::Kind::Competitor:
                            est = p.competitor(exact_obs, config);
                            if (est.size() != static_cast<Eigen::Index>(grid.points()))
                                throw model_error(
                                    "run_benchmark: competitor returned a path of wrong length");
                            break;
                    }
                    mses[v][r] = path_mse(truth, est);
                }
            },
            config.threads);

        std::vector<VariantStats> row;
        row.reserve(plans.size());
        for (std::size_t v = 0; v < plans.size(); ++v)
            row.push_back(summarize(plans[v].name, std::move(mses[v])));
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string emit_table(const BenchReport& report, TableFormat format) {
    const bool median = report.config.statistic == ExperimentConfig::Statistic::MedianPathMse;
    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "alpha";
        for (const auto& v : report.config.variants)
            out << "," << v << "_median_mse," << v << "_median_se," << v << "_mean_mse," << v
                << "_mean_se," << v << "_rmse";
        out << "\n";
        for (std::size_t i = 0; i < report.alphas.size(); ++i) {
            out << report::format_full(report.alphas[i]);
            for (const auto& s : report.rows[i])
                out << "," << report::format_full(s.median_mse) << ","
                    << report::format_full(s.se_median) << ","
                    << report::format_full(s.mean_mse) << ","
                    << report::format_full(s.se_mean) << ","
                    << report::format_full(s.root_median);
            out << "\n";
        }
        return out.str();
    }
    // markdown: the configured statistic, 4 decimals, standard error in parens
    out << "| alpha |";
    for (const auto& v : report.config.variants) out << " " << v << " |";
    out << "\n| --- |";
    for (std::size_t i = 0; i < report.config.variants.size(); ++i) out << " --- |";
    out << "\n";
    if (report.config.variants.empty()) return out.str();
    for (std::size_t i = 0; i < report.alphas.size(); ++i) {
        out << "| " << report::format_fixed(report.alphas[i], 1) << " |";
        for (const auto& s : report.rows[i]) {
            const double value = median ? s.root_median : s.mean_mse;
            const double se = median ? s.se_root_median : s.se_mean;
            out << " " << report::format_fixed(value, 4) << " ("
                << report::format_fixed(se, 4) << ") |";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace levykb::bench
