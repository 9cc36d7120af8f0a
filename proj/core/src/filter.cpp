#include "levykb/filter.hpp"

#include <cmath>
#include <numeric>

#include "levykb/parallel.hpp"

namespace levykb::filter {

using levy::PathGrid;

Eigen::MatrixXd gain_at(const sde::LinearModel& model, const Eigen::MatrixXd& S,
                        const Eigen::MatrixXd& xi_t, double t) {
    const Eigen::MatrixXd g = sde::gain_normalizer(model, t);
    return S * model.C(t).transpose() * g.transpose() * xi_t * g;
}

namespace {

// per-step coefficients; gains depend on the model and Riccati solution only,
// so replicate loops reuse them
struct FilterCoefficients {
    std::vector<Eigen::MatrixXd> a; // A(t_k)
    std::vector<Eigen::MatrixXd> c; // C(t_k)
    std::vector<Eigen::MatrixXd> gains;
};

FilterCoefficients build_coefficients(const sde::LinearModel& model,
                                      const RiccatiSolution& riccati, const GainWeight& xi,
                                      Variant variant) {
    const TimeGrid& grid = riccati.grid;
    FilterCoefficients fc;
    fc.a.reserve(grid.steps);
    fc.c.reserve(grid.steps);
    fc.gains.reserve(grid.steps);
    const Eigen::MatrixXd zero_gain = Eigen::MatrixXd::Zero(model.d1(), model.d2());
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t = grid.time(k);
        fc.a.push_back(model.A(t));
        fc.c.push_back(model.C(t));
        if (variant == Variant::LinearDegenerate)
            fc.gains.push_back(zero_gain);
        else
            fc.gains.push_back(gain_at(model, riccati.S[k], xi(t), t));
    }
    return fc;
}

void apply_filter(const FilterCoefficients& fc, const TimeGrid& grid,
                  const Eigen::VectorXd& mu0, const Eigen::MatrixXd& obs_values,
                  Eigen::MatrixXd& estimates, Eigen::MatrixXd* innov) {
    const double dt = grid.dt;
    Eigen::VectorXd y = mu0;
    estimates.row(0) = y.transpose();
    Eigen::VectorXd n = Eigen::VectorXd::Zero(obs_values.cols());
    if (innov) innov->row(0) = n.transpose();
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd dz =
            (obs_values.row(row + 1) - obs_values.row(row)).transpose();
        const Eigen::VectorXd predicted = fc.c[k] * y * dt;
        y += fc.a[k] * y * dt + fc.gains[k] * (dz - predicted);
        estimates.row(row + 1) = y.transpose();
        if (innov) {
            n += dz - predicted;
            innov->row(row + 1) = n.transpose();
        }
    }
}

} // namespace

FilterRun run_filter(const sde::LinearModel& model, const PathGrid& observations,
                     const RiccatiSolution& riccati, const GainWeight& xi, Variant variant) {
    if (riccati.variant != variant)
        throw model_error("run_filter: Riccati solution variant does not match filter variant");
    if (!observations.grid.same_as(riccati.grid))
        throw alignment_error("run_filter: observation grid does not match the Riccati grid");
    if (observations.dimension() != model.d2())
        throw model_error("run_filter: observation dimension must equal d2");

    const TimeGrid& grid = riccati.grid;
    FilterRun run;
    run.variant = variant;
    run.cutoff = riccati.cutoff;
    run.grid = grid;
    FilterCoefficients fc = build_coefficients(model, riccati, xi, variant);
    run.gains = fc.gains;
    run.estimates.resize(grid.points(), model.d1());
    run.innovations.resize(grid.points(), model.d2());
    apply_filter(fc, grid, model.mu0, observations.values, run.estimates, &run.innovations);
    return run;
}

Eigen::MatrixXd innovations(const FilterRun& run, const PathGrid& observations,
                            const sde::LinearModel& model) {
    if (!observations.grid.same_as(run.grid))
        throw alignment_error("innovations: observation grid does not match the run grid");
    const TimeGrid& grid = run.grid;
    Eigen::MatrixXd n(grid.points(), model.d2());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(model.d2());
    n.row(0) = acc.transpose();
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        const Eigen::VectorXd dz =
            (observations.values.row(row + 1) - observations.values.row(row)).transpose();
        acc += dz - model.C(grid.time(k)) * run.estimates.row(row).transpose() * grid.dt;
        n.row(row + 1) = acc.transpose();
    }
    return n;
}

Eigen::MatrixXd normalized_innovation_increments(const FilterRun& run,
                                                 const PathGrid& observations,
                                                 const sde::LinearModel& model) {
    const Eigen::MatrixXd n = innovations(run, observations, model);
    Eigen::MatrixXd dr(static_cast<Eigen::Index>(run.grid.steps), model.d2());
    for (std::size_t k = 0; k < run.grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        dr.row(row) = (sde::gain_normalizer(model, run.grid.time(k)) *
                       (n.row(row + 1) - n.row(row)).transpose())
                          .transpose();
    }
    return dr;
}

std::vector<FilterGapRow> filter_convergence_study(const sde::LinearModel& model,
                                                   const std::vector<double>& cutoffs,
                                                   const TimeGrid& grid,
                                                   std::size_t replicates,
                                                   std::uint64_t root_seed, unsigned threads) {
    if (cutoffs.empty())
        throw std::invalid_argument("filter_convergence_study: empty cutoff ladder");

    riccati::NoiseNormalization limit = riccati::phi_limit(model, cutoffs, grid);
    RiccatiSolution s_inf =
        riccati::solve_riccati(model, limit.phi, Variant::Limiting, grid);
    FilterCoefficients fc_inf = build_coefficients(model, s_inf, limit.phi, Variant::Limiting);

    std::vector<FilterCoefficients> fc_n;
    fc_n.reserve(cutoffs.size());
    for (double n : cutoffs) {
        riccati::NoiseNormalization norm = riccati::standard_normalization(model, n, grid);
        RiccatiSolution s_n =
            riccati::solve_riccati(model, norm.precision, Variant::Standard, grid);
        fc_n.push_back(build_coefficients(model, s_n, norm.precision, Variant::Standard));
    }

    std::vector<double> ladder = cutoffs;
    ladder.push_back(levy::kInfiniteCutoff);

    std::vector<std::vector<double>> gaps(cutoffs.size(), std::vector<double>(replicates));
    parallel_for(
        replicates,
        [&](std::size_t r) {
            PathGrid system =
                sde::simulate_system(model, grid, derive_seed(root_seed, r, kStreamSystemInit));
            std::vector<PathGrid> obs = sde::simulate_observation_ladder(
                model, system, ladder, derive_seed(root_seed, r, kStreamObservationNoise));
            Eigen::MatrixXd estimates(grid.points(), model.d1());
            apply_filter(fc_inf, grid, model.mu0, obs.back().values, estimates, nullptr);
            const Eigen::VectorXd yhat_inf =
                estimates.row(static_cast<Eigen::Index>(grid.steps));
            for (std::size_t i = 0; i < cutoffs.size(); ++i) {
                apply_filter(fc_n[i], grid, model.mu0, obs[i].values, estimates, nullptr);
                gaps[i][r] = (estimates.row(static_cast<Eigen::Index>(grid.steps)).transpose() -
                              yhat_inf)
                                 .norm();
            }
        },
        threads);

    std::vector<FilterGapRow> rows;
    rows.reserve(cutoffs.size());
    for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        const double mean = std::accumulate(gaps[i].begin(), gaps[i].end(), 0.0) /
                            static_cast<double>(replicates);
        double var = 0.0;
        for (double g : gaps[i]) var += (g - mean) * (g - mean);
        var /= static_cast<double>(replicates > 1 ? replicates - 1 : 1);
        rows.push_back({cutoffs[i], mean, std::sqrt(var / static_cast<double>(replicates))});
    }
    return rows;
}

} // namespace levykb::filter
