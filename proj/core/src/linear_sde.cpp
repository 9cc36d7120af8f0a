#include "levykb/linear_sde.hpp"

#include <cmath>
#include <sstream>

namespace levykb::sde {

using levy::PathGrid;

void LinearModel::validate(const TimeGrid& grid) const {
    if (A.rows() != A.cols()) throw model_error("LinearModel: A must be square");
    const int n1 = d1();
    const int n2 = d2();
    if (B.rows() != n1) throw model_error("LinearModel: B row count must be d1");
    if (C.cols() != n1) throw model_error("LinearModel: C column count must be d1");
    if (n2 > n1) throw model_error("LinearModel: requires d2 <= d1");
    if (D.rows() != n2) throw model_error("LinearModel: D row count must be d2");
    if (mu0.size() != n1) throw model_error("LinearModel: mu0 must have length d1");
    if (initial_cov.rows() != n1 || initial_cov.cols() != n1)
        throw model_error("LinearModel: initial_cov must be d1 x d1");
    if (static_cast<int>(B.cols()) != system_noise.dimension)
        throw model_error("LinearModel: B column count must match system noise dimension");
    if (static_cast<int>(D.cols()) != observation_noise.dimension)
        throw model_error("LinearModel: D column count must match observation noise dimension");
    if (!system_noise.square_integrable())
        throw model_error("LinearModel: system noise must be square-integrable");
    // D D^T bounded away from zero over the grid
    for (std::size_t k = 0; k <= grid.steps; ++k) gain_normalizer(*this, grid.time(k));
}

Eigen::MatrixXd gain_normalizer(const LinearModel& model, double t) {
    const Eigen::MatrixXd d = model.D(t);
    const Eigen::MatrixXd ddt = d * d.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ddt);
    if (es.eigenvalues().minCoeff() < 1e-12) {
        std::ostringstream msg;
        msg << "gain_normalizer: D(t)D(t)^T eigenvalue below 1e-12 at t = " << t;
        throw degeneracy_error(msg.str());
    }
    Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

PathGrid simulate_system(const LinearModel& model, const TimeGrid& grid, std::uint64_t seed) {
    const int n1 = model.d1();
    Rng rng(seed);
    Eigen::VectorXd y0 = model.mu0;
    if (model.initial_cov.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::VectorXd z(n1);
        for (int i = 0; i < n1; ++i) z(i) = rng.normal();
        y0 += symmetric_sqrt(model.initial_cov) * z;
    }
    PathGrid noise =
        levy::sample_increments(model.system_noise, grid, derive_seed(seed, 0, kStreamSystemNoise));

    Eigen::MatrixXd inc(static_cast<Eigen::Index>(grid.steps), n1);
    Eigen::VectorXd y = y0;
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t = grid.time(k);
        const Eigen::VectorXd dy =
            model.A(t) * y * grid.dt +
            model.B(t) * noise.increments.row(static_cast<Eigen::Index>(k)).transpose();
        inc.row(static_cast<Eigen::Index>(k)) = dy.transpose();
        y += dy;
    }
    return PathGrid::from_increments(grid, seed, std::move(inc), y0);
}

namespace {

PathGrid observation_from_noise(const LinearModel& model, const PathGrid& system,
                                const PathGrid& noise, std::uint64_t seed) {
    const TimeGrid& grid = system.grid;
    Eigen::MatrixXd inc(static_cast<Eigen::Index>(grid.steps), model.d2());
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t = grid.time(k);
        const auto row = static_cast<Eigen::Index>(k);
        inc.row(row) =
            (model.C(t) * system.values.row(row).transpose() * grid.dt +
             model.D(t) * noise.increments.row(row).transpose())
                .transpose();
    }
    return PathGrid::from_increments(grid, seed, std::move(inc),
                                     Eigen::VectorXd::Zero(model.d2()));
}

} // namespace

PathGrid simulate_observation(const LinearModel& model, const PathGrid& system, double cutoff,
                              std::uint64_t seed) {
    if (system.dimension() != model.d1())
        throw alignment_error("simulate_observation: system path dimension mismatch");
    const TimeGrid& grid = system.grid;
    PathGrid noise =
        std::isinf(cutoff)
            ? levy::sample_increments(model.observation_noise, grid, seed)
            : levy::sample_increments(levy::TruncatedLevyModel(model.observation_noise, cutoff),
                                      grid, seed);
    return observation_from_noise(model, system, noise, seed);
}

std::vector<PathGrid> simulate_observation_ladder(const LinearModel& model,
                                                  const PathGrid& system,
                                                  const std::vector<double>& cutoffs,
                                                  std::uint64_t seed) {
    if (system.dimension() != model.d1())
        throw alignment_error("simulate_observation_ladder: system path dimension mismatch");
    levy::CoupledIncrements noise =
        levy::sample_coupled(model.observation_noise, system.grid, seed);
    std::vector<PathGrid> out;
    out.reserve(cutoffs.size());
    for (double n : cutoffs)
        out.push_back(observation_from_noise(model, system, noise.assemble(n), seed));
    return out;
}

Eigen::VectorXd euler_mean(const LinearModel& model, const TimeGrid& grid) {
    Eigen::VectorXd m = model.mu0;
    for (std::size_t k = 0; k < grid.steps; ++k)
        m += model.A(grid.time(k)) * m * grid.dt;
    return m;
}

Eigen::MatrixXd euler_covariance(const LinearModel& model, const TimeGrid& grid) {
    const Eigen::MatrixXd lambda1 = levy::covariance_matrix(model.system_noise);
    Eigen::MatrixXd p = model.initial_cov;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(model.d1(), model.d1());
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const double t = grid.time(k);
        const Eigen::MatrixXd f = id + model.A(t) * grid.dt;
        const Eigen::MatrixXd b = model.B(t);
        p = f * p * f.transpose() + b * lambda1 * b.transpose() * grid.dt;
    }
    return p;
}

} // namespace levykb::sde
