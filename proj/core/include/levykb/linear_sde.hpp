#ifndef LEVYKB_LINEAR_SDE_HPP
#define LEVYKB_LINEAR_SDE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "levykb/levy_core.hpp"
#include "levykb/time_matrix.hpp"

namespace levykb::sde {

// dY = A(t) Y dt + B(t) dL1,   dZ = C(t) Y dt + D(t) dL2.
struct LinearModel {
    TimeMatrixFunction A; // d1 x d1
    TimeMatrixFunction B; // d1 x l
    TimeMatrixFunction C; // d2 x d1
    TimeMatrixFunction D; // d2 x p
    levy::LevyModel system_noise;      // square-integrable, covariance Lambda1
    levy::LevyModel observation_noise; // centred integrable, variance may be infinite
    Eigen::VectorXd mu0;               // E(Y0)
    Eigen::MatrixXd initial_cov;       // Cov(Y0)

    int d1() const { return static_cast<int>(A.rows()); }
    int d2() const { return static_cast<int>(C.rows()); }

    // Shape checks, d2 <= d1, and D(t)D(t)^T nondegenerate over the grid.
    void validate(const TimeGrid& grid) const;
};

// G(t) = (D(t) D(t)^T)^{-1/2} by eigendecomposition; eigenvalues below the
// 1e-12 floor raise degeneracy_error.
Eigen::MatrixXd gain_normalizer(const LinearModel& model, double t);

// Euler-Maruyama with left-point coefficients; Y0 ~ N(mu0, initial_cov) drawn
// from the seed stream.
levy::PathGrid simulate_system(const LinearModel& model, const TimeGrid& grid,
                               std::uint64_t seed);

// Observation path sharing a given system path. Infinite cutoff uses exact
// noise sampling; a finite cutoff uses the truncated (layered) model.
levy::PathGrid simulate_observation(const LinearModel& model, const levy::PathGrid& system,
                                    double cutoff, std::uint64_t seed);

// Coupled family: one observation-noise realization assembled at several
// cutoffs, so Z_{n1} and Z_{n2} differ exactly by the jumps in (n1, n2].
// Cutoffs may include infinity.
std::vector<levy::PathGrid> simulate_observation_ladder(const LinearModel& model,
                                                        const levy::PathGrid& system,
                                                        const std::vector<double>& cutoffs,
                                                        std::uint64_t seed);

// Exact first/second moments of the Euler scheme (deterministic recursions),
// used by the weak-order checks.
Eigen::VectorXd euler_mean(const LinearModel& model, const TimeGrid& grid);
Eigen::MatrixXd euler_covariance(const LinearModel& model, const TimeGrid& grid);

} // namespace levykb::sde

#endif
