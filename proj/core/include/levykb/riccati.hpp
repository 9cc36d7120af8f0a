#ifndef LEVYKB_RICCATI_HPP
#define LEVYKB_RICCATI_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "levykb/linear_sde.hpp"

namespace levykb::riccati {

enum class Variant { Standard, Limiting, LinearDegenerate };

std::string variant_name(Variant v);

// d2 x d2 gain weight rule t -> Xi(t): the inverse covariance *rate* of the
// normalized innovations. Standard: (G D Lambda2 D^T G^T)(t)^{-1}; limiting:
// Phi(t); degenerate: 0.
using GainWeight = std::function<Eigen::MatrixXd(double)>;

// Sigma2(t) = int_0^t G D Lambda2 D^T G^T dr and its limiting counterpart.
struct NoiseNormalization {
    std::function<Eigen::MatrixXd(double)> sigma2; // integrated covariance of R
    GainWeight precision;                          // Xi(t), inverse of d(sigma2)/dt
    GainWeight phi;                                // limiting weight, lim_n Xi_n(t)
    // ladder diagnostics for the phi construction
    std::vector<double> cutoffs;
    std::vector<double> sup_gaps;   // sup_t ||G^T (Xi_n - Phi) G|| along the ladder
    bool converged = true;
};

// Integrated covariance of R on [0, t]: composite midpoint rule on the grid;
// exact t * G D Lambda2 D^T G^T for constant coefficients.
Eigen::MatrixXd sigma2(const sde::LinearModel& model, const Eigen::MatrixXd& noise_cov,
                       double t, const TimeGrid& grid);

// Gain weight of the standard filter at truncation `cutoff` (infinite cutoff
// requires square-integrable observation noise).
NoiseNormalization standard_normalization(const sde::LinearModel& model, double cutoff,
                                          const TimeGrid& grid);

// Limiting weight Phi = lim_n Xi_n along the cutoff ladder. Fully infinite
// variance gives Phi = 0 exactly; when D factors as M*f(t) the closed form
// (G^T)^{-1} (M^T)^{-1} Upsilon_inf M^{-1} G^{-1} is used; otherwise the last
// ladder iterate per grid point. Non-convergent ladders (last two sup-gaps
// differing by more than 1e-4) raise convergence_error.
NoiseNormalization phi_limit(const sde::LinearModel& model, const std::vector<double>& cutoffs,
                             const TimeGrid& grid);

struct RiccatiSolution {
    TimeGrid grid;
    Variant variant = Variant::Standard;
    std::vector<Eigen::MatrixXd> S; // d1 x d1 per grid point, symmetrized
    double max_asymmetry = 0.0;     // worst relative asymmetry before symmetrization
    std::string method = "rk4";
    double cutoff = 0.0; // standard variant: the truncation it was built at

    const Eigen::MatrixXd& at(std::size_t k) const { return S[k]; }
};

// Classical RK4 on dS/dt = A S + S A^T + B Lambda1 B^T - S C^T G^T Xi G C S,
// symmetrizing after each step. Standard variant additionally enforces the
// mean-square-error bound ||S(t)||_op <= d1 * E|Y(t)|^2 at every grid point
// (E|Y(t)|^2 from the exact second-moment ODE) and nonnegative definiteness.
RiccatiSolution solve_riccati(const sde::LinearModel& model, const GainWeight& xi,
                              Variant variant, const TimeGrid& grid);

// E|Y(t)|^2 on the grid from dM/dt = A M + M A^T + B Lambda1 B^T with
// M(0) = Cov(Y0) + mu0 mu0^T (RK4; exact for the continuous-time moments).
std::vector<double> system_second_moment(const sde::LinearModel& model, const TimeGrid& grid);

struct RiccatiGapRow {
    double cutoff;
    double sup_gap; // sup_t ||S_n(t) - S_inf(t)||_op
};

// Theorem-4.3 study: standard solutions along the ladder against the limiting
// solution.
std::vector<RiccatiGapRow> riccati_convergence_study(const sde::LinearModel& model,
                                                     const std::vector<double>& cutoffs,
                                                     const TimeGrid& grid);

} // namespace levykb::riccati

#endif
