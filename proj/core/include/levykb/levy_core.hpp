#ifndef LEVYKB_LEVY_CORE_HPP
#define LEVYKB_LEVY_CORE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "levykb/grid.hpp"
#include "levykb/rng.hpp"

namespace levykb::levy {

inline constexpr double kInfiniteCutoff = std::numeric_limits<double>::infinity();

// Stable Levy density constant: nu(dy) = c(alpha) * scale^alpha * |y|^{-1-alpha} dy
// gives characteristic exponent scale^alpha * |u|^alpha.
double stable_density_constant(double alpha);

// int (1 - cos(u y)) nu(dy) for the unit-scale stable measure, by adaptive
// quadrature; validates the closed-form constant (should equal |u|^alpha).
double stable_symbol_quadrature(double alpha, double u);

// One-dimensional jump law of a compound-Poisson component. All laws have a
// finite absolute first moment; second moment may be infinite (pareto k <= 2).
struct JumpLaw {
    enum class Kind { TwoPoint, Gaussian, Uniform, Pareto };
    Kind kind = Kind::TwoPoint;
    double a = 1.0; // TwoPoint: +-a; Gaussian: sd; Uniform: halfwidth; Pareto: tail exponent
    double b = 0.0; // Pareto: xmin

    static JumpLaw two_point(double value);
    static JumpLaw gaussian(double sd);
    static JumpLaw uniform(double halfwidth);
    static JumpLaw pareto(double exponent, double xmin); // symmetric, requires exponent > 1

    bool finite_second_moment() const;
    double mean() const { return 0.0; } // all supported laws are symmetric
    double abs_mean() const;
    double second_moment(double cutoff) const;       // E[J^2 ; |J| <= cutoff]
    double tail_abs_moment(double cutoff) const;     // E[|J| ; |J| > cutoff]
    double truncated_mean(double cutoff) const { (void)cutoff; return 0.0; }
    double sample(Rng& rng) const;
};

// One axis-aligned component of the Levy measure.
struct JumpComponentSpec {
    enum class Kind { None, SymmetricStable, CompoundPoisson, Tabulated };

    Kind kind = Kind::None;
    int axis = 0;

    // symmetric-stable
    double alpha = 1.5;
    double scale = 1.0;

    // compound-poisson
    double rate = 0.0;
    JumpLaw law;

    // tabulated: radial density samples, symmetric about 0, zero outside the grid
    std::vector<double> radii;
    std::vector<double> density;

    static JumpComponentSpec none(int axis = 0);
    static JumpComponentSpec symmetric_stable(double alpha, double scale, int axis);
    static JumpComponentSpec compound_poisson(double rate, JumpLaw law, int axis);
    static JumpComponentSpec tabulated(std::vector<double> radii, std::vector<double> density,
                                       int axis);

    bool finite_second_moment() const;
};

// nu-calculus on one component.
double jump_second_moment(const JumpComponentSpec& spec, double cutoff);
double jump_tail_first_moment(const JumpComponentSpec& spec, double cutoff);

// Characteristic triplet with axis-aligned, independent jump components.
struct LevyModel {
    int dimension = 1;
    Eigen::VectorXd drift;        // must be zero for centred models
    Eigen::MatrixXd gaussian_cov; // symmetric nonnegative-definite
    std::vector<JumpComponentSpec> jump_components;

    LevyModel() = default;
    LevyModel(int dim, Eigen::MatrixXd a, std::vector<JumpComponentSpec> comps);

    static LevyModel brownian(const Eigen::MatrixXd& a);
    static LevyModel pure_stable(double alpha, double scale = 1.0); // d = 1

    // Axes whose total jump measure has an infinite second moment.
    std::set<int> infinite_variance_set() const;
    bool square_integrable() const { return infinite_variance_set().empty(); }
    bool fully_infinite_variance() const {
        return static_cast<int>(infinite_variance_set().size()) == dimension;
    }

    void validate() const;
};

struct TruncatedLevyModel {
    LevyModel base;
    double cutoff = 1.0; // jump measure restricted to {|y| <= cutoff}

    TruncatedLevyModel(LevyModel b, double n);
};

// Truncated jump covariance Lambda^(n) (diagonal by the axis-aligned construction).
Eigen::MatrixXd truncated_jump_covariance(const LevyModel& model, double cutoff);

// Theta = a + psi. Throws infinite_variance_error when a component's second
// moment diverges at the given cutoff.
Eigen::MatrixXd covariance_matrix(const LevyModel& model);
Eigen::MatrixXd covariance_matrix(const TruncatedLevyModel& model);

// Sum over components of the tail first moments int_{|y|>cutoff}|y| nu(dy).
double tail_first_moment(const LevyModel& model, double cutoff);

// (Lambda^(n))^{-1} ladder report.
struct UpsilonReport {
    std::vector<double> cutoffs;
    std::vector<Eigen::MatrixXd> inverses;  // per cutoff
    std::vector<double> diff_norms;         // max-norm between successive inverses
    Eigen::MatrixXd limit;                  // last iterate
    Eigen::MatrixXd analytic_limit;         // Schur limit: 0 on q-axes, finite block inverted
    bool converged = false;                 // last diff < 1e-6
};

UpsilonReport upsilon_infinity(const LevyModel& model, const std::vector<double>& cutoffs);

// Analytic limit of (a + psi^(n))^{-1} as n -> infinity for axis-aligned models.
Eigen::MatrixXd upsilon_infinity_analytic(const LevyModel& model);

// Process values on a grid: values.row(k+1) - values.row(k) = increments.row(k).
struct PathGrid {
    TimeGrid grid;
    std::uint64_t seed = 0;
    Eigen::MatrixXd increments; // steps x d
    Eigen::MatrixXd values;     // (steps+1) x d, row 0 is the initial value

    int dimension() const { return static_cast<int>(values.cols()); }
    static PathGrid from_increments(const TimeGrid& grid, std::uint64_t seed,
                                    Eigen::MatrixXd increments,
                                    const Eigen::VectorXd& initial);
};

// One realized jump event of the layered sampler.
struct JumpEvent {
    std::uint32_t step;
    std::int32_t axis;
    double size; // signed
};

// One noise realization decomposed into layers shared by every cutoff:
// Brownian + small-jump Gaussian increments, plus every jump event with
// magnitude above the component's eps. assemble(n) filters events at |size|<=n
// (and applies per-cutoff compensator drift for asymmetric laws), so paths at
// different cutoffs are exactly coupled.
struct CoupledIncrements {
    TimeGrid grid;
    std::uint64_t seed = 0;
    int dimension = 1;
    Eigen::MatrixXd continuous; // steps x d: Brownian + small-jump Gaussian layers
    std::vector<JumpEvent> events;
    std::vector<double> eps;    // per component (0 where events are exact)

    PathGrid assemble(double cutoff) const;
};

CoupledIncrements sample_coupled(const LevyModel& model, const TimeGrid& grid,
                                 std::uint64_t seed);

// Exact increments of the untruncated process (stable components via the
// Chambers-Mallows-Stuck transform; compound-Poisson and Brownian exact).
PathGrid sample_increments(const LevyModel& model, const TimeGrid& grid, std::uint64_t seed);

// Layered-scheme increments of the truncated process; identical (model, grid,
// seed) triples reproduce identical output, and output at cutoff n equals
// sample_coupled(...).assemble(n).
PathGrid sample_increments(const TruncatedLevyModel& model, const TimeGrid& grid,
                           std::uint64_t seed);

// Empirical Prop-2.1 check: E|L(T) - L_n(T)| along a cutoff ladder against the
// analytic bound 2T int_{|y|>n}|y|nu(dy).
struct L1ConvergenceRow {
    double cutoff;
    double empirical; // mean |gap at T| over replicates
    double std_error;
    double bound;
};

std::vector<L1ConvergenceRow> empirical_l1_convergence(const LevyModel& model,
                                                       const std::vector<double>& cutoffs,
                                                       const TimeGrid& grid,
                                                       std::size_t replicates,
                                                       std::uint64_t seed,
                                                       unsigned threads = 0);

} // namespace levykb::levy

#endif
