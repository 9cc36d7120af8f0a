#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "levykb/levy_core.hpp"
#include "test_support.hpp"

using namespace levykb;
using namespace levykb::levy;
using test_support::adaptive_simpson;

namespace {

double stable_nu_density(double alpha, double y) {
    return stable_density_constant(alpha) * std::pow(std::abs(y), -1.0 - alpha);
}

LevyModel mixed_example(int d, int q, double alpha) {
    // q stable axes, d-q unit Brownian axes
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (int i = q; i < d; ++i) a(i, i) = 1.0;
    std::vector<JumpComponentSpec> comps;
    for (int i = 0; i < q; ++i)
        comps.push_back(JumpComponentSpec::symmetric_stable(alpha, 1.0, i));
    return LevyModel(d, a, comps);
}

} // namespace

TEST_CASE("stable density constant reproduces the characteristic exponent") {
    for (double alpha : {1.1, 1.5, 1.9}) {
        CHECK(std::abs(stable_symbol_quadrature(alpha, 1.0) - 1.0) < 1e-8);
        // scaling |u|^alpha at u = 2
        CHECK(std::abs(stable_symbol_quadrature(alpha, 2.0) - std::pow(2.0, alpha)) <
              1e-7 * std::pow(2.0, alpha));
    }
    CHECK_THROWS_AS(stable_density_constant(1.0), regime_error);
    CHECK_THROWS_AS(stable_density_constant(2.0), regime_error);
}

TEST_CASE("jump_second_moment") {
    SUBCASE("no jump part") {
        CHECK(jump_second_moment(JumpComponentSpec::none(), 5.0) == 0.0);
    }
    SUBCASE("stable closed form against the Simpson oracle") {
        for (double alpha : {1.2, 1.5, 1.8}) {
            auto spec = JumpComponentSpec::symmetric_stable(alpha, 1.0, 0);
            for (double n : {0.5, 2.0, 16.0}) {
                const double oracle = 2.0 * adaptive_simpson(
                                                [&](double y) {
                                                    return y * y * stable_nu_density(alpha, y);
                                                },
                                                1e-12, n);
                CHECK(jump_second_moment(spec, n) ==
                      doctest::Approx(oracle).epsilon(1e-8));
            }
        }
    }
    SUBCASE("stable growth like n^{2-alpha}") {
        auto spec = JumpComponentSpec::symmetric_stable(1.5, 1.0, 0);
        const double r = jump_second_moment(spec, 400.0) / jump_second_moment(spec, 100.0);
        CHECK(r == doctest::Approx(std::pow(4.0, 0.5)).epsilon(1e-12));
        // ratio to n^{2-alpha} settles: relative drift < 1% over the last rungs
        double prev = jump_second_moment(spec, 1e4) / std::pow(1e4, 0.5);
        double last = jump_second_moment(spec, 4e4) / std::pow(4e4, 0.5);
        CHECK(std::abs(last / prev - 1.0) < 0.01);
    }
    SUBCASE("two-point compound Poisson enumerates") {
        auto spec =
            JumpComponentSpec::compound_poisson(2.0, JumpLaw::two_point(1.0), 0);
        CHECK(jump_second_moment(spec, 1.0) == doctest::Approx(2.0));
        CHECK(jump_second_moment(spec, 100.0) == doctest::Approx(2.0));
        CHECK(jump_second_moment(spec, 0.5) == 0.0);
    }
    SUBCASE("monotone nondecreasing in the cutoff") {
        auto stable = JumpComponentSpec::symmetric_stable(1.3, 0.7, 0);
        auto cp = JumpComponentSpec::compound_poisson(1.5, JumpLaw::gaussian(0.8), 0);
        double prev_s = 0.0, prev_c = 0.0;
        for (double n = 0.25; n < 40.0; n *= 2.0) {
            const double s = jump_second_moment(stable, n);
            const double c = jump_second_moment(cp, n);
            CHECK(s >= prev_s);
            CHECK(c >= prev_c);
            prev_s = s;
            prev_c = c;
        }
    }
    SUBCASE("gaussian law closed form against the oracle") {
        auto spec = JumpComponentSpec::compound_poisson(3.0, JumpLaw::gaussian(1.5), 0);
        const double n = 2.0;
        const double oracle =
            3.0 * 2.0 *
            adaptive_simpson(
                [&](double x) {
                    return x * x * std::exp(-x * x / (2.0 * 2.25)) /
                           std::sqrt(2.0 * M_PI * 2.25);
                },
                0.0, n);
        CHECK(jump_second_moment(spec, n) == doctest::Approx(oracle).epsilon(1e-9));
    }
    SUBCASE("tabulated density, trapezoid rule") {
        // density f(r) = 1 on [1, 2]: second moment over all = 2*(8-1)/3
        std::vector<double> r, f;
        for (int i = 0; i <= 200; ++i) {
            r.push_back(1.0 + i / 200.0);
            f.push_back(1.0);
        }
        auto spec = JumpComponentSpec::tabulated(r, f, 0);
        CHECK(jump_second_moment(spec, 3.0) == doctest::Approx(2.0 * 7.0 / 3.0).epsilon(1e-4));
        CHECK(jump_second_moment(spec, 1.5) ==
              doctest::Approx(2.0 * (std::pow(1.5, 3) - 1.0) / 3.0).epsilon(1e-4));
    }
    SUBCASE("tabulated resolution errors") {
        CHECK_THROWS_AS(JumpComponentSpec::tabulated({1.0}, {1.0}, 0), resolution_error);
        CHECK_THROWS_AS(JumpComponentSpec::tabulated({1.0, 0.5}, {1.0, 1.0}, 0),
                        resolution_error);
        CHECK_THROWS_AS(JumpComponentSpec::tabulated({1.0, 2.0}, {1.0, -1.0}, 0),
                        resolution_error);
    }
    SUBCASE("infinite cutoff on a stable component") {
        auto spec = JumpComponentSpec::symmetric_stable(1.5, 1.0, 0);
        CHECK_THROWS_AS(jump_second_moment(spec, kInfiniteCutoff), infinite_variance_error);
    }
}

TEST_CASE("jump_tail_first_moment") {
    SUBCASE("stable power law: quadrupling the cutoff halves the tail at alpha=1.5") {
        auto spec = JumpComponentSpec::symmetric_stable(1.5, 1.0, 0);
        CHECK(jump_tail_first_moment(spec, 16.0) / jump_tail_first_moment(spec, 4.0) ==
              doctest::Approx(0.5).epsilon(1e-12));
        // closed form 2 c_a n^{1-a}/(a-1)
        const double c = stable_density_constant(1.5);
        CHECK(jump_tail_first_moment(spec, 4.0) ==
              doctest::Approx(2.0 * c * std::pow(4.0, -0.5) / 0.5).epsilon(1e-12));
    }
    SUBCASE("oracle check on a finite window") {
        auto spec = JumpComponentSpec::symmetric_stable(1.5, 1.0, 0);
        // tail(4) - tail(64) = integral over (4, 64]
        const double diff = jump_tail_first_moment(spec, 4.0) -
                            jump_tail_first_moment(spec, 64.0);
        const double oracle = 2.0 * adaptive_simpson(
                                        [&](double y) { return y * stable_nu_density(1.5, y); },
                                        4.0, 64.0);
        CHECK(diff == doctest::Approx(oracle).epsilon(1e-9));
    }
    SUBCASE("bounded jumps vanish beyond the support") {
        auto spec =
            JumpComponentSpec::compound_poisson(2.0, JumpLaw::two_point(1.0), 0);
        CHECK(jump_tail_first_moment(spec, 2.0) == 0.0);
        CHECK(jump_tail_first_moment(spec, 0.5) == doctest::Approx(2.0));
    }
    SUBCASE("none") { CHECK(jump_tail_first_moment(JumpComponentSpec::none(), 1.0) == 0.0); }
    SUBCASE("monotone nonincreasing") {
        auto spec = JumpComponentSpec::symmetric_stable(1.2, 1.0, 0);
        double prev = jump_tail_first_moment(spec, 0.5);
        for (double n = 1.0; n < 100.0; n *= 2.0) {
            const double v = jump_tail_first_moment(spec, n);
            CHECK(v <= prev);
            prev = v;
        }
    }
    SUBCASE("integrability regime is enforced at construction") {
        CHECK_THROWS_AS(JumpComponentSpec::symmetric_stable(0.9, 1.0, 0), regime_error);
        CHECK_THROWS_AS(JumpLaw::pareto(0.9, 1.0), regime_error);
    }
}

TEST_CASE("covariance_matrix") {
    SUBCASE("pure Brownian") {
        auto model = LevyModel::brownian(Eigen::MatrixXd::Identity(3, 3));
        CHECK(test_support::matrices_close(covariance_matrix(model),
                                           Eigen::MatrixXd::Identity(3, 3), 0.0));
    }
    SUBCASE("worked mixed example: stable axes truncated, Brownian axes unit") {
        const int d = 4, q = 2;
        LevyModel model = mixed_example(d, q, 1.5);
        const double n = 9.0;
        Eigen::MatrixXd theta = covariance_matrix(TruncatedLevyModel(model, n));
        auto stable = JumpComponentSpec::symmetric_stable(1.5, 1.0, 0);
        const double m = jump_second_moment(stable, n);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (i != j)
                    CHECK(theta(i, j) == 0.0);
                else
                    CHECK(theta(i, i) == doctest::Approx(i < q ? m : 1.0));
            }
    }
    SUBCASE("compound Poisson rate x E(J^2)") {
        LevyModel model(1, Eigen::MatrixXd::Zero(1, 1),
                        {JumpComponentSpec::compound_poisson(2.0, JumpLaw::two_point(1.0), 0)});
        CHECK(covariance_matrix(model)(0, 0) == doctest::Approx(2.0));
    }
    SUBCASE("infinite variance blocks the untruncated covariance") {
        LevyModel model = LevyModel::pure_stable(1.5);
        CHECK_THROWS_AS(covariance_matrix(model), infinite_variance_error);
        CHECK(covariance_matrix(TruncatedLevyModel(model, 10.0))(0, 0) > 0.0);
    }
    SUBCASE("trace identity and nonnegative definiteness over random truncated models") {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> unif(0.1, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            const int d = 1 + static_cast<int>(gen() % 3);
            Eigen::MatrixXd root = Eigen::MatrixXd::NullaryExpr(
                d, d, [&](Eigen::Index, Eigen::Index) { return unif(gen) - 1.0; });
            Eigen::MatrixXd a = root * root.transpose();
            std::vector<JumpComponentSpec> comps;
            double expected_jump_trace = 0.0;
            const double n = unif(gen) * 5.0;
            for (int i = 0; i < d; ++i) {
                if (gen() % 2) {
                    comps.push_back(JumpComponentSpec::symmetric_stable(1.0 + unif(gen) / 2.5,
                                                                        unif(gen), i));
                } else {
                    comps.push_back(
                        JumpComponentSpec::compound_poisson(unif(gen), JumpLaw::gaussian(unif(gen)), i));
                }
                expected_jump_trace += jump_second_moment(comps.back(), n);
            }
            LevyModel model(d, a, comps);
            Eigen::MatrixXd theta = covariance_matrix(TruncatedLevyModel(model, n));
            CHECK(test_support::matrices_close(theta, theta.transpose(), 1e-12));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(theta);
            CHECK(es.eigenvalues().minCoeff() > -1e-10);
            CHECK(theta.trace() ==
                  doctest::Approx(a.trace() + expected_jump_trace).epsilon(1e-10));
        }
    }
}

TEST_CASE("upsilon_infinity") {
    SUBCASE("scalar stable ladder heads to zero") {
        LevyModel model = LevyModel::pure_stable(1.5);
        auto rep = upsilon_infinity(model, {1e2, 1e4, 1e6});
        CHECK(rep.limit(0, 0) < 1e-3);
        CHECK(rep.analytic_limit(0, 0) == 0.0);
        CHECK(rep.diff_norms.size() == 2);
        CHECK(rep.diff_norms[1] < rep.diff_norms[0]);
    }
    SUBCASE("mixed example heads to diag(0,..,0,1,..,1)") {
        LevyModel model = mixed_example(4, 2, 1.5);
        auto rep = upsilon_infinity(model, {1e2, 1e4, 1e6});
        Eigen::VectorXd expected(4);
        expected << 0.0, 0.0, 1.0, 1.0;
        CHECK(test_support::matrices_close(rep.analytic_limit,
                                           expected.asDiagonal().toDenseMatrix(), 1e-14));
        CHECK((rep.limit - rep.analytic_limit).cwiseAbs().maxCoeff() < 1e-3);
    }
    SUBCASE("finite-variance compound Poisson is constant along the ladder") {
        const double v1 = 2.0, v2 = 0.5; // rate * value^2
        LevyModel model(2, Eigen::MatrixXd::Zero(2, 2),
                        {JumpComponentSpec::compound_poisson(2.0, JumpLaw::two_point(1.0), 0),
                         JumpComponentSpec::compound_poisson(0.5, JumpLaw::two_point(1.0), 1)});
        auto rep = upsilon_infinity(model, {2.0, 4.0, 8.0});
        for (const auto& inv : rep.inverses) {
            CHECK(inv(0, 0) == doctest::Approx(1.0 / v1));
            CHECK(inv(1, 1) == doctest::Approx(1.0 / v2));
        }
        CHECK(rep.converged);
    }
    SUBCASE("singular Lambda names the offending cutoff") {
        // second axis has no noise at all -> Lambda singular
        LevyModel model(2, Eigen::MatrixXd::Zero(2, 2),
                        {JumpComponentSpec::compound_poisson(1.0, JumpLaw::two_point(1.0), 0)});
        CHECK_THROWS_WITH_AS(upsilon_infinity(model, {2.0, 4.0, 8.0}),
                             doctest::Contains("cutoff n = 2"), singularity_error);
    }
    SUBCASE("ladder preconditions") {
        LevyModel model = LevyModel::pure_stable(1.5);
        CHECK_THROWS(upsilon_infinity(model, {1.0, 2.0}));
        CHECK_THROWS(upsilon_infinity(model, {1.0, 2.0, 2.0}));
    }
}

TEST_CASE("sample_increments") {
    SUBCASE("Brownian per-step variance") {
        auto model = LevyModel::brownian(Eigen::MatrixXd::Identity(2, 2));
        TimeGrid grid(0.0, 0.01, 100000);
        auto path = sample_increments(model, grid, 99);
        for (int i = 0; i < 2; ++i) {
            const double var = path.increments.col(i).squaredNorm() / 100000.0;
            // sample variance of N(0, dt): sd ~ dt*sqrt(2/n)
            CHECK(std::abs(var - 0.01) < 3.0 * 0.01 * std::sqrt(2.0 / 100000.0));
        }
    }
    SUBCASE("stable empirical characteristic function at unit steps") {
        auto model = LevyModel::pure_stable(1.5);
        TimeGrid grid(0.0, 1.0, 200000);
        auto path = sample_increments(model, grid, 1234);
        for (double u : {0.5, 1.0, 2.0}) {
            double acc = 0.0;
            for (std::size_t k = 0; k < grid.steps; ++k)
                acc += std::cos(u * path.increments(static_cast<Eigen::Index>(k), 0));
            const double ecf = acc / static_cast<double>(grid.steps);
            const double target = std::exp(-std::pow(u, 1.5));
            const double var_bound =
                (1.0 + std::exp(-std::pow(2.0 * u, 1.5))) / 2.0 - target * target;
            const double se = std::sqrt(var_bound / static_cast<double>(grid.steps));
            CHECK(std::abs(ecf - target) < 4.0 * se);
        }
    }
    SUBCASE("centredness of truncated stable and compound Poisson increments") {
        LevyModel model(2, Eigen::MatrixXd::Zero(2, 2),
                        {JumpComponentSpec::symmetric_stable(1.5, 1.0, 0),
                         JumpComponentSpec::compound_poisson(2.0, JumpLaw::uniform(1.0), 1)});
        TimeGrid grid(0.0, 0.01, 100000);
        auto path = sample_increments(TruncatedLevyModel(model, 50.0), grid, 4242);
        for (int i = 0; i < 2; ++i) {
            const double mean = path.increments.col(i).mean();
            const double sd = std::sqrt(path.increments.col(i).squaredNorm() / 100000.0);
            CHECK(std::abs(mean) < 4.0 * sd / std::sqrt(100000.0));
        }
    }
    SUBCASE("determinism: identical triples give identical bytes") {
        auto model = LevyModel::pure_stable(1.3);
        TimeGrid grid(0.0, 0.01, 500);
        auto p1 = sample_increments(model, grid, 77);
        auto p2 = sample_increments(model, grid, 77);
        CHECK(std::memcmp(p1.values.data(), p2.values.data(),
                          sizeof(double) * p1.values.size()) == 0);
        auto p3 = sample_increments(model, grid, 78);
        CHECK(p3.values != p2.values);
        auto t1 = sample_increments(TruncatedLevyModel(model, 5.0), grid, 77);
        auto t2 = sample_increments(TruncatedLevyModel(model, 5.0), grid, 77);
        CHECK(std::memcmp(t1.values.data(), t2.values.data(),
                          sizeof(double) * t1.values.size()) == 0);
    }
    SUBCASE("grid errors") {
        CHECK_THROWS_AS(TimeGrid(0.0, -0.01, 10), grid_error);
        CHECK_THROWS_AS(TimeGrid(0.0, 0.0, 10), grid_error);
        CHECK_THROWS_AS(TimeGrid::from_horizon(0.0, 1.0, 0.3), grid_error);
    }
    SUBCASE("values are cumulative sums starting at zero") {
        auto model = LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
        TimeGrid grid(0.0, 0.5, 10);
        auto path = sample_increments(model, grid, 5);
        CHECK(path.values(0, 0) == 0.0);
        double acc = 0.0;
        for (std::size_t k = 0; k < grid.steps; ++k) {
            acc += path.increments(static_cast<Eigen::Index>(k), 0);
            CHECK(path.values(static_cast<Eigen::Index>(k) + 1, 0) == doctest::Approx(acc));
        }
    }
}

TEST_CASE("coupled sampling") {
    SUBCASE("cutoff filter reproduces the enumerated jump contribution") {
        LevyModel model(1, Eigen::MatrixXd::Zero(1, 1),
                        {JumpComponentSpec::compound_poisson(3.0, JumpLaw::pareto(1.5, 0.5), 0)});
        TimeGrid grid(0.0, 0.01, 2000);
        auto coupled = sample_coupled(model, grid, 808);
        const double n1 = 1.0, n2 = 8.0;
        auto p1 = coupled.assemble(n1);
        auto p2 = coupled.assemble(n2);
        // manual contribution of jumps in (n1, n2]
        Eigen::VectorXd manual = Eigen::VectorXd::Zero(grid.points());
        for (const auto& ev : coupled.events) {
            const double m = std::abs(ev.size);
            if (m > n1 && m <= n2)
                for (std::size_t k = ev.step + 1; k <= grid.steps; ++k)
                    manual(static_cast<Eigen::Index>(k)) += ev.size;
        }
        CHECK(test_support::matrices_close(p2.values - p1.values, manual, 1e-14));
    }
    SUBCASE("truncated gap at the horizon obeys the first-moment bound") {
        auto model = LevyModel::pure_stable(1.5);
        TimeGrid grid(0.0, 0.01, 1000);
        const double n = 4.0;
        const double bound = 2.0 * 10.0 * tail_first_moment(model, n);
        double acc = 0.0;
        const int reps = 400;
        for (int r = 0; r < reps; ++r) {
            auto c = sample_coupled(model, grid, derive_seed(31337, r));
            const double full = c.assemble(kInfiniteCutoff).values(grid.steps, 0);
            const double trunc = c.assemble(n).values(grid.steps, 0);
            acc += std::abs(full - trunc);
        }
        CHECK(acc / reps < bound); // the bound is loose by ~2x, noise-safe
    }
    SUBCASE("cutoff below the small-jump layer is rejected") {
        auto model = LevyModel::pure_stable(1.5);
        TimeGrid grid(0.0, 0.01, 10);
        auto c = sample_coupled(model, grid, 9);
        CHECK_THROWS_AS(c.assemble(1e-3), regime_error);
    }
}

TEST_CASE("empirical_l1_convergence") {
    SUBCASE("bounded jumps: zero gap beyond the support") {
        LevyModel model(1, Eigen::MatrixXd::Zero(1, 1),
                        {JumpComponentSpec::compound_poisson(2.0, JumpLaw::two_point(1.0), 0)});
        TimeGrid grid(0.0, 0.01, 500);
        auto rows = empirical_l1_convergence(model, {2.0, 4.0}, grid, 100, 5);
        for (const auto& r : rows) {
            CHECK(r.empirical == 0.0);
            CHECK(r.bound == 0.0);
        }
    }
    SUBCASE("stable: bound column halves when the cutoff quadruples, empirical below bound") {
        auto model = LevyModel::pure_stable(1.5);
        TimeGrid grid(0.0, 0.01, 1000);
        auto rows = empirical_l1_convergence(model, {4.0, 16.0, 64.0}, grid, 500, 99);
        CHECK(rows[1].bound / rows[0].bound == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rows[2].bound / rows[1].bound == doctest::Approx(0.5).epsilon(1e-12));
        const double horizon = 10.0;
        for (const auto& r : rows) {
            CHECK(r.bound ==
                  doctest::Approx(2.0 * horizon * tail_first_moment(model, r.cutoff)));
            CHECK(r.empirical <= r.bound + 3.0 * r.std_error);
        }
        CHECK(rows[2].empirical < rows[0].empirical);
    }
    SUBCASE("replicate floor") {
        auto model = LevyModel::pure_stable(1.5);
        TimeGrid grid(0.0, 0.01, 10);
        CHECK_THROWS(empirical_l1_convergence(model, {2.0, 4.0, 8.0}, grid, 10, 5));
    }
}

TEST_CASE("seed splitting rule") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 100; ++r)
        for (std::uint64_t s = 0; s < 4; ++s) seen.insert(derive_seed(42, r, s));
    CHECK(seen.size() == 400);
    CHECK(derive_seed(42, 1, 2) == derive_seed(42, 1, 2));
    CHECK(derive_seed(42, 1, 2) != derive_seed(43, 1, 2));
}

TEST_CASE("model validation") {
    SUBCASE("asymmetric gaussian covariance is rejected") {
        Eigen::MatrixXd a(2, 2);
        a << 1.0, 0.5, -0.5, 1.0;
        CHECK_THROWS_AS(LevyModel(2, a, {}), model_error);
    }
    SUBCASE("indefinite gaussian covariance is rejected") {
        Eigen::MatrixXd a(2, 2);
        a << 1.0, 2.0, 2.0, 1.0;
        CHECK_THROWS_AS(LevyModel(2, a, {}), model_error);
    }
    SUBCASE("axis bounds") {
        CHECK_THROWS_AS(LevyModel(1, Eigen::MatrixXd::Zero(1, 1),
                                  {JumpComponentSpec::symmetric_stable(1.5, 1.0, 3)}),
                        model_error);
    }
    SUBCASE("q-set tracks the component flags") {
        LevyModel m(3, Eigen::MatrixXd::Identity(3, 3),
                    {JumpComponentSpec::symmetric_stable(1.5, 1.0, 0),
                     JumpComponentSpec::compound_poisson(1.0, JumpLaw::pareto(1.5, 1.0), 1),
                     JumpComponentSpec::compound_poisson(1.0, JumpLaw::two_point(1.0), 2)});
        CHECK(m.infinite_variance_set() == std::set<int>{0, 1});
        CHECK_FALSE(m.fully_infinite_variance());
        CHECK(LevyModel::pure_stable(1.1).fully_infinite_variance());
    }
}
