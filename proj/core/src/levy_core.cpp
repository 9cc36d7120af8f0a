#include "levykb/levy_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "levykb/errors.hpp"
#include "levykb/parallel.hpp"
#include "levykb/quadrature.hpp"

namespace levykb::levy {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// trapezoid of g(r) over [lo, hi] on the tabulated (radii, density) grid with
// linear interpolation of the density at the interval ends.
double tabulated_integral(const std::vector<double>& r, const std::vector<double>& f,
                          double lo, double hi, const std::function<double(double, double)>& g) {
    if (hi <= lo) return 0.0;
    lo = std::max(lo, r.front());
    hi = std::min(hi, r.back());
    if (hi <= lo) return 0.0;
    auto interp = [&](double x) {
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t j = (it == r.begin()) ? 1 : static_cast<std::size_t>(it - r.begin());
        if (j >= r.size()) j = r.size() - 1;
        const double w = (x - r[j - 1]) / (r[j] - r[j - 1]);
        return f[j - 1] + w * (f[j] - f[j - 1]);
    };
    double total = 0.0;
    double prev_x = lo, prev_y = g(lo, interp(lo));
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j] <= lo || r[j] >= hi) continue;
        const double y = g(r[j], f[j]);
        total += 0.5 * (prev_y + y) * (r[j] - prev_x);
        prev_x = r[j];
        prev_y = y;
    }
    total += 0.5 * (prev_y + g(hi, interp(hi))) * (hi - prev_x);
    return total;
}

void check_tabulated(const JumpComponentSpec& spec) {
    if (spec.radii.size() < 2)
        throw resolution_error("tabulated jump spec needs at least two grid samples");
    if (spec.radii.size() != spec.density.size())
        throw resolution_error("tabulated jump spec: radii/density length mismatch");
    if (spec.radii.front() <= 0.0)
        throw resolution_error("tabulated jump spec: radii must be positive");
    for (std::size_t i = 1; i < spec.radii.size(); ++i)
        if (spec.radii[i] <= spec.radii[i - 1])
            throw resolution_error("tabulated jump spec: radii must be strictly increasing");
    for (double v : spec.density)
        if (v < 0.0) throw resolution_error("tabulated jump spec: negative density");
}

} // namespace

double stable_density_constant(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw regime_error("symmetric-stable requires alpha in (1,2)");
    // From int (1-cos(uy)) c|y|^{-1-alpha} dy = |u|^alpha.
    return alpha * (alpha - 1.0) /
           (2.0 * std::tgamma(2.0 - alpha) * std::abs(std::cos(kPi * alpha / 2.0)));
}

double stable_symbol_quadrature(double alpha, double u) {
    // int_0^infty (1 - cos(u y)) * 2 c_a y^{-1-a} dy with the origin
    // singularity removed by y = t^p, p = 2/(2-a), and the oscillatory tail
    // summed period by period with an analytic remainder.
    const double c = stable_density_constant(alpha);
    const double p = 2.0 / (2.0 - alpha);
    const double period = 2.0 * kPi / u;
    auto integrand = [&](double y) {
        return (1.0 - std::cos(u * y)) * 2.0 * c * std::pow(y, -1.0 - alpha);
    };
    // [0, period] in the t variable
    auto head = [&](double t) {
        const double y = std::pow(t, p);
        return (1.0 - std::cos(u * y)) * 2.0 * c * std::pow(y, -1.0 - alpha) * p *
               std::pow(t, p - 1.0);
    };
    double total = integrate(head, 0.0, std::pow(period, 1.0 / p), 1e-12);
    const int periods = 4000;
    for (int j = 1; j < periods; ++j)
        total += integrate(integrand, period * j, period * (j + 1), 1e-12, 20);
    const double tail_start = period * periods;
    // beyond tail_start: int (1)*2c y^{-1-a} exactly; the cos remainder is
    // O(tail_start^{-1-a}) and ignored.
    total += 2.0 * c * std::pow(tail_start, -alpha) / alpha;
    return total;
}

// ---- JumpLaw ----------------------------------------------------------------

JumpLaw JumpLaw::two_point(double value) {
    if (!(value > 0.0)) throw regime_error("two-point law needs a positive value");
    JumpLaw l;
    l.kind = Kind::TwoPoint;
    l.a = value;
    return l;
}

JumpLaw JumpLaw::gaussian(double sd) {
    if (!(sd > 0.0)) throw regime_error("gaussian law needs a positive sd");
    JumpLaw l;
    l.kind = Kind::Gaussian;
    l.a = sd;
    return l;
}

JumpLaw JumpLaw::uniform(double halfwidth) {
    if (!(halfwidth > 0.0)) throw regime_error("uniform law needs a positive halfwidth");
    JumpLaw l;
    l.kind = Kind::Uniform;
    l.a = halfwidth;
    return l;
}

JumpLaw JumpLaw::pareto(double exponent, double xmin) {
    if (!(exponent > 1.0))
        throw regime_error("pareto law needs exponent > 1 (finite mean)");
    if (!(xmin > 0.0)) throw regime_error("pareto law needs xmin > 0");
    JumpLaw l;
    l.kind = Kind::Pareto;
    l.a = exponent;
    l.b = xmin;
    return l;
}

bool JumpLaw::finite_second_moment() const {
    return kind != Kind::Pareto || a > 2.0;
}

double JumpLaw::abs_mean() const {
    switch (kind) {
        case Kind::TwoPoint: return a;
        case Kind::Gaussian: return a * std::sqrt(2.0 / kPi);
        case Kind::Uniform: return a / 2.0;
        case Kind::Pareto: return a * b / (a - 1.0);
    }
    return 0.0;
}

double JumpLaw::second_moment(double cutoff) const {
    switch (kind) {
        case Kind::TwoPoint:
            return a <= cutoff ? a * a : 0.0;
        case Kind::Gaussian: {
            if (std::isinf(cutoff)) return a * a;
            const double z = cutoff / a;
            const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
            return a * a * (std::erf(z / std::sqrt(2.0)) - 2.0 * z * phi);
        }
        case Kind::Uniform:
            return cutoff >= a ? a * a / 3.0 : cutoff * cutoff * cutoff / (3.0 * a);
        case Kind::Pareto: {
            const double k = a, xm = b;
            if (cutoff < xm) return 0.0;
            if (std::isinf(cutoff)) {
                if (k <= 2.0)
                    throw infinite_variance_error("pareto law has infinite second moment");
                return k * xm * xm / (k - 2.0);
            }
            if (k == 2.0) return k * xm * xm * std::log(cutoff / xm);
            return k * std::pow(xm, k) *
                   (std::pow(cutoff, 2.0 - k) - std::pow(xm, 2.0 - k)) / (2.0 - k);
        }
    }
    return 0.0;
}

double JumpLaw::tail_abs_moment(double cutoff) const {
    switch (kind) {
        case Kind::TwoPoint:
            return a > cutoff ? a : 0.0;
        case Kind::Gaussian: {
            const double z = cutoff / a;
            return 2.0 * a * std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi);
        }
        case Kind::Uniform:
            return cutoff >= a ? 0.0 : (a * a - cutoff * cutoff) / (2.0 * a);
        case Kind::Pareto: {
            const double k = a, xm = b;
            const double c = std::max(cutoff, xm);
            return k * std::pow(xm, k) * std::pow(c, 1.0 - k) / (k - 1.0);
        }
    }
    return 0.0;
}

double JumpLaw::sample(Rng& rng) const {
    switch (kind) {
        case Kind::TwoPoint: return rng.coin() ? a : -a;
        case Kind::Gaussian: return a * rng.normal();
        case Kind::Uniform: return a * (2.0 * rng.uniform() - 1.0);
        case Kind::Pareto: {
            double u;
            do { u = rng.uniform(); } while (u <= 0.0);
            const double mag = b * std::pow(u, -1.0 / a);
            return rng.coin() ? mag : -mag;
        }
    }
    return 0.0;
}

// ---- JumpComponentSpec -------------------------------------------------------

JumpComponentSpec JumpComponentSpec::none(int axis) {
    JumpComponentSpec s;
    s.kind = Kind::None;
    s.axis = axis;
    return s;
}

JumpComponentSpec JumpComponentSpec::symmetric_stable(double alpha, double scale, int axis) {
    if (!(alpha > 1.0 && alpha < 2.0))
        throw regime_error("symmetric-stable requires alpha strictly inside (1,2)");
    if (!(scale > 0.0)) throw regime_error("symmetric-stable requires a positive scale");
    JumpComponentSpec s;
    s.kind = Kind::SymmetricStable;
    s.alpha = alpha;
    s.scale = scale;
    s.axis = axis;
    return s;
}

JumpComponentSpec JumpComponentSpec::compound_poisson(double rate, JumpLaw law, int axis) {
    if (!(rate > 0.0)) throw regime_error("compound-poisson requires a positive rate");
    JumpComponentSpec s;
    s.kind = Kind::CompoundPoisson;
    s.rate = rate;
    s.law = law;
    s.axis = axis;
    return s;
}

JumpComponentSpec JumpComponentSpec::tabulated(std::vector<double> radii,
                                               std::vector<double> density, int axis) {
    JumpComponentSpec s;
    s.kind = Kind::Tabulated;
    s.radii = std::move(radii);
    s.density = std::move(density);
    s.axis = axis;
    check_tabulated(s);
    return s;
}

bool JumpComponentSpec::finite_second_moment() const {
    switch (kind) {
        case Kind::None: return true;
        case Kind::SymmetricStable: return false;
        case Kind::CompoundPoisson: return law.finite_second_moment();
        case Kind::Tabulated: return true; // bounded support
    }
    return true;
}

double jump_second_moment(const JumpComponentSpec& spec, double cutoff) {
    if (!(cutoff > 0.0)) throw regime_error("jump_second_moment: cutoff must be positive");
    switch (spec.kind) {
        case JumpComponentSpec::Kind::None:
            return 0.0;
        case JumpComponentSpec::Kind::SymmetricStable: {
            if (std::isinf(cutoff))
                throw infinite_variance_error(
                    "symmetric-stable component has infinite second moment");
            const double k = std::pow(spec.scale, spec.alpha) *
                             stable_density_constant(spec.alpha);
            return 2.0 * k * std::pow(cutoff, 2.0 - spec.alpha) / (2.0 - spec.alpha);
        }
        case JumpComponentSpec::Kind::CompoundPoisson:
            return spec.rate * spec.law.second_moment(cutoff);
        case JumpComponentSpec::Kind::Tabulated: {
            check_tabulated(spec);
            return 2.0 * tabulated_integral(spec.radii, spec.density, 0.0, cutoff,
                                            [](double r, double f) { return r * r * f; });
        }
    }
    return 0.0;
}

double jump_tail_first_moment(const JumpComponentSpec& spec, double cutoff) {
    if (!(cutoff > 0.0))
        throw regime_error("jump_tail_first_moment: cutoff must be positive");
    switch (spec.kind) {
        case JumpComponentSpec::Kind::None:
            return 0.0;
        case JumpComponentSpec::Kind::SymmetricStable: {
            const double k = std::pow(spec.scale, spec.alpha) *
                             stable_density_constant(spec.alpha);
            return 2.0 * k * std::pow(cutoff, 1.0 - spec.alpha) / (spec.alpha - 1.0);
        }
        case JumpComponentSpec::Kind::CompoundPoisson:
            return spec.rate * spec.law.tail_abs_moment(cutoff);
        case JumpComponentSpec::Kind::Tabulated: {
            check_tabulated(spec);
            return 2.0 * tabulated_integral(spec.radii, spec.density, cutoff,
                                            spec.radii.back(),
                                            [](double r, double f) { return r * f; });
        }
    }
    return 0.0;
}

// ---- LevyModel ---------------------------------------------------------------

LevyModel::LevyModel(int dim, Eigen::MatrixXd a, std::vector<JumpComponentSpec> comps)
    : dimension(dim), drift(Eigen::VectorXd::Zero(dim)), gaussian_cov(std::move(a)),
      jump_components(std::move(comps)) {
    validate();
}

LevyModel LevyModel::brownian(const Eigen::MatrixXd& a) {
    return LevyModel(static_cast<int>(a.rows()), a, {});
}

LevyModel LevyModel::pure_stable(double alpha, double scale) {
    return LevyModel(1, Eigen::MatrixXd::Zero(1, 1),
                     {JumpComponentSpec::symmetric_stable(alpha, scale, 0)});
}

void LevyModel::validate() const {
    if (dimension <= 0) throw model_error("LevyModel: dimension must be positive");
    if (gaussian_cov.rows() != dimension || gaussian_cov.cols() != dimension)
        throw model_error("LevyModel: gaussian_cov shape mismatch");
    if (drift.size() != dimension) throw model_error("LevyModel: drift shape mismatch");
    if (drift.cwiseAbs().maxCoeff() > 0.0)
        throw model_error("LevyModel: centred models need zero drift");
    const double asym = (gaussian_cov - gaussian_cov.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, gaussian_cov.cwiseAbs().maxCoeff()))
        throw model_error("LevyModel: gaussian_cov must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gaussian_cov);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw model_error("LevyModel: gaussian_cov must be nonnegative-definite");
    for (const auto& c : jump_components)
        if (c.axis < 0 || c.axis >= dimension)
            throw model_error("LevyModel: jump component axis out of range");
}

std::set<int> LevyModel::infinite_variance_set() const {
    std::set<int> q;
    for (const auto& c : jump_components)
        if (!c.finite_second_moment()) q.insert(c.axis);
    return q;
}

TruncatedLevyModel::TruncatedLevyModel(LevyModel b, double n) : base(std::move(b)), cutoff(n) {
    if (!(n > 0.0) || std::isinf(n))
        throw regime_error("TruncatedLevyModel: cutoff must be a positive finite real");
}

Eigen::MatrixXd truncated_jump_covariance(const LevyModel& model, double cutoff) {
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(model.dimension, model.dimension);
    for (const auto& c : model.jump_components)
        psi(c.axis, c.axis) += jump_second_moment(c, cutoff);
    return psi;
}

Eigen::MatrixXd covariance_matrix(const LevyModel& model) {
    if (!model.square_integrable())
        throw infinite_variance_error(
            "covariance_matrix: model has infinite-variance components; truncate first");
    return model.gaussian_cov + truncated_jump_covariance(model, kInfiniteCutoff);
}

Eigen::MatrixXd covariance_matrix(const TruncatedLevyModel& model) {
    return model.base.gaussian_cov + truncated_jump_covariance(model.base, model.cutoff);
}

double tail_first_moment(const LevyModel& model, double cutoff) {
    double total = 0.0;
    for (const auto& c : model.jump_components) total += jump_tail_first_moment(c, cutoff);
    return total;
}

// ---- Upsilon ladder ----------------------------------------------------------

namespace {

Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& m, const std::string& who) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double floor = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < floor)
        throw singularity_error(who);
    Eigen::VectorXd inv = es.eigenvalues().cwiseInverse();
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

Eigen::MatrixXd upsilon_infinity_analytic(const LevyModel& model) {
    const std::set<int> q = model.infinite_variance_set();
    const int d = model.dimension;
    if (q.empty()) return invert_spd(covariance_matrix(model), "Theta is singular");
    Eigen::MatrixXd limit = Eigen::MatrixXd::Zero(d, d);
    std::vector<int> finite_axes;
    for (int i = 0; i < d; ++i)
        if (!q.count(i)) finite_axes.push_back(i);
    if (finite_axes.empty()) return limit;
    const int f = static_cast<int>(finite_axes.size());
    Eigen::MatrixXd block(f, f);
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j)
            block(i, j) = model.gaussian_cov(finite_axes[i], finite_axes[j]);
    for (const auto& c : model.jump_components) {
        if (q.count(c.axis)) continue;
        const auto it = std::find(finite_axes.begin(), finite_axes.end(), c.axis);
        const int i = static_cast<int>(it - finite_axes.begin());
        block(i, i) += jump_second_moment(c, kInfiniteCutoff);
    }
    Eigen::MatrixXd block_inv = invert_spd(block, "finite-variance block of Lambda is singular");
    for (int i = 0; i < f; ++i)
        for (int j = 0; j < f; ++j) limit(finite_axes[i], finite_axes[j]) = block_inv(i, j);
    return limit;
}

UpsilonReport upsilon_infinity(const LevyModel& model, const std::vector<double>& cutoffs) {
    if (cutoffs.size() < 3)
        throw std::invalid_argument("upsilon_infinity: need at least 3 cutoffs");
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (!(cutoffs[i] > cutoffs[i - 1]))
            throw std::invalid_argument("upsilon_infinity: cutoffs must be strictly increasing");
    UpsilonReport rep;
    rep.cutoffs = cutoffs;
    for (double n : cutoffs) {
        Eigen::MatrixXd lam = covariance_matrix(TruncatedLevyModel(model, n));
        std::ostringstream msg;
        msg << "Lambda^(n) singular at cutoff n = " << n;
        rep.inverses.push_back(invert_spd(lam, msg.str()));
        if (rep.inverses.size() > 1) {
            const auto& a = rep.inverses[rep.inverses.size() - 2];
            const auto& b = rep.inverses.back();
            rep.diff_norms.push_back((a - b).cwiseAbs().maxCoeff());
        }
    }
    rep.limit = rep.inverses.back();
    rep.analytic_limit = upsilon_infinity_analytic(model);
    rep.converged = !rep.diff_norms.empty() && rep.diff_norms.back() < 1e-6;
    return rep;
}

// ---- Sampling ----------------------------------------------------------------

PathGrid PathGrid::from_increments(const TimeGrid& grid, std::uint64_t seed,
                                   Eigen::MatrixXd increments, const Eigen::VectorXd& initial) {
    PathGrid p;
    p.grid = grid;
    p.seed = seed;
    p.values.resize(grid.points(), increments.cols());
    p.values.row(0) = initial.transpose();
    for (std::size_t k = 0; k < grid.steps; ++k)
        p.values.row(static_cast<Eigen::Index>(k) + 1) =
            p.values.row(static_cast<Eigen::Index>(k)) +
            increments.row(static_cast<Eigen::Index>(k));
    p.increments = std::move(increments);
    return p;
}

PathGrid CoupledIncrements::assemble(double cutoff) const {
    if (!(cutoff > 0.0)) throw regime_error("assemble: cutoff must be positive");
    for (double e : eps)
        if (cutoff < e)
            throw regime_error("assemble: cutoff lies below the small-jump layer scale");
    Eigen::MatrixXd inc = continuous;
    for (const auto& ev : events)
        if (std::abs(ev.size) <= cutoff) inc(ev.step, ev.axis) += ev.size;
    return PathGrid::from_increments(grid, seed, std::move(inc),
                                     Eigen::VectorXd::Zero(dimension));
}

namespace {

struct StableLayer {
    int axis;
    double eps;
    double small_sd;   // per unit time
    double intensity;  // events with magnitude > eps, per unit time
    double alpha;
};

struct PoissonLayer {
    int axis;
    double rate;
    const JumpLaw* law;
};

struct TabulatedLayer {
    int axis;
    double intensity;
    std::vector<double> cdf;   // normalized cumulative over radii
    const std::vector<double>* radii;
};

double sample_tabulated_magnitude(const TabulatedLayer& t, double u) {
    const auto& cdf = t.cdf;
    const auto& r = *t.radii;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t j = (it == cdf.begin()) ? 1 : static_cast<std::size_t>(it - cdf.begin());
    if (j >= cdf.size()) j = cdf.size() - 1;
    const double span = cdf[j] - cdf[j - 1];
    const double w = span > 0.0 ? (u - cdf[j - 1]) / span : 0.0;
    return r[j - 1] + w * (r[j] - r[j - 1]);
}

} // namespace

CoupledIncrements sample_coupled(const LevyModel& model, const TimeGrid& grid,
                                 std::uint64_t seed) {
    model.validate();
    CoupledIncrements out;
    out.grid = grid;
    out.seed = seed;
    out.dimension = model.dimension;
    out.continuous = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.steps),
                                           model.dimension);
    out.eps.assign(model.jump_components.size(), 0.0);

    const bool has_brownian = model.gaussian_cov.cwiseAbs().maxCoeff() > 0.0;
    Eigen::MatrixXd a_sqrt;
    if (has_brownian) a_sqrt = symmetric_sqrt(model.gaussian_cov);

    std::vector<StableLayer> stables;
    std::vector<PoissonLayer> poissons;
    std::vector<TabulatedLayer> tabs;
    for (std::size_t i = 0; i < model.jump_components.size(); ++i) {
        const auto& c = model.jump_components[i];
        switch (c.kind) {
            case JumpComponentSpec::Kind::None:
                break;
            case JumpComponentSpec::Kind::SymmetricStable: {
                const double k = std::pow(c.scale, c.alpha) * stable_density_constant(c.alpha);
                StableLayer s;
                s.axis = c.axis;
                s.alpha = c.alpha;
                s.eps = std::pow(grid.dt, 1.0 / c.alpha);
                s.small_sd = std::sqrt(2.0 * k * std::pow(s.eps, 2.0 - c.alpha) /
                                       (2.0 - c.alpha));
                s.intensity = 2.0 * k * std::pow(s.eps, -c.alpha) / c.alpha;
                out.eps[i] = s.eps;
                stables.push_back(s);
                break;
            }
            case JumpComponentSpec::Kind::CompoundPoisson:
                poissons.push_back({c.axis, c.rate, &c.law});
                break;
            case JumpComponentSpec::Kind::Tabulated: {
                check_tabulated(c);
                TabulatedLayer t;
                t.axis = c.axis;
                t.radii = &c.radii;
                t.cdf.resize(c.radii.size(), 0.0);
                for (std::size_t j = 1; j < c.radii.size(); ++j)
                    t.cdf[j] = t.cdf[j - 1] + 0.5 * (c.density[j] + c.density[j - 1]) *
                                                  (c.radii[j] - c.radii[j - 1]);
                t.intensity = 2.0 * t.cdf.back();
                if (t.cdf.back() > 0.0)
                    for (double& v : t.cdf) v /= t.cdf.back();
                tabs.push_back(t);
                break;
            }
        }
    }

    Rng rng(seed);
    const double sqrt_dt = std::sqrt(grid.dt);
    Eigen::VectorXd z(model.dimension);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        if (has_brownian) {
            for (int i = 0; i < model.dimension; ++i) z(i) = rng.normal();
            out.continuous.row(row) += (a_sqrt * z).transpose() * sqrt_dt;
        }
        for (const auto& s : stables)
            out.continuous(row, s.axis) += s.small_sd * sqrt_dt * rng.normal();
        for (const auto& s : stables) {
            const std::uint64_t m = rng.poisson(s.intensity * grid.dt);
            for (std::uint64_t j = 0; j < m; ++j) {
                double u;
                do { u = rng.uniform(); } while (u <= 0.0);
                const double mag = s.eps * std::pow(u, -1.0 / s.alpha);
                const double sz = rng.coin() ? mag : -mag;
                out.events.push_back({static_cast<std::uint32_t>(k), s.axis, sz});
            }
        }
        for (const auto& p : poissons) {
            const std::uint64_t m = rng.poisson(p.rate * grid.dt);
            for (std::uint64_t j = 0; j < m; ++j)
                out.events.push_back({static_cast<std::uint32_t>(k), p.axis,
                                      p.law->sample(rng)});
        }
        for (const auto& t : tabs) {
            if (t.intensity <= 0.0) continue;
            const std::uint64_t m = rng.poisson(t.intensity * grid.dt);
            for (std::uint64_t j = 0; j < m; ++j) {
                const double mag = sample_tabulated_magnitude(t, rng.uniform());
                const double sz = rng.coin() ? mag : -mag;
                out.events.push_back({static_cast<std::uint32_t>(k), t.axis, sz});
            }
        }
    }
    return out;
}

PathGrid sample_increments(const LevyModel& model, const TimeGrid& grid, std::uint64_t seed) {
    model.validate();
    Eigen::MatrixXd inc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid.steps),
                                                model.dimension);
    const bool has_brownian = model.gaussian_cov.cwiseAbs().maxCoeff() > 0.0;
    Eigen::MatrixXd a_sqrt;
    if (has_brownian) a_sqrt = symmetric_sqrt(model.gaussian_cov);

    Rng rng(seed);
    const double sqrt_dt = std::sqrt(grid.dt);
    Eigen::VectorXd z(model.dimension);
    for (std::size_t k = 0; k < grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        if (has_brownian) {
            for (int i = 0; i < model.dimension; ++i) z(i) = rng.normal();
            inc.row(row) += (a_sqrt * z).transpose() * sqrt_dt;
        }
        for (const auto& c : model.jump_components) {
            switch (c.kind) {
                case JumpComponentSpec::Kind::None:
                    break;
                case JumpComponentSpec::Kind::SymmetricStable:
                    // exact: increment law is scale * dt^{1/alpha} * S(alpha)
                    inc(row, c.axis) +=
                        c.scale * std::pow(grid.dt, 1.0 / c.alpha) * rng.stable(c.alpha);
                    break;
                case JumpComponentSpec::Kind::CompoundPoisson: {
                    const std::uint64_t m = rng.poisson(c.rate * grid.dt);
                    for (std::uint64_t j = 0; j < m; ++j) inc(row, c.axis) += c.law.sample(rng);
                    break;
                }
                case JumpComponentSpec::Kind::Tabulated: {
                    check_tabulated(c);
                    TabulatedLayer t;
                    t.axis = c.axis;
                    t.radii = &c.radii;
                    t.cdf.resize(c.radii.size(), 0.0);
                    for (std::size_t j = 1; j < c.radii.size(); ++j)
                        t.cdf[j] = t.cdf[j - 1] + 0.5 * (c.density[j] + c.density[j - 1]) *
                                                      (c.radii[j] - c.radii[j - 1]);
                    const double intensity = 2.0 * t.cdf.back();
                    if (t.cdf.back() > 0.0)
                        for (double& v : t.cdf) v /= t.cdf.back();
                    const std::uint64_t m = rng.poisson(intensity * grid.dt);
                    for (std::uint64_t j = 0; j < m; ++j) {
                        const double mag = sample_tabulated_magnitude(t, rng.uniform());
                        inc(row, c.axis) += rng.coin() ? mag : -mag;
                    }
                    break;
                }
            }
        }
    }
    return PathGrid::from_increments(grid, seed, std::move(inc),
                                     Eigen::VectorXd::Zero(model.dimension));
}

PathGrid sample_increments(const TruncatedLevyModel& model, const TimeGrid& grid,
                           std::uint64_t seed) {
    return sample_coupled(model.base, grid, seed).assemble(model.cutoff);
}

std::vector<L1ConvergenceRow> empirical_l1_convergence(const LevyModel& model,
                                                       const std::vector<double>& cutoffs,
                                                       const TimeGrid& grid,
                                                       std::size_t replicates,
                                                       std::uint64_t seed, unsigned threads) {
    if (replicates < 100)
        throw std::invalid_argument("empirical_l1_convergence: needs >= 100 replicates");
    const std::size_t n_cut = cutoffs.size();
    std::vector<std::vector<double>> gaps(n_cut, std::vector<double>(replicates, 0.0));
    parallel_for(
        replicates,
        [&](std::size_t r) {
            CoupledIncrements c = sample_coupled(model, grid, derive_seed(seed, r));
            const Eigen::VectorXd full =
                c.assemble(kInfiniteCutoff).values.row(static_cast<Eigen::Index>(grid.steps));
            for (std::size_t i = 0; i < n_cut; ++i) {
                const Eigen::VectorXd trunc =
                    c.assemble(cutoffs[i]).values.row(static_cast<Eigen::Index>(grid.steps));
                gaps[i][r] = (full - trunc).norm();
            }
        },
        threads);
    const double horizon_len = grid.dt * static_cast<double>(grid.steps);
    std::vector<L1ConvergenceRow> rows;
    for (std::size_t i = 0; i < n_cut; ++i) {
        double mean = std::accumulate(gaps[i].begin(), gaps[i].end(), 0.0) /
                      static_cast<double>(replicates);
        double var = 0.0;
        for (double g : gaps[i]) var += (g - mean) * (g - mean);
        var /= static_cast<double>(replicates - 1);
        rows.push_back({cutoffs[i], mean, std::sqrt(var / static_cast<double>(replicates)),
                        2.0 * horizon_len * tail_first_moment(model, cutoffs[i])});
    }
    return rows;
}

} // namespace levykb::levy
