#include "levykb/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "levykb/csv.hpp"
#include "levykb/errors.hpp"

namespace levykb::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw config_error(where + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where + "." + key, "missing field");
    return *it;
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

double number_field(const json& j, const char* key, const std::string& where) {
    return as_number(require(j, key, where), where + "." + key);
}

std::string string_field(const json& j, const char* key, const std::string& where) {
    const json& v = require(j, key, where);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
    if (j[0].is_number()) { // flat 1 x n row
        Eigen::MatrixXd m(1, j.size());
        for (std::size_t c = 0; c < j.size(); ++c) m(0, c) = as_number(j[c], where);
        return m;
    }
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            fail(where, "rows must be arrays of equal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = as_number(j[r][c], where);
    }
    return m;
}

Eigen::VectorXd as_vector(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = as_number(j[i], where);
    return v;
}

std::vector<double> as_doubles(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    std::vector<double> v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_number(j[i], where));
    return v;
}

levy::JumpLaw parse_law(const json& j, const std::string& where) {
    const std::string kind = string_field(j, "kind", where);
    try {
        if (kind == "two_point") return levy::JumpLaw::two_point(number_field(j, "value", where));
        if (kind == "gaussian") return levy::JumpLaw::gaussian(number_field(j, "sd", where));
        if (kind == "uniform") return levy::JumpLaw::uniform(number_field(j, "halfwidth", where));
        if (kind == "pareto")
            return levy::JumpLaw::pareto(number_field(j, "exponent", where),
                                         number_field(j, "xmin", where));
    } catch (const regime_error& e) {
        fail(where, e.what());
    }
    fail(where + ".kind", "unknown jump law '" + kind + "'");
}

std::pair<std::vector<double>, std::vector<double>> read_scalar_table(const std::string& file) {
    std::ifstream f(file);
    if (!f) throw config_error("scalar table file not found: " + file);
    std::vector<double> times, values;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        std::istringstream ss(line);
        double t, v;
        char comma;
        if (ss >> t >> comma >> v) {
            times.push_back(t);
            values.push_back(v);
        }
    }
    if (times.empty()) throw config_error("scalar table file is empty: " + file);
    return {times, values};
}

} // namespace

sde::TimeMatrixFunction parse_time_matrix(const json& j, const std::string& where,
                                          const std::string& base_dir) {
    if (!j.is_object()) fail(where, "expected an object");
    if (j.contains("constant"))
        return sde::TimeMatrixFunction::constant(as_matrix(j["constant"], where + ".constant"));
    if (j.contains("matrix")) {
        Eigen::MatrixXd m = as_matrix(j["matrix"], where + ".matrix");
        const json& s = require(j, "scalar", where);
        const std::string kind = string_field(s, "kind", where + ".scalar");
        if (kind == "constant") return sde::TimeMatrixFunction::constant(std::move(m));
        if (kind == "exp_decay")
            return sde::TimeMatrixFunction::exp_decay(std::move(m),
                                                      number_field(s, "rate", where + ".scalar"));
        if (kind == "table") {
            const std::string file = string_field(s, "file", where + ".scalar");
            const std::filesystem::path p =
                base_dir.empty() ? std::filesystem::path(file)
                                 : std::filesystem::path(base_dir) / file;
            auto [times, values] = read_scalar_table(p.string());
            return sde::TimeMatrixFunction::scaled_table(std::move(m), std::move(times),
                                                         std::move(values));
        }
        fail(where + ".scalar.kind", "must be one of constant, exp_decay, table");
    }
    if (j.contains("table")) {
        const json& t = j["table"];
        std::vector<double> times = as_doubles(require(t, "times", where + ".table"),
                                               where + ".table.times");
        const json& mats = require(t, "matrices", where + ".table");
        if (!mats.is_array()) fail(where + ".table.matrices", "expected an array");
        std::vector<Eigen::MatrixXd> values;
        for (std::size_t i = 0; i < mats.size(); ++i)
            values.push_back(as_matrix(mats[i], where + ".table.matrices"));
        return sde::TimeMatrixFunction::table(std::move(times), std::move(values));
    }
    fail(where, "expected one of: constant, matrix+scalar, table");
}

levy::LevyModel parse_levy_model(const json& j, const std::string& where) {
    const int dim = static_cast<int>(number_field(j, "dimension", where));
    Eigen::MatrixXd a;
    if (j.contains("gaussian_cov")) {
        a = as_matrix(j["gaussian_cov"], where + ".gaussian_cov");
        if (a.rows() == 1 && a.cols() == static_cast<Eigen::Index>(dim) * dim && dim > 1) {
            // accept flat row-major
            Eigen::MatrixXd sq(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int c = 0; c < dim; ++c) sq(r, c) = a(0, r * dim + c);
            a = sq;
        }
    } else {
        a = Eigen::MatrixXd::Zero(dim, dim);
    }
    if (a.rows() != dim || a.cols() != dim)
        fail(where + ".gaussian_cov", "shape must be dimension x dimension");

    std::vector<levy::JumpComponentSpec> comps;
    if (j.contains("components")) {
        const json& arr = j["components"];
        if (!arr.is_array()) fail(where + ".components", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string cw = where + ".components[" + std::to_string(i) + "]";
            const json& c = arr[i];
            const std::string kind = string_field(c, "kind", cw);
            const int axis =
                c.contains("axis") ? static_cast<int>(number_field(c, "axis", cw)) : 0;
            try {
                if (kind == "none") {
                    comps.push_back(levy::JumpComponentSpec::none(axis));
                } else if (kind == "symmetric_stable") {
                    const double scale =
                        c.contains("scale") ? number_field(c, "scale", cw) : 1.0;
                    comps.push_back(levy::JumpComponentSpec::symmetric_stable(
                        number_field(c, "alpha", cw), scale, axis));
                } else if (kind == "compound_poisson") {
                    comps.push_back(levy::JumpComponentSpec::compound_poisson(
                        number_field(c, "rate", cw), parse_law(require(c, "law", cw), cw + ".law"),
                        axis));
                } else if (kind == "tabulated") {
                    comps.push_back(levy::JumpComponentSpec::tabulated(
                        as_doubles(require(c, "radii", cw), cw + ".radii"),
                        as_doubles(require(c, "density", cw), cw + ".density"), axis));
                } else {
                    fail(cw + ".kind", "unknown jump component kind '" + kind + "'");
                }
            } catch (const config_error&) {
                throw;
            } catch (const std::exception& e) {
                fail(cw, e.what());
            }
        }
    }
    try {
        return levy::LevyModel(dim, std::move(a), std::move(comps));
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
}

json levy_model_to_json(const levy::LevyModel& m) {
    json j;
    j["dimension"] = m.dimension;
    json cov = json::array();
    for (int r = 0; r < m.dimension; ++r) {
        json row = json::array();
        for (int c = 0; c < m.dimension; ++c) row.push_back(m.gaussian_cov(r, c));
        cov.push_back(row);
    }
    j["gaussian_cov"] = cov;
    json comps = json::array();
    for (const auto& c : m.jump_components) {
        json cj;
        cj["axis"] = c.axis;
        switch (c.kind) {
            case levy::JumpComponentSpec::Kind::None:
                cj["kind"] = "none";
                break;
            case levy::JumpComponentSpec::Kind::SymmetricStable:
                cj["kind"] = "symmetric_stable";
                cj["alpha"] = c.alpha;
                cj["scale"] = c.scale;
                break;
            case levy::JumpComponentSpec::Kind::CompoundPoisson: {
                cj["kind"] = "compound_poisson";
                cj["rate"] = c.rate;
                json lj;
                switch (c.law.kind) {
                    case levy::JumpLaw::Kind::TwoPoint:
                        lj["kind"] = "two_point";
                        lj["value"] = c.law.a;
                        break;
                    case levy::JumpLaw::Kind::Gaussian:
                        lj["kind"] = "gaussian";
                        lj["sd"] = c.law.a;
                        break;
                    case levy::JumpLaw::Kind::Uniform:
                        lj["kind"] = "uniform";
                        lj["halfwidth"] = c.law.a;
                        break;
                    case levy::JumpLaw::Kind::Pareto:
                        lj["kind"] = "pareto";
                        lj["exponent"] = c.law.a;
                        lj["xmin"] = c.law.b;
                        break;
                }
                cj["law"] = lj;
                break;
            }
            case levy::JumpComponentSpec::Kind::Tabulated:
                cj["kind"] = "tabulated";
                cj["radii"] = c.radii;
                cj["density"] = c.density;
                break;
        }
        comps.push_back(cj);
    }
    j["components"] = comps;
    return j;
}

namespace {

bench::ExperimentConfig parse_experiment(const json& j, const std::string& where) {
    bench::ExperimentConfig cfg;
    if (j.contains("alphas")) cfg.alphas = as_doubles(j["alphas"], where + ".alphas");
    if (j.contains("dt")) cfg.dt = number_field(j, "dt", where);
    if (j.contains("horizon")) cfg.horizon = number_field(j, "horizon", where);
    if (j.contains("replicates"))
        cfg.replicates = static_cast<std::size_t>(number_field(j, "replicates", where));
    if (j.contains("root_seed"))
        cfg.root_seed = j["root_seed"].get<std::uint64_t>();
    if (j.contains("variants")) {
        cfg.variants.clear();
        for (const auto& v : j["variants"]) {
            if (!v.is_string()) fail(where + ".variants", "expected strings");
            cfg.variants.push_back(v.get<std::string>());
        }
    }
    if (j.contains("statistic")) {
        const std::string s = string_field(j, "statistic", where);
        if (s == "median")
            cfg.statistic = bench::ExperimentConfig::Statistic::MedianPathMse;
        else if (s == "mean")
            cfg.statistic = bench::ExperimentConfig::Statistic::MeanPathMse;
        else
            fail(where + ".statistic", "must be 'median' or 'mean'");
    }
    if (j.contains("dispersion")) cfg.dispersion = number_field(j, "dispersion", where);
    if (j.contains("threads"))
        cfg.threads = static_cast<unsigned>(number_field(j, "threads", where));
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        fail(where, e.what());
    }
    return cfg;
}

json experiment_to_json(const bench::ExperimentConfig& cfg) {
    json j;
    j["alphas"] = cfg.alphas;
    j["dt"] = cfg.dt;
    j["horizon"] = cfg.horizon;
    j["replicates"] = cfg.replicates;
    j["root_seed"] = cfg.root_seed;
    j["variants"] = cfg.variants;
    j["statistic"] =
        cfg.statistic == bench::ExperimentConfig::Statistic::MedianPathMse ? "median" : "mean";
    j["dispersion"] = cfg.dispersion;
    return j;
}

ConvergeConfig parse_converge(const json& j, const std::string& where) {
    ConvergeConfig c;
    if (j.contains("cutoffs")) c.cutoffs = as_doubles(j["cutoffs"], where + ".cutoffs");
    if (j.contains("upsilon_cutoffs"))
        c.upsilon_cutoffs = as_doubles(j["upsilon_cutoffs"], where + ".upsilon_cutoffs");
    if (j.contains("riccati_cutoffs"))
        c.riccati_cutoffs = as_doubles(j["riccati_cutoffs"], where + ".riccati_cutoffs");
    if (j.contains("filter_cutoffs"))
        c.filter_cutoffs = as_doubles(j["filter_cutoffs"], where + ".filter_cutoffs");
    if (j.contains("replicates"))
        c.replicates = static_cast<std::size_t>(number_field(j, "replicates", where));
    if (j.contains("filter_replicates"))
        c.filter_replicates =
            static_cast<std::size_t>(number_field(j, "filter_replicates", where));
    if (j.contains("studies")) {
        c.studies.clear();
        for (const auto& s : j["studies"]) {
            if (!s.is_string()) fail(where + ".studies", "expected strings");
            c.studies.push_back(s.get<std::string>());
        }
    }
    return c;
}

json converge_to_json(const ConvergeConfig& c) {
    json j;
    j["cutoffs"] = c.cutoffs;
    j["upsilon_cutoffs"] = c.upsilon_cutoffs;
    j["riccati_cutoffs"] = c.riccati_cutoffs;
    j["filter_cutoffs"] = c.filter_cutoffs;
    j["replicates"] = c.replicates;
    j["filter_replicates"] = c.filter_replicates;
    j["studies"] = c.studies;
    return j;
}

} // namespace

RunConfig parse_config(const json& j) {
    RunConfig cfg;
    if (!j.is_object()) fail("config", "expected a JSON object");
    if (j.contains("schema_version")) {
        cfg.schema_version = static_cast<int>(number_field(j, "schema_version", "config"));
        if (cfg.schema_version != 1)
            fail("config.schema_version", "unsupported schema version");
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("grid")) {
        const json& g = j["grid"];
        const double t0 = g.contains("t0") ? number_field(g, "t0", "config.grid") : 0.0;
        const double horizon = number_field(g, "horizon", "config.grid");
        const double dt = number_field(g, "dt", "config.grid");
        try {
            cfg.grid = TimeGrid::from_horizon(t0, horizon, dt);
        } catch (const std::exception& e) {
            fail("config.grid", e.what());
        }
    }
    if (j.contains("system") && j.contains("observation")) {
        const json& sys = j["system"];
        const json& obs = j["observation"];
        cfg.model.A = parse_time_matrix(require(sys, "A", "config.system"), "config.system.A");
        cfg.model.B = parse_time_matrix(require(sys, "B", "config.system"), "config.system.B");
        cfg.model.C =
            parse_time_matrix(require(obs, "C", "config.observation"), "config.observation.C");
        cfg.model.D =
            parse_time_matrix(require(obs, "D", "config.observation"), "config.observation.D");
        cfg.model.system_noise =
            parse_levy_model(require(sys, "noise", "config.system"), "config.system.noise");
        cfg.model.observation_noise = parse_levy_model(
            require(obs, "noise", "config.observation"), "config.observation.noise");
        cfg.model.mu0 = as_vector(require(sys, "mu0", "config.system"), "config.system.mu0");
        cfg.model.initial_cov = as_matrix(require(sys, "initial_cov", "config.system"),
                                          "config.system.initial_cov");
        cfg.has_model = true;
    } else if (j.contains("system") || j.contains("observation")) {
        fail("config", "system and observation sections must appear together");
    }
    if (j.contains("filter")) {
        const json& f = j["filter"];
        if (f.contains("variant")) {
            cfg.variant = string_field(f, "variant", "config.filter");
            if (cfg.variant != "standard" && cfg.variant != "limiting" &&
                cfg.variant != "degenerate")
                fail("config.filter.variant", "must be standard, limiting, or degenerate");
        }
        if (f.contains("cutoff")) cfg.cutoff = number_field(f, "cutoff", "config.filter");
        if (f.contains("phi_cutoffs"))
            cfg.phi_cutoffs = as_doubles(f["phi_cutoffs"], "config.filter.phi_cutoffs");
    }
    if (j.contains("converge")) cfg.converge = parse_converge(j["converge"], "config.converge");
    if (j.contains("experiment")) {
        cfg.experiment = parse_experiment(j["experiment"], "config.experiment");
        cfg.has_experiment = true;
    }

    // canonical resolved config
    json out;
    out["schema_version"] = cfg.schema_version;
    out["seed"] = cfg.seed;
    out["grid"] = {{"t0", cfg.grid.t0},
                   {"dt", cfg.grid.dt},
                   {"horizon", cfg.grid.dt * static_cast<double>(cfg.grid.steps)}};
    if (cfg.has_model) {
        // time-matrix functions round-trip through their original JSON form
        out["system"] = j["system"];
        out["observation"] = j["observation"];
        out["system"]["noise"] = levy_model_to_json(cfg.model.system_noise);
        out["observation"]["noise"] = levy_model_to_json(cfg.model.observation_noise);
    }
    out["filter"] = {{"variant", cfg.variant}, {"phi_cutoffs", cfg.phi_cutoffs}};
    if (std::isfinite(cfg.cutoff)) out["filter"]["cutoff"] = cfg.cutoff;
    out["converge"] = converge_to_json(cfg.converge);
    if (cfg.has_experiment) out["experiment"] = experiment_to_json(cfg.experiment);
    cfg.resolved = out.dump(2) + "\n";
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("config file not found: " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

} // namespace levykb::io
