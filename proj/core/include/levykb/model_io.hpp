#ifndef LEVYKB_MODEL_IO_HPP
#define LEVYKB_MODEL_IO_HPP

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "levykb/bench.hpp"
#include "levykb/linear_sde.hpp"

namespace levykb::io {

using json = nlohmann::json;

// Ladder/replicate settings of the `converge` subcommand.
struct ConvergeConfig {
    std::vector<double> cutoffs{8.0, 16.0, 32.0, 64.0};          // prop21 / prop41
    std::vector<double> upsilon_cutoffs{1e2, 1e3, 1e4, 1e5, 1e6};
    std::vector<double> riccati_cutoffs{10.0, 100.0, 1000.0, 10000.0};
    std::vector<double> filter_cutoffs{10.0, 100.0, 1000.0, 10000.0};
    std::size_t replicates = 10000;
    std::size_t filter_replicates = 2000;
    std::vector<std::string> studies{"prop21", "prop41", "upsilon", "riccati", "filter"};
};

// A parsed CLI configuration; `resolved` is the config after defaults were
// applied (re-running it reproduces the run).
struct RunConfig {
    int schema_version = 1;
    bool has_model = false;
    sde::LinearModel model;
    TimeGrid grid = TimeGrid(0.0, 0.01, 1000);
    std::uint64_t seed = 1;
    std::string variant = "degenerate"; // standard | limiting | degenerate
    double cutoff = levy::kInfiniteCutoff;
    std::vector<double> phi_cutoffs{1e2, 1e3, 1e4, 1e5, 1e6};
    ConvergeConfig converge;
    bool has_experiment = false;
    bench::ExperimentConfig experiment;
    std::string resolved; // canonical JSON text
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const json& j);

levy::LevyModel parse_levy_model(const json& j, const std::string& where);
sde::TimeMatrixFunction parse_time_matrix(const json& j, const std::string& where,
                                          const std::string& base_dir = "");

json levy_model_to_json(const levy::LevyModel& m);

} // namespace levykb::io

#endif
