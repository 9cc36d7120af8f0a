#ifndef LEVYKB_BENCH_HPP
#define LEVYKB_BENCH_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "levykb/filter.hpp"

namespace levykb::bench {

// Scalar Ornstein-Uhlenbeck system observed through symmetric alpha-stable
// noise: dY = -Y dt + dW, dZ = Y dt + dX2, dispersion 1, Y0 = 0.
struct ExperimentConfig {
    std::vector<double> alphas{1.1, 1.5, 1.9};
    double dt = 0.01;
    double horizon = 10.0;
    std::size_t replicates = 10000;
    std::uint64_t root_seed = 20250801;
    // "degenerate", "limiting", "standard:<cutoff>", "exact_obs", or a
    // registered competitor name.
    std::vector<std::string> variants{"degenerate"};
    enum class Statistic { MedianPathMse, MeanPathMse };
    Statistic statistic = Statistic::MedianPathMse;
    double dispersion = 1.0;
    unsigned threads = 0; // 0 = hardware concurrency

    void validate() const;
};

struct VariantStats {
    std::string name;
    double median_mse = 0.0;
    double mean_mse = 0.0;
    double se_median = 0.0; // 1.2533 * sd / sqrt(M)
    double se_mean = 0.0;
    double root_median = 0.0; // the Table-1 comparison statistic
    double se_root_median = 0.0;
    double root_mean = 0.0;
};

struct BenchReport {
    ExperimentConfig config;
    // row per alpha, column per variant (variant order = config order)
    std::vector<double> alphas;
    std::vector<std::vector<VariantStats>> rows;

    const VariantStats& stats(double alpha, const std::string& variant) const;
};

// Estimate path on the grid from the observation path (competitor hook).
using CompetitorFn =
    std::function<Eigen::VectorXd(const levy::PathGrid& observations,
                                  const ExperimentConfig& config)>;

// Named competitor registry; duplicate names raise registration_error.
void register_competitor(const std::string& name, CompetitorFn fn);
bool competitor_registered(const std::string& name);
void clear_competitors();

BenchReport run_benchmark(const ExperimentConfig& config);

enum class TableFormat { Csv, Markdown };
std::string emit_table(const BenchReport& report, TableFormat format);

} // namespace levykb::bench

#endif
