#include "levykb/csv.hpp"

#include <fstream>
#include <sstream>

#include "levykb/report.hpp"

namespace levykb::io {

std::string path_to_csv(const levy::PathGrid& path) {
    std::ostringstream out;
    out << "t";
    for (int i = 1; i <= path.dimension(); ++i) out << ",x" << i;
    out << "\n";
    for (std::size_t k = 0; k <= path.grid.steps; ++k) {
        out << report::format_full(path.grid.time(k));
        for (int i = 0; i < path.dimension(); ++i)
            out << "," << report::format_full(path.values(static_cast<Eigen::Index>(k), i));
        out << "\n";
    }
    return out.str();
}

std::string riccati_to_csv(const riccati::RiccatiSolution& sol) {
    std::ostringstream out;
    const auto d = sol.S.front().rows();
    out << "t";
    for (Eigen::Index i = 1; i <= d; ++i)
        for (Eigen::Index j = 1; j <= d; ++j) out << ",s" << i << j;
    out << "\n";
    for (std::size_t k = 0; k <= sol.grid.steps; ++k) {
        out << report::format_full(sol.grid.time(k));
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j)
                out << "," << report::format_full(sol.S[k](i, j));
        out << "\n";
    }
    return out.str();
}

std::string filter_to_csv(const filter::FilterRun& run, bool include_gains) {
    std::ostringstream out;
    const auto d1 = run.estimates.cols();
    const auto d2 = run.innovations.cols();
    out << "t";
    for (Eigen::Index i = 1; i <= d1; ++i) out << ",yhat_" << i;
    for (Eigen::Index i = 1; i <= d2; ++i) out << ",n_" << i;
    if (include_gains)
        for (Eigen::Index i = 1; i <= d1; ++i)
            for (Eigen::Index j = 1; j <= d2; ++j) out << ",k" << i << j;
    out << "\n";
    for (std::size_t k = 0; k <= run.grid.steps; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        out << report::format_full(run.grid.time(k));
        for (Eigen::Index i = 0; i < d1; ++i)
            out << "," << report::format_full(run.estimates(row, i));
        for (Eigen::Index i = 0; i < d2; ++i)
            out << "," << report::format_full(run.innovations(row, i));
        if (include_gains) {
            // gains exist per step; the last grid point repeats the last gain
            const auto& g = run.gains[std::min(k, run.grid.steps - 1)];
            for (Eigen::Index i = 0; i < d1; ++i)
                for (Eigen::Index j = 0; j < d2; ++j)
                    out << "," << report::format_full(g(i, j));
        }
        out << "\n";
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << contents;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace levykb::io
