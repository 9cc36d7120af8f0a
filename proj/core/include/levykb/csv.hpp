#ifndef LEVYKB_CSV_HPP
#define LEVYKB_CSV_HPP

#include <string>

#include "levykb/filter.hpp"
#include "levykb/levy_core.hpp"
#include "levykb/riccati.hpp"

namespace levykb::io {

// Header "t, x1..xd", 17 significant digits.
std::string path_to_csv(const levy::PathGrid& path);

// Header "t, s11, s12, ..., sdd" row-major.
std::string riccati_to_csv(const riccati::RiccatiSolution& sol);

// Header "t, yhat_1..yhat_d1, n_1..n_d2"; optionally gain columns k_ij.
std::string filter_to_csv(const filter::FilterRun& run, bool include_gains = false);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

} // namespace levykb::io

#endif
