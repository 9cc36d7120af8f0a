#ifndef LEVYKB_REPORT_HPP
#define LEVYKB_REPORT_HPP

#include <string>
#include <vector>

namespace levykb::report {

// Small numeric table with CSV and Markdown renderings (deterministic output).
struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> rows;

    std::string to_csv(int precision = 17) const;
    std::string to_markdown(int precision = 6) const;
};

// 17-significant-digit formatting used by all CSV exports.
std::string format_full(double x);
std::string format_fixed(double x, int decimals);

} // namespace levykb::report

#endif
