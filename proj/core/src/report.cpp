#include "levykb/report.hpp"

#include <cstdio>
#include <sstream>

namespace levykb::report {

std::string format_full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_fixed(double x, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

std::string Table::to_csv(int precision) const {
    std::ostringstream out;
    for (std::size_t i = 0; i < headers.size(); ++i) {
        if (i) out << ",";
        out << headers[i];
    }
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            std::snprintf(buf, sizeof(buf), "%.*g", precision, row[i]);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string Table::to_markdown(int precision) const {
    std::ostringstream out;
    out << "|";
    for (const auto& h : headers) out << " " << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < headers.size(); ++i) out << " --- |";
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        out << "|";
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
            out << " " << buf << " |";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace levykb::report
