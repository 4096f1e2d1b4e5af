#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fastosc::harness {

/// 17 significant digits, scientific, locale independent; -0 prints as 0.
inline std::string format_real(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string format_field(std::optional<double> v) { return v ? format_real(*v) : std::string{}; }

/// One CSV row: comma separated, LF terminated.
inline void write_row(std::ostream& out, std::vector<std::string> const& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

/// Header plus numeric rows; absent values become empty fields.
inline void write_table(std::ostream& out, std::vector<std::string> const& header,
                        std::vector<std::vector<std::optional<double>>> const& rows) {
    write_row(out, header);
    for (auto const& r : rows) {
        std::vector<std::string> f;
        f.reserve(r.size());
        for (auto const& v : r) f.push_back(format_field(v));
        write_row(out, f);
    }
}

} // namespace fastosc::harness
