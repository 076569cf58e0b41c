#pragma once

// Plain-text sample files: one real number per line. Blank lines and lines
// starting with '#' are skipped, and a single `x` header line is accepted
// before the first value.

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "prevalence/densities.hpp"
#include "prevalence/errors.hpp"

namespace prevalence {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

}  // namespace detail

inline Sample read_sample(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_allowed = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = detail::trim(line);
        if (text.empty() || text.front() == '#') continue;
        if (header_allowed && text == "x") {
            header_allowed = false;
            continue;
        }
        header_allowed = false;

        std::string_view number = text;
        if (!number.empty() && number.front() == '+') number.remove_prefix(1);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), v);
        if (ec != std::errc() || end != number.data() + number.size())
            throw ParseError("line " + std::to_string(line_no) + ": not a number: '" + std::string(text) + "'", line_no);
        if (!std::isfinite(v))
            throw ParseError("line " + std::to_string(line_no) + ": value is not finite", line_no);
        values.push_back(v);
    }
    if (in.bad()) throw IoError("read error");
    if (values.empty()) throw IoError("sample file contains no values");
    return Sample(std::move(values));
}

inline Sample read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sample file: " + path);
    return read_sample(in);
}

}  // namespace prevalence
