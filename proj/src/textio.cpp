#include "mrseql/textio.hpp"

#include <charconv>
#include <cmath>

#include "mrseql/error.hpp"

namespace mrseql::textio {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("cannot parse '" + std::string(s) + "'");
    return v;
}

long long parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("cannot parse integer '" + std::string(s) + "'");
    }
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::string_view find_value(std::string_view line, std::string_view key) {
    for (auto field : split(line, ' ')) {
        if (field.size() > key.size() && field.substr(0, key.size()) == key && field[key.size()] == '=') {
            return field.substr(key.size() + 1);
        }
    }
    throw FormatError("missing '" + std::string(key) + "' in: " + std::string(line));
}

}  // namespace mrseql::textio

#include <istream>

namespace mrseql::textio {

std::vector<Section> read_sections(std::istream& in) {
    std::vector<Section> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw FormatError("unterminated section header: " + line);
            out.push_back({line.substr(1, line.size() - 2), {}});
            continue;
        }
        if (out.empty()) out.push_back({"", {}});
        out.back().lines.push_back(line);
    }
    return out;
}

}  // namespace mrseql::textio
