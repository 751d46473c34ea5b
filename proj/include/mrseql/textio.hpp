#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mrseql::textio {

/// Shortest text that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// "key=value" pairs separated by spaces; returns value or throws FormatError.
std::string_view find_value(std::string_view line, std::string_view key);

}  // namespace mrseql::textio

#include <iosfwd>

namespace mrseql::textio {

/// A "[header]" line and the non-empty lines up to the next header. Lines
/// before the first header form a section with an empty header.
struct Section {
    std::string header;
    std::vector<std::string> lines;
};

std::vector<Section> read_sections(std::istream& in);

}  // namespace mrseql::textio
