#pragma once

// Small CSV helpers shared by the trace, matrix and sweep writers, and the
// matrix file format: header "rows,cols", then one line per row holding
// re,im pairs.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "delaylab/types.hpp"

namespace delaylab::csv {

/// Round-trip exact decimal ("%.17g"); "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view line, char sep = ',');

/// Strict parsers; throw IoError on trailing garbage or empty input.
double parse_double(std::string_view s);
long long parse_long(std::string_view s);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

void write_matrix(const ComplexMatrix& a, std::ostream& out);
ComplexMatrix read_matrix(std::istream& in);

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& a);
ComplexMatrix load_matrix(const std::filesystem::path& path);

}  // namespace delaylab::csv
