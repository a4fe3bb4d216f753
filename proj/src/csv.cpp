#include "delaylab/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include "delaylab/error.hpp"

namespace delaylab::csv {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  if (s == "nan") return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::IoError, "not a number: '" + std::string(s) + "'");
  return v;
}

long long parse_long(std::string_view s) {
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::IoError, "not an integer: '" + std::string(s) + "'");
  return v;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoError, "cannot rename onto " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix(const ComplexMatrix& a, std::ostream& out) {
  out << a.rows() << ',' << a.cols() << '\n';
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_double(a(i, j).real()) << ',' << format_double(a(i, j).imag());
    }
    out << '\n';
  }
}

ComplexMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "matrix file is empty");
  const auto header = split(line);
  if (header.size() != 2) throw Error(ErrorCode::IoError, "matrix header must be rows,cols");
  const long long rows = parse_long(header[0]);
  const long long cols = parse_long(header[1]);
  if (rows < 0 || cols < 0) throw Error(ErrorCode::IoError, "negative matrix dimension");

  ComplexMatrix a(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    do {
      if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "matrix file ends before row " + std::to_string(i));
    } while (trim(line).empty());
    const auto fields = split(line);
    if (static_cast<long long>(fields.size()) != 2 * cols)
      throw Error(ErrorCode::IoError, "row " + std::to_string(i) + " needs " + std::to_string(2 * cols) + " fields");
    for (long long j = 0; j < cols; ++j)
      a(i, j) = Complex(parse_double(fields[2 * j]), parse_double(fields[2 * j + 1]));
  }
  return a;
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& a) {
  std::ostringstream ss;
  write_matrix(a, ss);
  write_atomic(path, ss.str());
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  return read_matrix(in);
}

}  // namespace delaylab::csv
