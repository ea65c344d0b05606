#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "mist/errors.hpp"
#include "mist/matrix.hpp"

namespace mist::io {

namespace detail {

inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string loc(const std::filesystem::path& p, std::size_t line) {
  return p.string() + ":" + std::to_string(line);
}

inline void lower(std::string& s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

}  // namespace detail

/// Writes A in Matrix Market array format (dense, column-major entries,
/// one per line, 17 significant digits so values round-trip bit-exactly).
inline void write_matrix_market(const DenseMatrix& a,
                                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << " " << a.cols() << "\n";
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      out << detail::fmt17(a(i, j)) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline DenseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw IoError("empty file: " + path.string());
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    detail::lower(object);
    detail::lower(format);
    detail::lower(field);
    detail::lower(symmetry);
    if (banner != "%%MatrixMarket" || object != "matrix")
      throw IoError("not a Matrix Market file at " + detail::loc(path, lineno));
    if (format != "array" || (field != "real" && field != "double") ||
        symmetry != "general")
      throw IoError("unsupported Matrix Market type '" + line + "' at " +
                    detail::loc(path, lineno) +
                    " (expected: array real general)");
  }
  do {
    if (!std::getline(in, line))
      throw IoError("missing size line in " + path.string());
    ++lineno;
  } while (!line.empty() && line[0] == '%');

  std::size_t rows = 0, cols = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> rows >> cols) || rows == 0 || cols == 0)
      throw IoError("bad size line at " + detail::loc(path, lineno));
  }
  DenseMatrix a(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) {
      double v;
      if (!(in >> v))
        throw IoError("expected " + std::to_string(rows * cols) +
                      " entries, file ended early: " + path.string());
      a(i, j) = v;
    }
  return a;
}

/// One value per line; the reader also accepts comma- or
/// whitespace-separated values.
inline void write_vector_csv(const Vector& v,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (double x : v) out << detail::fmt17(x) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline Vector read_vector_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Vector v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ss(line);
    double x;
    while (ss >> x) v.push_back(x);
    if (!ss.eof()) {
      std::string rest;
      ss.clear();
      ss >> rest;
      if (!rest.empty())
        throw IoError("bad value '" + rest + "' at " + detail::loc(path, lineno));
    }
  }
  return v;
}

}  // namespace mist::io
