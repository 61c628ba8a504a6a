#include "actreg/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "actreg/errors.hpp"

namespace actreg {

std::string format_real(Real x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  std::string s(buf, res.ptr);
  // to_chars emits "1" for 1.0; keep a decimal point so columns stay
  // unambiguous for downstream tools.
  if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
  return s;
}

namespace {

Real parse_field(const std::string& field, const std::string& path, std::size_t line) {
  const char* b = field.data();
  const char* e = b + field.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  Real value = 0;
  auto res = std::from_chars(b, e, value);
  if (res.ec != std::errc() || res.ptr != e)
    throw IoError(path + ":" + std::to_string(line) + ": malformed numeric field '" + field + "'");
  return value;
}

std::vector<std::vector<Real>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::vector<Real>> rows;
  std::string lineText;
  std::size_t lineNo = 0;
  while (std::getline(in, lineText)) {
    ++lineNo;
    if (!lineText.empty() && lineText.back() == '\r') lineText.pop_back();
    if (lineText.empty()) continue;
    std::vector<Real> row;
    std::stringstream ss(lineText);
    std::string field;
    while (std::getline(ss, field, ',')) row.push_back(parse_field(field, path, lineNo));
    if (lineText.back() == ',') row.push_back(parse_field("", path, lineNo));
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ":" + std::to_string(lineNo) + ": ragged row (" +
                    std::to_string(row.size()) + " fields, expected " +
                    std::to_string(rows.front().size()) + ")");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("'" + path + "' contains no data rows");
  return rows;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  auto rows = read_rows(path);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path + "' failed");
}

Vector read_vector_csv(const std::string& path) {
  Matrix m = read_matrix_csv(path);
  if (m.cols() != 1 && m.rows() != 1)
    throw IoError("'" + path + "' is not a single-column (or single-row) vector");
  if (m.cols() == 1) return m.col(0);
  return m.row(0).transpose();
}

void write_vector_csv(const std::string& path, const Vector& v) {
  write_matrix_csv(path, v);
}

}  // namespace actreg
