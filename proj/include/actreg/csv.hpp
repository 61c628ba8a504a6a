#pragma once

#include <string>
#include <vector>

#include "actreg/types.hpp"

namespace actreg {

// Numeric CSV, no header row, '.' decimal separator regardless of locale.
// Values round-trip exactly (shortest representation that parses back to
// the same double).

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

Vector read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Vector& v);

std::string format_real(Real x);

}  // namespace actreg
