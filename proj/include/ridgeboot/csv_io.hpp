#pragma once

#include "ridgeboot/linmodel.hpp"

#include <string>

namespace ridgeboot {

/// Headerless CSV of decimal floats, one observation per row.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& M);

/// Reads a vector stored either as a single column or a single row.
Vector read_vector_csv(const std::string& path);
void write_vector_csv(const std::string& path, const Vector& v);

/// Shortest round-trip decimal text (17 significant digits).
std::string format_double(double x);

}  // namespace ridgeboot
