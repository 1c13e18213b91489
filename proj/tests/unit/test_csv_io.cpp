#include "ridgeboot/csv_io.hpp"
#include "ridgeboot/errors.hpp"
#include "ridgeboot/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace ridgeboot;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ridgeboot_test_" + name)).string();
}

}  // namespace

TEST_CASE("matrix CSV round-trips exactly at 17 significant digits") {
  Rng rng(1);
  Matrix M(7, 4);
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) M(i, j) = rng.normal() * std::pow(10.0, i - 3);
  }
  M(0, 0) = 1.0 / 3.0;
  M(1, 1) = -0.0;
  const std::string path = temp_path("matrix.csv");
  write_matrix_csv(path, M);
  const Matrix back = read_matrix_csv(path);
  REQUIRE(back.rows() == M.rows());
  REQUIRE(back.cols() == M.cols());
  CHECK((back.array() == M.array()).all());
}

TEST_CASE("vector CSV accepts one row or one column") {
  const std::string col = temp_path("col.csv");
  const std::string row = temp_path("row.csv");
  std::ofstream(col) << "1\n2.5\n-3\n";
  std::ofstream(row) << "1,2.5,-3\n";
  const Vector a = read_vector_csv(col);
  const Vector b = read_vector_csv(row);
  REQUIRE(a.size() == 3);
  CHECK(a.isApprox(b));
  CHECK(a(1) == 2.5);
}

TEST_CASE("malformed CSV input is rejected with named errors") {
  const std::string ragged = temp_path("ragged.csv");
  const std::string junk = temp_path("junk.csv");
  std::ofstream(ragged) << "1,2\n3\n";
  std::ofstream(junk) << "1,abc\n";
  CHECK_THROWS_AS(read_matrix_csv(ragged), InputError);
  CHECK_THROWS_AS(read_matrix_csv(junk), InputError);
  CHECK_THROWS_AS(read_matrix_csv(temp_path("does_not_exist.csv")), IoError);
}

TEST_CASE("format_double prints round-trippable text") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 7.0)) == 1.0 / 7.0);
}
