#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "clutter/types.hpp"

namespace clutter {

// Matrix container: header of three little-endian unsigned 64-bit integers
// (rows, cols, flags) followed by row-major 64-bit floats; flag bit 0 marks
// complex data, stored as interleaved real/imaginary pairs.
void write_complex_matrix(const std::filesystem::path& path, const CMatrix& m);
void write_real_matrix(const std::filesystem::path& path, const RMatrix& m);
CMatrix read_complex_matrix(const std::filesystem::path& path);
RMatrix read_real_matrix(const std::filesystem::path& path);

// Round-trip-exact decimal rendering of a double ('.' separator).
std::string format_double(double v);

// CSV file with a single "# config_hash=<16 hex digits>" comment line, then
// a header row; every row is '\n'-terminated.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::uint64_t config_hash,
            const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

std::string hash_hex(std::uint64_t value);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace clutter
