#include "clutter/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace clutter {

namespace {

constexpr std::uint64_t kComplexFlag = 1;

void put_u64(std::ofstream& out, std::uint64_t v) {
  std::array<char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), b.size());
}

std::uint64_t get_u64(std::ifstream& in) {
  std::array<unsigned char, 8> b;
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

void write_doubles(std::ofstream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void read_doubles(std::ifstream& in, double* data, std::size_t n) {
  in.read(reinterpret_cast<char*>(data),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("truncated matrix container");
}

}  // namespace

void write_complex_matrix(const std::filesystem::path& path, const CMatrix& m) {
  auto out = open_out(path);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  put_u64(out, kComplexFlag);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double pair[2] = {m(r, c).real(), m(r, c).imag()};
      write_doubles(out, pair, 2);
    }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void write_real_matrix(const std::filesystem::path& path, const RMatrix& m) {
  auto out = open_out(path);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  put_u64(out, 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      write_doubles(out, &v, 1);
    }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CMatrix read_complex_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  const auto flags = get_u64(in);
  if (!in || !(flags & kComplexFlag))
    throw std::runtime_error("not a complex matrix container: " +
                             path.string());
  CMatrix m(rows, cols);
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c) {
      double pair[2];
      read_doubles(in, pair, 2);
      m(r, c) = Complex(pair[0], pair[1]);
    }
  return m;
}

RMatrix read_real_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  const auto rows = get_u64(in);
  const auto cols = get_u64(in);
  const auto flags = get_u64(in);
  if (!in || (flags & kComplexFlag))
    throw std::runtime_error("not a real matrix container: " + path.string());
  RMatrix m(rows, cols);
  for (std::uint64_t r = 0; r < rows; ++r)
    for (std::uint64_t c = 0; c < cols; ++c) read_doubles(in, &m(r, c), 1);
  return m;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hash_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::uint64_t config_hash,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), n_columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  if (columns.empty()) throw std::invalid_argument("csv needs columns");
  out_ << "# config_hash=" << hash_hex(config_hash) << "\n";
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_)
    throw std::invalid_argument("csv row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("csv write failed");
}

}  // namespace clutter
