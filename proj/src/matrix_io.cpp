#include "flashsample/matrix_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "flashsample/errors.hpp"

namespace flashsample::io {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                              static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw ShapeError("truncated matrix file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_matrix_bin(std::ostream& os, const Matrix<float>& m) {
  if (m.rows() > std::numeric_limits<std::uint32_t>::max() || m.cols() > std::numeric_limits<std::uint32_t>::max()) {
    throw ContractError("matrix too large for the 32-bit header");
  }
  put_u32(os, kMatrixMagic);
  put_u32(os, kMatrixVersion);
  put_u32(os, static_cast<std::uint32_t>(m.rows()));
  put_u32(os, static_cast<std::uint32_t>(m.cols()));
  for (float x : m.data()) put_u32(os, std::bit_cast<std::uint32_t>(x));
  if (!os) throw Error("failed writing matrix");
}

Matrix<float> read_matrix_bin(std::istream& is) {
  if (get_u32(is) != kMatrixMagic) throw ShapeError("not a matrix file (bad magic)");
  const std::uint32_t version = get_u32(is);
  if (version != kMatrixVersion) throw ShapeError("unsupported matrix file version " + std::to_string(version));
  const std::size_t rows = get_u32(is);
  const std::size_t cols = get_u32(is);
  std::vector<float> data(rows * cols);
  for (float& x : data) x = std::bit_cast<float>(get_u32(is));
  return Matrix<float>(rows, cols, std::move(data));
}

void write_matrix_bin(const std::filesystem::path& path, const Matrix<float>& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  write_matrix_bin(os, m);
}

Matrix<float> read_matrix_bin(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  return read_matrix_bin(is);
}

void write_matrix_csv(std::ostream& os, const Matrix<float>& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      char buf[32];
      // shortest representation that round-trips
      const auto res = std::to_chars(buf, buf + sizeof buf, m(r, c));
      if (c > 0) os << ',';
      os.write(buf, res.ptr - buf);
    }
    os << '\n';
  }
}

Matrix<float> read_matrix_csv(std::istream& is) {
  std::vector<float> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t n = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      float v = 0.0f;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw ShapeError("bad CSV cell '" + cell + "' on line " + std::to_string(rows + 1));
      }
      data.push_back(v);
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) throw ShapeError("ragged CSV: line " + std::to_string(rows + 1));
    ++rows;
  }
  return Matrix<float>(rows, cols, std::move(data));
}

}  // namespace flashsample::io
