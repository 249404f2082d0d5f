#pragma once

// Weight matrices on disk. Binary: 16-byte header (magic "FSMW", version,
// rows, cols as little-endian uint32) then rows*cols little-endian float32.
// CSV: one matrix row per line, for tiny fixtures.

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "flashsample/tensor.hpp"

namespace flashsample::io {

inline constexpr std::uint32_t kMatrixMagic = 0x574D5346;  // "FSMW" read as LE bytes
inline constexpr std::uint32_t kMatrixVersion = 1;
inline constexpr std::size_t kMatrixHeaderBytes = 16;

void write_matrix_bin(std::ostream& os, const Matrix<float>& m);
Matrix<float> read_matrix_bin(std::istream& is);
void write_matrix_bin(const std::filesystem::path& path, const Matrix<float>& m);
Matrix<float> read_matrix_bin(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& os, const Matrix<float>& m);
Matrix<float> read_matrix_csv(std::istream& is);

}  // namespace flashsample::io
