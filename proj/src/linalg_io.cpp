// mpfkit: multi-component extended-precision kernels
// Copyright 2026 The mpfkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpfkit/convert.hpp"
#include "mpfkit/linalg.hpp"

namespace mpfkit::linalg {
namespace {

constexpr char kMagic[4] = {'M', 'P', 'F', 'M'};
constexpr std::uint32_t kVersion = 1;
// sanity cap so corrupt headers fail before attempting a huge allocation
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 32;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const unsigned char* p, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{p[i]} << (8 * i);
  return v;
}

void write_plane_le(std::ofstream& f, const double* p, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    f.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * 8));
  } else {
    std::string buf;
    buf.reserve(n * 8);
    for (std::size_t i = 0; i < n; ++i)
      put_u64(buf, std::bit_cast<std::uint64_t>(p[i]));
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void read_plane_le(std::ifstream& f, double* p, std::size_t n,
                   const std::string& path) {
  std::vector<unsigned char> buf(n * 8);
  f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 8));
  if (static_cast<std::size_t>(f.gcount()) != n * 8) fail(path, "truncated");
  for (std::size_t i = 0; i < n; ++i)
    p[i] = std::bit_cast<double>(get_u64(buf.data() + i * 8, 8));
}

}  // namespace

template <int W>
void save_matrix_binary(const MPMatrix<W>& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) fail(path, "cannot open for writing");
  std::string hdr(kMagic, 4);
  put_u32(hdr, kVersion);
  hdr.push_back(static_cast<char>(W));
  put_u64(hdr, m.rows());
  put_u64(hdr, m.cols());
  put_u64(hdr, m.stride());
  f.write(hdr.data(), static_cast<std::streamsize>(hdr.size()));
  for (int w = 0; w < W; ++w)
    if (m.plane_size() > 0) write_plane_le(f, m.plane(w), m.plane_size());
  if (!f) fail(path, "write failed");
  f.close();
  if (!f) fail(path, "write failed");
}

template <int W>
MPMatrix<W> load_matrix_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(path, "cannot open");
  unsigned char hdr[33];
  f.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  if (static_cast<std::size_t>(f.gcount()) != sizeof(hdr)) fail(path, "truncated");
  if (std::memcmp(hdr, kMagic, 4) != 0) fail(path, "not an MPFM file");
  if (get_u64(hdr + 4, 4) != kVersion) fail(path, "unsupported version");
  if (hdr[8] != static_cast<unsigned char>(W))
    fail(path, "component width mismatch");
  const std::uint64_t rows = get_u64(hdr + 9, 8);
  const std::uint64_t cols = get_u64(hdr + 17, 8);
  const std::uint64_t stride = get_u64(hdr + 25, 8);
  if (rows > kMaxDim || cols > kMaxDim) fail(path, "implausible dimensions");
  if (stride != pad_columns(cols)) fail(path, "bad stride");
  MPMatrix<W> m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (int w = 0; w < W; ++w)
    if (m.plane_size() > 0) read_plane_le(f, m.plane(w), m.plane_size(), path);
  if (f.peek() != std::ifstream::traits_type::eof()) fail(path, "trailing data");
  // the stored pads must honor the +0 invariant
  for (int w = 0; w < W; ++w)
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = m.cols(); j < m.stride(); ++j)
        if (std::bit_cast<std::uint64_t>(m.plane(w)[i * m.stride() + j]) != 0)
          fail(path, "nonzero padding");
  return m;
}

template <int W>
void save_matrix_csv(const MPMatrix<W>& m, const std::string& path, int digits) {
  if (digits == 0) digits = mpf::default_decimal_digits<W>();
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(path, "cannot open for writing");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) f << ',';
      f << mpf::to_decimal_string(m.at(i, j), digits);
    }
    f << '\n';
  }
  if (!f) fail(path, "write failed");
}

template <int W>
MPMatrix<W> load_matrix_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(path, "cannot open");
  std::vector<std::vector<mpf::MultiDouble<W>>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && f.peek() == std::ifstream::traits_type::eof()) break;
    std::vector<mpf::MultiDouble<W>> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        row.push_back(mpf::from_decimal_string<W>(cell));
      } catch (const std::exception& e) {
        fail(path, "line " + std::to_string(lineno) + ": " + e.what());
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(path, "line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  const std::size_t nr = rows.size();
  const std::size_t nc = nr ? rows.front().size() : 0;
  MPMatrix<W> m(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) m.set(i, j, rows[i][j]);
  return m;
}

template void save_matrix_binary<2>(const MPMatrix<2>&, const std::string&);
template void save_matrix_binary<3>(const MPMatrix<3>&, const std::string&);
template void save_matrix_binary<4>(const MPMatrix<4>&, const std::string&);
template MPMatrix<2> load_matrix_binary<2>(const std::string&);
template MPMatrix<3> load_matrix_binary<3>(const std::string&);
template MPMatrix<4> load_matrix_binary<4>(const std::string&);
template void save_matrix_csv<2>(const MPMatrix<2>&, const std::string&, int);
template void save_matrix_csv<3>(const MPMatrix<3>&, const std::string&, int);
template void save_matrix_csv<4>(const MPMatrix<4>&, const std::string&, int);
template MPMatrix<2> load_matrix_csv<2>(const std::string&);
template MPMatrix<3> load_matrix_csv<3>(const std::string&);
template MPMatrix<4> load_matrix_csv<4>(const std::string&);

}  // namespace mpfkit::linalg
