// lfa/base/bin-io.cc
//
// Copyright 2026 The lfadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfa/base/bin-io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lfa/base/common.h"
#include "lfa/base/rng.h"

namespace lfa {

void WriteBytes(std::ostream& os, const void* data, std::size_t size) {
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!os) throw Error("binary write failed");
}

void WriteU32(std::ostream& os, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  WriteBytes(os, b, 4);
}

void WriteU64(std::ostream& os, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  WriteBytes(os, b, 8);
}

void WriteI32(std::ostream& os, int32_t v) {
  WriteU32(os, static_cast<uint32_t>(v));
}

void WriteDouble(std::ostream& os, double v) {
  WriteU64(os, std::bit_cast<uint64_t>(v));
}

void WriteString(std::ostream& os, const std::string& s) {
  WriteU32(os, static_cast<uint32_t>(s.size()));
  if (!s.empty()) WriteBytes(os, s.data(), s.size());
}

void WriteMatrix(std::ostream& os, const Eigen::MatrixXd& m) {
  WriteU32(os, static_cast<uint32_t>(m.rows()));
  WriteU32(os, static_cast<uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) WriteDouble(os, m(r, c));
}

void WriteVector(std::ostream& os, const Eigen::VectorXd& v) {
  WriteU32(os, static_cast<uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) WriteDouble(os, v(i));
}

void ReadBytes(std::istream& is, void* data, std::size_t size) {
  is.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
  if (static_cast<std::size_t>(is.gcount()) != size)
    throw CorruptArchive("truncated read");
}

uint32_t ReadU32(std::istream& is) {
  unsigned char b[4];
  ReadBytes(is, b, 4);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t ReadU64(std::istream& is) {
  unsigned char b[8];
  ReadBytes(is, b, 8);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

int32_t ReadI32(std::istream& is) { return static_cast<int32_t>(ReadU32(is)); }

double ReadDouble(std::istream& is) {
  return std::bit_cast<double>(ReadU64(is));
}

std::string ReadString(std::istream& is) {
  const uint32_t n = ReadU32(is);
  if (n > (1u << 26)) throw CorruptArchive("unreasonable string length");
  std::string s(n, '\0');
  if (n > 0) ReadBytes(is, s.data(), n);
  return s;
}

Eigen::MatrixXd ReadMatrix(std::istream& is) {
  const uint32_t rows = ReadU32(is);
  const uint32_t cols = ReadU32(is);
  if (static_cast<uint64_t>(rows) * cols > (1ull << 28))
    throw CorruptArchive("unreasonable matrix shape");
  Eigen::MatrixXd m(rows, cols);
  for (uint32_t r = 0; r < rows; ++r)
    for (uint32_t c = 0; c < cols; ++c) m(r, c) = ReadDouble(is);
  return m;
}

Eigen::VectorXd ReadVector(std::istream& is) {
  const uint32_t n = ReadU32(is);
  if (n > (1u << 28)) throw CorruptArchive("unreasonable vector length");
  Eigen::VectorXd v(n);
  for (uint32_t i = 0; i < n; ++i) v(i) = ReadDouble(is);
  return v;
}

void WriteMagic(std::ostream& os, const char magic[5]) {
  WriteBytes(os, magic, 4);
}

void ExpectMagic(std::istream& is, const char magic[5]) {
  char got[5] = {0, 0, 0, 0, 0};
  ReadBytes(is, got, 4);
  if (std::memcmp(got, magic, 4) != 0)
    throw CorruptArchive(std::string("bad magic: expected ") + magic +
                         ", got " + got);
}

void SaveWithChecksum(const std::string& path, const char magic[5],
                      const std::string& payload) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  WriteMagic(os, magic);
  WriteU64(os, payload.size());
  WriteBytes(os, payload.data(), payload.size());
  WriteU64(os, Fnv1a64(payload.data(), payload.size()));
  os.flush();
  if (!os) throw Error("write failed: " + path);
}

std::string LoadChecked(const std::string& path, const char magic[5]) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for reading: " + path);
  ExpectMagic(is, magic);
  const uint64_t size = ReadU64(is);
  if (size > (1ull << 32)) throw CorruptArchive("unreasonable payload size");
  std::string payload(size, '\0');
  if (size > 0) ReadBytes(is, payload.data(), size);
  const uint64_t want = ReadU64(is);
  const uint64_t got = Fnv1a64(payload.data(), payload.size());
  if (want != got)
    throw CorruptArchive("checksum mismatch in " + path);
  return payload;
}

}  // namespace lfa
