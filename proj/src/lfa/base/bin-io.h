// lfa/base/bin-io.h
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
//
// Little-endian binary stream helpers for the "LF??" container formats.
// Byte order is written out explicitly so archives are portable across
// hosts. Read failures throw CorruptArchive.

#ifndef LFA_BASE_BIN_IO_H_
#define LFA_BASE_BIN_IO_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

namespace lfa {

void WriteBytes(std::ostream& os, const void* data, std::size_t size);
void WriteU32(std::ostream& os, uint32_t v);
void WriteU64(std::ostream& os, uint64_t v);
void WriteI32(std::ostream& os, int32_t v);
void WriteDouble(std::ostream& os, double v);
void WriteString(std::ostream& os, const std::string& s);
// Row-major double payload preceded by u32 rows, u32 cols.
void WriteMatrix(std::ostream& os, const Eigen::MatrixXd& m);
void WriteVector(std::ostream& os, const Eigen::VectorXd& v);

void ReadBytes(std::istream& is, void* data, std::size_t size);
uint32_t ReadU32(std::istream& is);
uint64_t ReadU64(std::istream& is);
int32_t ReadI32(std::istream& is);
double ReadDouble(std::istream& is);
std::string ReadString(std::istream& is);
Eigen::MatrixXd ReadMatrix(std::istream& is);
Eigen::VectorXd ReadVector(std::istream& is);

// Four ASCII magic bytes, e.g. "LFG1".
void WriteMagic(std::ostream& os, const char magic[5]);
// Throws CorruptArchive naming both magics on mismatch.
void ExpectMagic(std::istream& is, const char magic[5]);

// Serializes with `write_payload`, appends an FNV-1a checksum of the
// payload, and writes magic + payload + checksum to `path`.
// LoadChecked verifies the trailer before handing the payload back.
void SaveWithChecksum(const std::string& path, const char magic[5],
                      const std::string& payload);
std::string LoadChecked(const std::string& path, const char magic[5]);

}  // namespace lfa

#endif  // LFA_BASE_BIN_IO_H_
