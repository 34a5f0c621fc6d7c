#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssdu/types.hpp"

namespace ssdu {

// Little-endian record container, file extension .ssdu:
//   "SSDU" | version:u32 | record-count:u32
//   per record: name-len:u16 | name | dtype:u8 | ndim:u8 | dims:u64[ndim] | payload
//   crc64:u64 over every preceding byte (CRC-64/XZ)
// dtype codes: 1 = f64, 2 = c128 (f64 re,im pairs), 3 = bool (bit-packed,
// LSB first in row-major order), 4 = u64, 5 = utf-8 bytes.
namespace dtype {
constexpr uint8_t kF64 = 1;
constexpr uint8_t kC128 = 2;
constexpr uint8_t kBool = 3;
constexpr uint8_t kU64 = 4;
constexpr uint8_t kStr = 5;
}  // namespace dtype

struct Record {
  std::string name;
  uint8_t dt = 0;
  std::vector<uint64_t> dims;
  std::vector<uint8_t> payload;

  uint64_t numel() const {
    uint64_t n = 1;
    for (uint64_t d : dims) n *= d;
    return n;
  }
};

struct DatasetContainer {
  uint32_t version = 1;
  std::vector<Record> records;

  void add_f64(const std::string& name, std::vector<uint64_t> dims, const double* data);
  void add_c128(const std::string& name, std::vector<uint64_t> dims, const cplx* data);
  void add_bool(const std::string& name, std::vector<uint64_t> dims, const uint8_t* flags);
  void add_u64(const std::string& name, std::vector<uint64_t> dims, const uint64_t* data);
  void add_str(const std::string& name, const std::string& value);
  void add_scalar_f64(const std::string& name, double v) { add_f64(name, {}, &v); }
  void add_scalar_u64(const std::string& name, uint64_t v) { add_u64(name, {}, &v); }

  bool has(const std::string& name) const;
  const Record& require(const std::string& name) const;

  std::vector<double> get_f64(const std::string& name) const;
  std::vector<cplx> get_c128(const std::string& name) const;
  std::vector<uint8_t> get_bool(const std::string& name) const;  // unpacked 0/1
  std::vector<uint64_t> get_u64(const std::string& name) const;
  std::string get_str(const std::string& name) const;
  double get_scalar_f64(const std::string& name) const;
  uint64_t get_scalar_u64(const std::string& name) const;
};

uint64_t crc64_xz(const uint8_t* data, size_t len, uint64_t crc = 0);

std::vector<uint8_t> serialize_container(const DatasetContainer& c);
DatasetContainer parse_container(const std::vector<uint8_t>& bytes);

void write_dataset(const std::string& path, const DatasetContainer& c);
DatasetContainer read_dataset(const std::string& path);

}  // namespace ssdu
