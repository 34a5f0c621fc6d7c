#include "ssdu/container.hpp"

#include <array>
#include <cstdio>
#include <cstring>

#include "ssdu/errors.hpp"

namespace ssdu {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'D', 'U'};

// CRC-64/XZ: reflected polynomial 0xC96C5795D7870F42, init and xorout all
// ones. Check value: crc64_xz("123456789") == 0x995DC9BBDF1939FA.
const std::array<uint64_t, 256>& crc_table() {
  static const std::array<uint64_t, 256> table = [] {
    std::array<uint64_t, 256> t{};
    for (uint64_t i = 0; i < 256; ++i) {
      uint64_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? (c >> 1) ^ 0xC96C5795D7870F42ull : c >> 1;
      t[size_t(i)] = c;
    }
    return t;
  }();
  return table;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v & 0xFF));
  out.push_back(uint8_t(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xFF));
}

struct Cursor {
  const uint8_t* p;
  size_t left;
  void need(size_t n) const {
    if (left < n) throw FormatError("container: truncated file");
  }
  uint16_t u16() {
    need(2);
    uint16_t v = uint16_t(p[0]) | uint16_t(p[1]) << 8;
    p += 2;
    left -= 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
    p += 4;
    left -= 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= uint64_t(p[i]) << (8 * i);
    p += 8;
    left -= 8;
    return v;
  }
  void bytes(uint8_t* dst, size_t n) {
    need(n);
    std::memcpy(dst, p, n);
    p += n;
    left -= n;
  }
};

size_t payload_bytes(uint8_t dt, uint64_t numel) {
  switch (dt) {
    case dtype::kF64:
      return size_t(numel) * 8;
    case dtype::kC128:
      return size_t(numel) * 16;
    case dtype::kBool:
      return size_t((numel + 7) / 8);
    case dtype::kU64:
      return size_t(numel) * 8;
    case dtype::kStr:
      return size_t(numel);
    default:
      throw FormatError("container: unknown dtype code " + std::to_string(int(dt)));
  }
}

uint64_t f64_bits(double v) {
  uint64_t b;
  std::memcpy(&b, &v, 8);
  return b;
}

double bits_f64(uint64_t b) {
  double v;
  std::memcpy(&v, &b, 8);
  return v;
}

}  // namespace

uint64_t crc64_xz(const uint8_t* data, size_t len, uint64_t crc) {
  const auto& t = crc_table();
  crc = ~crc;
  for (size_t i = 0; i < len; ++i) crc = t[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return ~crc;
}

void DatasetContainer::add_f64(const std::string& name, std::vector<uint64_t> dims,
                               const double* data) {
  Record r;
  r.name = name;
  r.dt = dtype::kF64;
  r.dims = std::move(dims);
  const uint64_t n = r.numel();
  r.payload.reserve(size_t(n) * 8);
  for (uint64_t i = 0; i < n; ++i) put_u64(r.payload, f64_bits(data[i]));
  records.push_back(std::move(r));
}

void DatasetContainer::add_c128(const std::string& name, std::vector<uint64_t> dims,
                                const cplx* data) {
  Record r;
  r.name = name;
  r.dt = dtype::kC128;
  r.dims = std::move(dims);
  const uint64_t n = r.numel();
  r.payload.reserve(size_t(n) * 16);
  for (uint64_t i = 0; i < n; ++i) {
    put_u64(r.payload, f64_bits(data[i].real()));
    put_u64(r.payload, f64_bits(data[i].imag()));
  }
  records.push_back(std::move(r));
}

void DatasetContainer::add_bool(const std::string& name, std::vector<uint64_t> dims,
                                const uint8_t* flags) {
  Record r;
  r.name = name;
  r.dt = dtype::kBool;
  r.dims = std::move(dims);
  const uint64_t n = r.numel();
  r.payload.assign(size_t((n + 7) / 8), 0);
  for (uint64_t i = 0; i < n; ++i)
    if (flags[i]) r.payload[size_t(i / 8)] |= uint8_t(1u << (i % 8));
  records.push_back(std::move(r));
}

void DatasetContainer::add_u64(const std::string& name, std::vector<uint64_t> dims,
                               const uint64_t* data) {
  Record r;
  r.name = name;
  r.dt = dtype::kU64;
  r.dims = std::move(dims);
  const uint64_t n = r.numel();
  r.payload.reserve(size_t(n) * 8);
  for (uint64_t i = 0; i < n; ++i) put_u64(r.payload, data[i]);
  records.push_back(std::move(r));
}

void DatasetContainer::add_str(const std::string& name, const std::string& value) {
  Record r;
  r.name = name;
  r.dt = dtype::kStr;
  r.dims = {value.size()};
  r.payload.assign(value.begin(), value.end());
  records.push_back(std::move(r));
}

bool DatasetContainer::has(const std::string& name) const {
  for (const Record& r : records)
    if (r.name == name) return true;
  return false;
}

const Record& DatasetContainer::require(const std::string& name) const {
  for (const Record& r : records)
    if (r.name == name) return r;
  throw FormatError("container: missing record '" + name + "'");
}

std::vector<double> DatasetContainer::get_f64(const std::string& name) const {
  const Record& r = require(name);
  if (r.dt != dtype::kF64) throw FormatError("container: '" + name + "' is not f64");
  const uint64_t n = r.numel();
  std::vector<double> out(static_cast<size_t>(n));
  Cursor c{r.payload.data(), r.payload.size()};
  for (uint64_t i = 0; i < n; ++i) out[size_t(i)] = bits_f64(c.u64());
  return out;
}

std::vector<cplx> DatasetContainer::get_c128(const std::string& name) const {
  const Record& r = require(name);
  if (r.dt != dtype::kC128) throw FormatError("container: '" + name + "' is not c128");
  const uint64_t n = r.numel();
  std::vector<cplx> out(static_cast<size_t>(n));
  Cursor c{r.payload.data(), r.payload.size()};
  for (uint64_t i = 0; i < n; ++i) {
    double re = bits_f64(c.u64());
    double im = bits_f64(c.u64());
    out[size_t(i)] = cplx(re, im);
  }
  return out;
}

std::vector<uint8_t> DatasetContainer::get_bool(const std::string& name) const {
  const Record& r = require(name);
  if (r.dt != dtype::kBool) throw FormatError("container: '" + name + "' is not bool");
  const uint64_t n = r.numel();
  std::vector<uint8_t> out(static_cast<size_t>(n));
  for (uint64_t i = 0; i < n; ++i)
    out[size_t(i)] = (r.payload[size_t(i / 8)] >> (i % 8)) & 1u;
  return out;
}

std::vector<uint64_t> DatasetContainer::get_u64(const std::string& name) const {
  const Record& r = require(name);
  if (r.dt != dtype::kU64) throw FormatError("container: '" + name + "' is not u64");
  const uint64_t n = r.numel();
  std::vector<uint64_t> out(static_cast<size_t>(n));
  Cursor c{r.payload.data(), r.payload.size()};
  for (uint64_t i = 0; i < n; ++i) out[size_t(i)] = c.u64();
  return out;
}

std::string DatasetContainer::get_str(const std::string& name) const {
  const Record& r = require(name);
  if (r.dt != dtype::kStr) throw FormatError("container: '" + name + "' is not a string");
  return std::string(r.payload.begin(), r.payload.end());
}

double DatasetContainer::get_scalar_f64(const std::string& name) const {
  auto v = get_f64(name);
  if (v.size() != 1) throw FormatError("container: '" + name + "' is not a scalar");
  return v[0];
}

uint64_t DatasetContainer::get_scalar_u64(const std::string& name) const {
  auto v = get_u64(name);
  if (v.size() != 1) throw FormatError("container: '" + name + "' is not a scalar");
  return v[0];
}

std::vector<uint8_t> serialize_container(const DatasetContainer& c) {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, c.version);
  put_u32(out, uint32_t(c.records.size()));
  for (const Record& r : c.records) {
    if (r.name.size() > 0xFFFF) throw FormatError("container: record name too long");
    put_u16(out, uint16_t(r.name.size()));
    out.insert(out.end(), r.name.begin(), r.name.end());
    out.push_back(r.dt);
    if (r.dims.size() > 0xFF) throw FormatError("container: too many dims");
    out.push_back(uint8_t(r.dims.size()));
    for (uint64_t d : r.dims) put_u64(out, d);
    if (r.payload.size() != payload_bytes(r.dt, r.numel()))
      throw FormatError("container: payload length mismatch for '" + r.name + "'");
    out.insert(out.end(), r.payload.begin(), r.payload.end());
  }
  put_u64(out, crc64_xz(out.data(), out.size()));
  return out;
}

DatasetContainer parse_container(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 20) throw FormatError("container: file too small");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("container: bad magic");
  const uint64_t stored = [&] {
    Cursor c{bytes.data() + bytes.size() - 8, 8};
    return c.u64();
  }();
  const uint64_t computed = crc64_xz(bytes.data(), bytes.size() - 8);
  if (stored != computed) throw FormatError("container: checksum mismatch");

  Cursor c{bytes.data() + 4, bytes.size() - 12};  // body between magic and crc
  DatasetContainer out;
  out.version = c.u32();
  if (out.version != 1)
    throw FormatError("container: unsupported version " + std::to_string(out.version));
  const uint32_t count = c.u32();
  out.records.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    Record r;
    const uint16_t name_len = c.u16();
    r.name.resize(name_len);
    c.bytes(reinterpret_cast<uint8_t*>(r.name.data()), name_len);
    c.need(2);
    r.dt = c.p[0];
    const uint8_t ndim = c.p[1];
    c.p += 2;
    c.left -= 2;
    r.dims.resize(ndim);
    for (uint8_t d = 0; d < ndim; ++d) r.dims[d] = c.u64();
    const size_t nbytes = payload_bytes(r.dt, r.numel());
    r.payload.resize(nbytes);
    c.bytes(r.payload.data(), nbytes);
    out.records.push_back(std::move(r));
  }
  if (c.left != 0) throw FormatError("container: trailing bytes after records");
  return out;
}

void write_dataset(const std::string& path, const DatasetContainer& c) {
  const std::vector<uint8_t> bytes = serialize_container(c);
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw FormatError("container: cannot open '" + path + "' for writing");
  const size_t written = std::fwrite(bytes.data(), 1, bytes.size(), f);
  const int rc = std::fclose(f);
  if (written != bytes.size() || rc != 0)
    throw FormatError("container: short write to '" + path + "'");
}

DatasetContainer read_dataset(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw FormatError("container: cannot open '" + path + "'");
  std::fseek(f, 0, SEEK_END);
  const long sz = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> bytes(size_t(sz > 0 ? sz : 0));
  const size_t got = std::fread(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
  if (got != bytes.size()) throw FormatError("container: short read from '" + path + "'");
  return parse_container(bytes);
}

}  // namespace ssdu
