#pragma once

#include <stdexcept>
#include <string>

namespace ssdu {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes: ConfigError -> 1, DataError/FormatError/DimensionError -> 2,
// NumericalError/GraphError -> 3.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Bad or inconsistent data at runtime: failed normalization, overlapping
// partitions, degenerate metric inputs.
struct DataError : Error {
  using Error::Error;
};

struct FormatError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct GraphError : Error {
  using Error::Error;
};

}  // namespace ssdu
