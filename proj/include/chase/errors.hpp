#pragma once

#include <stdexcept>
#include <string>

namespace chase {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct UnknownSensorError : Error {
  using Error::Error;
};

struct EmptySupportError : Error {
  using Error::Error;
};

struct SizeError : Error {
  using Error::Error;
};

struct NonFiniteError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace chase
