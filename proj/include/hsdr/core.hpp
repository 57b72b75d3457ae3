#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsdr {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

// Error taxonomy. Library code throws these; the CLI maps them onto exit
// codes (2 = bad input/config, 3 = numerical, 4 = IO).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct DegenerateData : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct InvalidTarget : Error { using Error::Error; };
struct DegenerateScores : Error { using Error::Error; };
struct MissingClass : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Malformed binary payloads report where in the stream parsing failed.
struct FormatError : Error {
  std::uint64_t byte_offset;
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
};

namespace detail {

// splitmix64 step; used to derive independent substream seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

}  // namespace hsdr
