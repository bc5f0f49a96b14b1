#pragma once

#include <stdexcept>
#include <string>

namespace sarf {

// Input data or configuration violates a documented contract.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Remote endpoint failed, or returned an error payload.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sarf
