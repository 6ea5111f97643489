#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mrplan {

using VertexId = std::int32_t;
using RobotId = std::int32_t;

inline constexpr VertexId kNoVertex = -1;

// Thrown for malformed inputs: files, documents, instances, contract
// violations at module boundaries. The CLI maps it to the invalid-input
// exit code.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mrplan
