#ifndef TASEP_ERRORS_HPP
#define TASEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tasep {

// thrown when a request exceeds a configured size cap (state space, N!, 2^N)
struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// thrown when a numeric procedure cannot reach its accuracy target
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tasep

#endif
