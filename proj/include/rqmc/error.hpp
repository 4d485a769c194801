#pragma once

#include <stdexcept>
#include <string>

namespace rqmc {

// Every failure raised by the library. The message is the contract; callers
// match on it in tests and the CLI prints it verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rqmc
