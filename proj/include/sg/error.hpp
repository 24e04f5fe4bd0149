#ifndef SG_ERROR_HPP
#define SG_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace sg {

// Library error with a stable machine-readable code ("invalid-dimension",
// "selection-impossible", ...) plus a human-readable detail message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace sg

#endif  // SG_ERROR_HPP
