#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace anneal {

// Bad arguments: dimension mismatch, out-of-domain lambda, invalid config.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A non-finite value appeared during an iteration. Carries where it happened.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t iteration,
                 std::optional<std::size_t> particle = std::nullopt)
      : std::runtime_error(what), iteration_(iteration), particle_(particle) {}

  std::size_t iteration() const noexcept { return iteration_; }
  std::optional<std::size_t> particle() const noexcept { return particle_; }

 private:
  std::size_t iteration_;
  std::optional<std::size_t> particle_;
};

}  // namespace anneal
