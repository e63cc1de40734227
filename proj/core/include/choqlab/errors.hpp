#pragma once
#include <stdexcept>
#include <string>

namespace choq {

// Bad input: out-of-range parameters, mismatched grids, unknown config keys.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to converge.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ray t -> J(t u) never turns negative (u^+ vanishes or is too weak).
class DegenerateDirection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural hypotheses were not checked (or failed) for the model in use.
class UnverifiedHypothesis : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace choq
