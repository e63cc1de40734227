#pragma once
#include <string>

#include "choqlab/config.hpp"

namespace choq::cli {

struct Context {
  RunConfig config;
  std::string out_dir;
  int threads = 1;
};

// Each returns the process exit code: 0 ok, 1 a checked inequality failed.
// Config, numeric and degeneracy errors propagate as exceptions.
int cmd_verify(const Context& ctx);
int cmd_constants(const Context& ctx);
int cmd_threshold(const Context& ctx);
int cmd_ground_state(const Context& ctx);
int cmd_translate(const Context& ctx);
int cmd_energy_curve(const Context& ctx);

}  // namespace choq::cli
