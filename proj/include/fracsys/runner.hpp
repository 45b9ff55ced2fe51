#pragma once

#include <iosfwd>
#include <string>

#include "fracsys/config.hpp"

namespace fracsys {

struct RunRequest {
  std::string config_path;
  bool verify = false;
  bool dump_config = false;
  std::string out_dir;  // overrides output.directory when set
};

// auto: triangular, then commensurate, then rational with p <= 64, else series
std::string choose_method(const RunConfig& c);

// solve with the configured (or chosen) method on uniform_grid(t_max, steps)
Trajectory solve_config(const RunConfig& c, const std::string& method);

// t, re(u1), im(u1), ... with 17 significant digits
void write_csv(const Trajectory& tr, std::ostream& out);

// exit status: 0 ok, 1 configuration error, 2 solver error
int run(const RunRequest& req, std::ostream& out, std::ostream& err);

}  // namespace fracsys
