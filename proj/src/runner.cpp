#include "fracsys/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "fracsys/errors.hpp"
#include "fracsys/oracles.hpp"
#include "fracsys/solver_core.hpp"

namespace fracsys {

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

nlohmann::json order_list(const RunConfig& c) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < c.orders.size(); ++i) {
    if (c.orders.is_rational()) {
      auto [q, p] = c.orders.exact[static_cast<std::size_t>(i)];
      a.push_back(std::to_string(q) + "/" + std::to_string(p));
    } else {
      a.push_back(c.orders[i]);
    }
  }
  return a;
}

}  // namespace

std::string choose_method(const RunConfig& c) {
  if (c.method != "auto") return c.method;
  if (is_lower_triangular(c.matrix) || is_upper_triangular(c.matrix)) return "triangular";
  if (c.orders.all_equal()) return "commensurate";
  if (c.orders.is_rational() && reduce_rational(c.orders).p <= 64) return "rational";
  return "series";
}

Trajectory solve_config(const RunConfig& c, const std::string& method) {
  const SystemSpec spec = c.spec();
  spec.validate();
  const auto grid = uniform_grid(c.t_max, c.steps);
  if (method == "series") {
    SeriesSolveOptions o;
    o.fixed_k = c.truncation;
    o.rel_tol = c.tolerance;
    o.fallback_tol = c.fallback_tolerance;
    return solve_series(spec, grid, o);
  }
  if (method == "commensurate") return solve_commensurate(spec, grid);
  if (method == "rational") return solve_rational(spec, grid);
  if (method == "triangular") return solve_triangular(spec, grid);
  if (method == "talbot")
    return duhamel(spec, talbot_operator(spec.orders.values, spec.matrix, spec.mode, grid));
  if (method == "adams") return adams_pc(spec, grid, c.adams_refine);
  throw Error(ErrorKind::InvalidArgument, "unknown method '" + method + "'");
}

void write_csv(const Trajectory& tr, std::ostream& out) {
  const int m = tr.dim();
  out << "t";
  for (int j = 1; j <= m; ++j) out << ",re(u" << j << "),im(u" << j << ")";
  out << '\n';
  for (std::size_t i = 0; i < tr.grid.size(); ++i) {
    put(out, tr.grid[i]);
    for (int j = 0; j < m; ++j) {
      out << ',';
      put(out, tr.states[i](j).real());
      out << ',';
      put(out, tr.states[i](j).imag());
    }
    out << '\n';
  }
}

int run(const RunRequest& req, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(req.config_path);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 1;
  }
  if (req.dump_config) {
    out << dump_config(cfg);
    return 0;
  }
  if (!req.out_dir.empty()) cfg.out_dir = req.out_dir;

  nlohmann::json report;
  report["requested_method"] = cfg.method;
  report["mode"] = mode_name(cfg.mode);
  report["orders"] = order_list(cfg);
  report["t_max"] = cfg.t_max;
  report["steps"] = cfg.steps;
  try {
    const std::string method = choose_method(cfg);
    Trajectory tr = solve_config(cfg, method);
    report["method"] = tr.method;
    report["truncation"] = tr.truncation;
    report["error_estimate"] = tr.error_estimate;
    report["warnings"] = tr.warnings;
    report["info"] = tr.info;

    if (req.verify) {
      nlohmann::json v;
      std::vector<std::pair<std::string, Trajectory>> runs;
      runs.emplace_back(method, tr);
      if (method != "talbot") runs.emplace_back("talbot", solve_config(cfg, "talbot"));
      if (cfg.mode == Mode::Caputo) {
        if (method != "adams") runs.emplace_back("adams", solve_config(cfg, "adams"));
      } else {
        v["skipped"].push_back("adams: Caputo systems only");
      }
      nlohmann::json pairs = nlohmann::json::array();
      for (std::size_t a = 0; a < runs.size(); ++a)
        for (std::size_t b = a + 1; b < runs.size(); ++b)
          pairs.push_back({{"a", runs[a].first},
                           {"b", runs[b].first},
                           {"max_deviation", max_deviation(runs[a].second, runs[b].second)}});
      v["pairs"] = pairs;
      report["verify"] = v;
    }

    std::filesystem::create_directories(cfg.out_dir);
    const auto dir = std::filesystem::path(cfg.out_dir);
    {
      std::ofstream f(dir / cfg.trajectory_file, std::ios::binary);
      if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + (dir / cfg.trajectory_file).string());
      write_csv(tr, f);
    }
    {
      std::ofstream f(dir / cfg.report_file, std::ios::binary);
      if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + (dir / cfg.report_file).string());
      f << report.dump(2) << '\n';
    }
    out << "method " << tr.method << ", " << tr.grid.size() << " points -> "
        << (dir / cfg.trajectory_file).string() << '\n';
    for (const auto& w : tr.warnings) err << "warning: " << w << '\n';
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace fracsys
