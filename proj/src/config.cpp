#include "fracsys/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "fracsys/errors.hpp"

namespace fracsys {

namespace {

class Ctx {
 public:
  explicit Ctx(std::string name) : name_(std::move(name)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const YAML::Mark mk = at.Mark();
    fail(mk.line, mk.column, msg);
  }
  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    std::ostringstream os;
    os << name_;
    if (line >= 0) os << ":" << line + 1 << ":" << col + 1;
    os << ": " << msg;
    throw Error(ErrorKind::Validation, os.str());
  }

  void keys(const YAML::Node& map, const std::string& what, const std::set<std::string>& allowed) const {
    if (!map.IsMap()) fail(map, what + " must be a mapping");
    for (const auto& kv : map) {
      const std::string k = kv.first.as<std::string>();
      if (!allowed.count(k)) fail(kv.first, "unknown key '" + k + "' in " + what);
    }
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    const std::string s = n.Scalar();
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      fail(n, what + ": '" + s + "' is not a number");
    }
    if (used != s.size() || !std::isfinite(v)) fail(n, what + ": '" + s + "' is not a finite number");
    return v;
  }

  long integer(const YAML::Node& n, const std::string& what) const {
    static const std::regex re("[+-]?[0-9]+");
    if (!n.IsScalar() || !std::regex_match(n.Scalar(), re)) fail(n, what + " must be an integer");
    return std::stol(n.Scalar());
  }

  cplx complex(const YAML::Node& n, const std::string& what) const {
    if (n.IsSequence()) {
      if (n.size() != 2) fail(n, what + " must be a number or a [re, im] pair");
      return {number(n[0], what), number(n[1], what)};
    }
    return number(n, what);
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    return n.Scalar();
  }

 private:
  std::string name_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// decimal spelling that never reads back as an integer
std::string fmt_decimal(double v) {
  std::string s = fmt(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt_complex(cplx c) {
  if (c.imag() == 0.0) return fmt(c.real());
  return "[" + fmt(c.real()) + ", " + fmt(c.imag()) + "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

const std::set<std::string> kMethods{"auto", "series", "commensurate", "rational",
                                     "triangular", "talbot", "adams"};

void parse_system(const Ctx& cx, const YAML::Node& sys, RunConfig& c) {
  cx.keys(sys, "system", {"mode", "orders", "matrix", "initial", "forcing"});
  if (sys["mode"]) {
    const std::string m = cx.text(sys["mode"], "system.mode");
    if (m == "caputo")
      c.mode = Mode::Caputo;
    else if (m == "rl")
      c.mode = Mode::RL;
    else
      cx.fail(sys["mode"], "system.mode must be 'caputo' or 'rl'");
  }

  const YAML::Node orders = sys["orders"];
  if (!orders) cx.fail(sys, "system.orders is required");
  if (!orders.IsSequence() || orders.size() == 0) cx.fail(orders, "system.orders must be a non-empty list");
  static const std::regex frac(R"(\s*([0-9]+)\s*/\s*([0-9]+)\s*)");
  static const std::regex whole(R"(\s*[0-9]+\s*)");
  std::vector<std::pair<long, long>> exact;
  std::vector<double> values;
  bool all_exact = true;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const YAML::Node o = orders[i];
    const std::string what = "system.orders[" + std::to_string(i) + "]";
    if (!o.IsScalar()) cx.fail(o, what + " must be a number or a 'q/p' string");
    std::smatch mt;
    const std::string s = o.Scalar();
    long num = 0, den = 0;
    double v = 0.0;
    if (std::regex_match(s, mt, frac)) {
      num = std::stol(mt[1]);
      den = std::stol(mt[2]);
      if (den == 0) cx.fail(o, what + " has a zero denominator");
      v = static_cast<double>(num) / static_cast<double>(den);
    } else if (std::regex_match(s, whole)) {
      num = std::stol(s);
      den = 1;
      v = static_cast<double>(num);
    } else {
      v = cx.number(o, what);
      all_exact = false;
    }
    if (!(v > 0.0 && v <= 1.0)) cx.fail(o, what + " = " + s + " must lie in (0,1]");
    values.push_back(v);
    exact.emplace_back(num, den);
  }
  c.orders = all_exact ? MultiOrder::rational(exact) : MultiOrder(values);
  const std::size_t m = values.size();

  const YAML::Node mat = sys["matrix"];
  if (!mat) cx.fail(sys, "system.matrix is required");
  if (!mat.IsSequence() || mat.size() != m)
    cx.fail(mat, "system.matrix must have " + std::to_string(m) + " rows");
  c.matrix = Mat(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const YAML::Node row = mat[i];
    if (!row.IsSequence() || row.size() != m)
      cx.fail(row, "system.matrix row " + std::to_string(i + 1) + " must have " + std::to_string(m) + " entries");
    for (std::size_t k = 0; k < m; ++k)
      c.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          cx.complex(row[k], "system.matrix[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }

  const YAML::Node init = sys["initial"];
  if (!init) cx.fail(sys, "system.initial is required");
  if (!init.IsSequence() || init.size() != m)
    cx.fail(init, "system.initial must have " + std::to_string(m) + " entries");
  c.initial = Vec(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    c.initial(static_cast<Eigen::Index>(i)) = cx.complex(init[i], "system.initial[" + std::to_string(i) + "]");

  c.forcing.clear();
  if (const YAML::Node fr = sys["forcing"]) {
    if (!fr.IsSequence() || fr.size() != m)
      cx.fail(fr, "system.forcing must have " + std::to_string(m) + " expressions");
    for (std::size_t i = 0; i < m; ++i) {
      const YAML::Node e = fr[i];
      try {
        c.forcing.push_back(ForcingExpr::parse(cx.text(e, "system.forcing[" + std::to_string(i) + "]")));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::Validation) throw;
        std::string msg = err.what();
        const std::string prefix = std::string(kind_name(ErrorKind::Validation)) + ": ";
        if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
        cx.fail(e, msg);
      }
    }
  }
}

void parse_solve(const Ctx& cx, const YAML::Node& s, RunConfig& c) {
  cx.keys(s, "solve", {"method", "t_max", "steps", "truncation", "tolerance", "fallback_tolerance", "adams_refine"});
  if (s["method"]) {
    c.method = cx.text(s["method"], "solve.method");
    if (!kMethods.count(c.method)) cx.fail(s["method"], "unknown solve.method '" + c.method + "'");
  }
  if (s["t_max"]) {
    c.t_max = cx.number(s["t_max"], "solve.t_max");
    if (!(c.t_max > 0.0)) cx.fail(s["t_max"], "solve.t_max must be positive");
  }
  if (s["steps"]) {
    long n = cx.integer(s["steps"], "solve.steps");
    if (n < 2) cx.fail(s["steps"], "solve.steps must be at least 2");
    c.steps = static_cast<std::size_t>(n);
  }
  if (s["truncation"]) {
    const YAML::Node k = s["truncation"];
    if (k.IsScalar() && k.Scalar() == "auto") {
      c.truncation = -1;
    } else {
      long v = cx.integer(k, "solve.truncation");
      if (v < 0) cx.fail(k, "solve.truncation must be 'auto' or a non-negative level");
      c.truncation = static_cast<int>(v);
    }
  }
  if (s["tolerance"]) {
    c.tolerance = cx.number(s["tolerance"], "solve.tolerance");
    if (!(c.tolerance > 0.0)) cx.fail(s["tolerance"], "solve.tolerance must be positive");
  }
  if (s["fallback_tolerance"]) {
    c.fallback_tolerance = cx.number(s["fallback_tolerance"], "solve.fallback_tolerance");
    if (!(c.fallback_tolerance > 0.0))
      cx.fail(s["fallback_tolerance"], "solve.fallback_tolerance must be positive");
  }
  if (s["adams_refine"]) {
    long r = cx.integer(s["adams_refine"], "solve.adams_refine");
    if (r < 1 || r > 64) cx.fail(s["adams_refine"], "solve.adams_refine must lie in [1, 64]");
    c.adams_refine = static_cast<int>(r);
  }
}

void parse_output(const Ctx& cx, const YAML::Node& o, RunConfig& c) {
  cx.keys(o, "output", {"directory", "trajectory", "report", "format"});
  if (o["directory"]) c.out_dir = cx.text(o["directory"], "output.directory");
  if (o["trajectory"]) c.trajectory_file = cx.text(o["trajectory"], "output.trajectory");
  if (o["report"]) c.report_file = cx.text(o["report"], "output.report");
  if (o["format"]) {
    c.format = cx.text(o["format"], "output.format");
    if (c.format != "csv") cx.fail(o["format"], "output.format must be 'csv'");
  }
}

}  // namespace

SystemSpec RunConfig::spec() const {
  SystemSpec s;
  s.orders = orders;
  s.matrix = matrix;
  s.initial = initial;
  s.mode = mode;
  if (has_forcing()) {
    const auto f = forcing;
    s.forcing = [f](double t) {
      Vec v(static_cast<Eigen::Index>(f.size()));
      for (std::size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i](t);
      return v;
    };
  }
  return s;
}

bool RunConfig::has_forcing() const {
  for (const auto& f : forcing)
    if (!f.is_zero()) return true;
  return false;
}

RunConfig parse_config(const std::string& text, const std::string& name) {
  const Ctx cx(name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    cx.fail(e.mark.line, e.mark.column, e.msg);
  }
  if (!root.IsMap()) cx.fail(-1, 0, "configuration must be a mapping with a 'system' section");
  RunConfig c;
  try {
    cx.keys(root, "configuration", {"system", "solve", "output"});
    if (!root["system"]) cx.fail(root, "missing 'system' section");
    parse_system(cx, root["system"], c);
    if (root["solve"]) parse_solve(cx, root["solve"], c);
    if (root["output"]) parse_output(cx, root["output"], c);
    if (c.method == "commensurate" && !c.orders.all_equal())
      cx.fail(root["solve"]["method"], "method 'commensurate' needs equal orders");
    if (c.method == "rational" && !c.orders.is_rational())
      cx.fail(root["solve"]["method"], "method 'rational' needs exact 'q/p' orders");
    if (c.method == "adams" && c.mode != Mode::Caputo)
      cx.fail(root["solve"]["method"], "method 'adams' integrates Caputo systems only");
  } catch (const YAML::Exception& e) {
    cx.fail(e.mark.line, e.mark.column, e.msg);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Validation, path + ": cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  const int m = c.orders.size();
  os << "system:\n";
  os << "  mode: " << (c.mode == Mode::Caputo ? "caputo" : "rl") << "\n";
  os << "  orders: [";
  for (int i = 0; i < m; ++i) {
    if (i) os << ", ";
    if (c.orders.is_rational()) {
      const auto [q, p] = c.orders.exact[static_cast<std::size_t>(i)];
      os << quote(std::to_string(q) + "/" + std::to_string(p));
    } else {
      os << fmt_decimal(c.orders[i]);
    }
  }
  os << "]\n  matrix:\n";
  for (int i = 0; i < m; ++i) {
    os << "    - [";
    for (int k = 0; k < m; ++k) os << (k ? ", " : "") << fmt_complex(c.matrix(i, k));
    os << "]\n";
  }
  os << "  initial: [";
  for (int i = 0; i < m; ++i) os << (i ? ", " : "") << fmt_complex(c.initial(i));
  os << "]\n";
  if (!c.forcing.empty()) {
    os << "  forcing: [";
    for (std::size_t i = 0; i < c.forcing.size(); ++i) os << (i ? ", " : "") << quote(c.forcing[i].source());
    os << "]\n";
  }
  os << "solve:\n";
  os << "  method: " << c.method << "\n";
  os << "  t_max: " << fmt(c.t_max) << "\n";
  os << "  steps: " << c.steps << "\n";
  os << "  truncation: " << (c.truncation < 0 ? std::string("auto") : std::to_string(c.truncation)) << "\n";
  os << "  tolerance: " << fmt(c.tolerance) << "\n";
  os << "  fallback_tolerance: " << fmt(c.fallback_tolerance) << "\n";
  os << "  adams_refine: " << c.adams_refine << "\n";
  os << "output:\n";
  os << "  directory: " << quote(c.out_dir) << "\n";
  os << "  trajectory: " << quote(c.trajectory_file) << "\n";
  os << "  report: " << quote(c.report_file) << "\n";
  os << "  format: " << c.format << "\n";
  return os.str();
}

bool equivalent(const RunConfig& a, const RunConfig& b) {
  if (a.mode != b.mode || a.orders.values != b.orders.values || a.orders.exact != b.orders.exact) return false;
  if (a.matrix.rows() != b.matrix.rows() || a.matrix != b.matrix || a.initial != b.initial) return false;
  if (a.forcing.size() != b.forcing.size()) return false;
  for (std::size_t i = 0; i < a.forcing.size(); ++i)
    if (a.forcing[i].source() != b.forcing[i].source()) return false;
  return a.method == b.method && a.t_max == b.t_max && a.steps == b.steps &&
         a.truncation == b.truncation && a.tolerance == b.tolerance &&
         a.fallback_tolerance == b.fallback_tolerance && a.adams_refine == b.adams_refine &&
         a.out_dir == b.out_dir && a.trajectory_file == b.trajectory_file &&
         a.report_file == b.report_file && a.format == b.format;
}

}  // namespace fracsys
