#include "pdestab/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace pdestab {

namespace {

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  std::size_t start = (t[0] == '+') ? 1 : 0;
  const char* first = t.data() + start;
  const char* last = t.data() + t.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

TomlValue parse_value(const std::string& raw, int line, int col) {
  TomlValue v;
  v.line = line;
  v.col = col;
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("missing value", line, col);
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw ConfigError("unterminated string", line, col);
    v.type = TomlValue::Type::string;
    v.str = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.type = TomlValue::Type::boolean;
    v.boolean = s == "true";
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']')
      throw ConfigError("arrays must close on the same line", line, col);
    const std::string inner = trim(s.substr(1, s.size() - 2));
    if (inner.empty()) {
      v.type = TomlValue::Type::array_number;
      return v;
    }
    std::vector<std::string> parts;
    std::string cur;
    bool in_string = false;
    for (char c : inner) {
      if (c == '"') in_string = !in_string;
      if (c == ',' && !in_string) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    const bool strings = trim(parts[0]).front() == '"';
    v.type = strings ? TomlValue::Type::array_string : TomlValue::Type::array_number;
    for (auto& part : parts) {
      const std::string p = trim(part);
      if (p.empty()) throw ConfigError("empty array element", line, col);
      if (strings) {
        if (p.front() != '"' || p.back() != '"' || p.size() < 2)
          throw ConfigError("expected a quoted string in array", line, col);
        v.strs.push_back(p.substr(1, p.size() - 2));
      } else {
        double num = 0.0;
        if (!parse_number(p, num))
          throw ConfigError("expected a number in array: '" + p + "'", line, col);
        v.nums.push_back(num);
      }
    }
    return v;
  }
  double num = 0.0;
  if (parse_number(s, num)) {
    v.type = TomlValue::Type::number;
    v.num = num;
    return v;
  }
  throw ConfigError("unrecognized value '" + s + "'", line, col);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
      return false;
  return true;
}

}  // namespace

TomlDoc parse_toml(const std::string& text) {
  TomlDoc doc;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header", lineno, 1);
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section))
        throw ConfigError("malformed section name '" + section + "'", lineno, 1);
      doc[section];  // sections may be empty
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value'", lineno, 1);
    const std::string key = trim(line.substr(0, eq));
    if (!valid_key(key) || key.find('.') != std::string::npos)
      throw ConfigError("malformed key '" + key + "'", lineno, 1);
    const int col = static_cast<int>(raw.find('=')) + 2;
    if (doc[section].count(key))
      throw ConfigError("duplicate key '" + key + "'", lineno, 1);
    doc[section][key] = parse_value(line.substr(eq + 1), lineno, col);
  }
  return doc;
}

namespace {

class SectionReader {
 public:
  SectionReader(const TomlDoc& doc, const std::string& name, bool required)
      : name_(name) {
    auto it = doc.find(name);
    if (it == doc.end()) {
      if (required) throw ConfigError("missing required section [" + name + "]");
      present_ = false;
    } else {
      values_ = &it->second;
      present_ = true;
    }
  }

  bool present() const { return present_; }

  const TomlValue* get(const std::string& key) {
    used_.insert(key);
    if (!present_) return nullptr;
    auto it = values_->find(key);
    return it == values_->end() ? nullptr : &it->second;
  }

  double number(const std::string& key, std::optional<double> fallback = {}) {
    const TomlValue* v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "' in [" + name_ + "]");
    }
    if (v->type != TomlValue::Type::number)
      throw ConfigError("key '" + key + "' must be a number", v->line, v->col);
    return v->num;
  }

  std::optional<double> opt_number(const std::string& key) {
    const TomlValue* v = get(key);
    if (!v) return std::nullopt;
    if (v->type != TomlValue::Type::number)
      throw ConfigError("key '" + key + "' must be a number", v->line, v->col);
    return v->num;
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = {}) {
    const TomlValue* v = get(key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError("missing required key '" + key + "' in [" + name_ + "]");
    }
    if (v->type != TomlValue::Type::string)
      throw ConfigError("key '" + key + "' must be a string", v->line, v->col);
    return v->str;
  }

  std::optional<std::string> opt_string(const std::string& key) {
    const TomlValue* v = get(key);
    if (!v) return std::nullopt;
    if (v->type != TomlValue::Type::string)
      throw ConfigError("key '" + key + "' must be a string", v->line, v->col);
    return v->str;
  }

  std::vector<double> numbers(const std::string& key, bool required = false) {
    const TomlValue* v = get(key);
    if (!v) {
      if (required)
        throw ConfigError("missing required key '" + key + "' in [" + name_ + "]");
      return {};
    }
    if (v->type == TomlValue::Type::number) return {v->num};
    if (v->type != TomlValue::Type::array_number)
      throw ConfigError("key '" + key + "' must be an array of numbers", v->line, v->col);
    return v->nums;
  }

  std::vector<std::string> strings(const std::string& key, bool required = false) {
    const TomlValue* v = get(key);
    if (!v) {
      if (required)
        throw ConfigError("missing required key '" + key + "' in [" + name_ + "]");
      return {};
    }
    if (v->type == TomlValue::Type::string) return {v->str};
    if (v->type != TomlValue::Type::array_string)
      throw ConfigError("key '" + key + "' must be an array of strings", v->line, v->col);
    return v->strs;
  }

  void reject_unknown() {
    if (!present_) return;
    for (const auto& [key, value] : *values_)
      if (!used_.count(key))
        throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", value.line,
                          value.col);
  }

 private:
  std::string name_;
  const std::map<std::string, TomlValue>* values_ = nullptr;
  bool present_ = false;
  std::set<std::string> used_;
};

Expr parse_expr_for(const std::string& source, const std::vector<std::string>& vars,
                    const std::string& key, const TomlValue* loc) {
  try {
    return Expr::parse(source, vars);
  } catch (const ExprError& e) {
    throw ConfigError("in expression for '" + key + "' (offset " +
                          (e.offset() == ExprError::npos ? std::string("?")
                                                         : std::to_string(e.offset())) +
                          "): " + e.what(),
                      loc ? loc->line : 0, loc ? loc->col : 0);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  const TomlDoc doc = parse_toml(text);
  const std::set<std::string> known_sections = {
      "problem", "problem.declared_bounds", "grid",   "time",
      "solver",  "thresholds",              "certify", "output"};
  for (const auto& [name, kv] : doc)
    if (!known_sections.count(name)) {
      int line = kv.empty() ? 0 : kv.begin()->second.line;
      throw ConfigError("unknown section [" + name + "]", line, 1);
    }

  RunConfig rc;

  {
    SectionReader p(doc, "problem", true);
    const auto tv = time_vars();
    const auto zv = z_vars();
    const auto av = a_vars();
    auto expr_key = [&](const std::string& key, const std::vector<std::string>& vars,
                        std::optional<std::string> fallback = {}) {
      const TomlValue* loc = p.get(key);
      std::string src = loc ? (loc->type == TomlValue::Type::string
                                   ? loc->str
                                   : throw ConfigError("key '" + key + "' must be a string",
                                                        loc->line, loc->col))
                            : (fallback ? *fallback
                                        : throw ConfigError("missing required key '" + key +
                                                            "' in [problem]"));
      return parse_expr_for(src, vars, key, loc);
    };
    rc.problem.eps = expr_key("eps", tv);
    rc.problem.C = expr_key("C", tv);
    rc.problem.a = expr_key("a", av);
    rc.problem.F = expr_key("F", zv);
    rc.problem.F_z = expr_key("F_z", zv);
    if (p.opt_string("eps_dot")) rc.problem.eps_dot = expr_key("eps_dot", tv);
    if (p.opt_string("eps_ddot")) rc.problem.eps_ddot = expr_key("eps_ddot", tv);
    if (p.opt_string("C_dot")) rc.problem.C_dot = expr_key("C_dot", tv);
    if (p.opt_string("F_antideriv")) rc.problem.F_antideriv = expr_key("F_antideriv", zv);
    rc.problem.a_prime = p.number("a_prime");
    rc.problem.k = p.number("k");
    rc.problem.h = p.number("h");
    rc.problem.A = p.number("A");
    rc.problem.omega = p.number("omega");
    rc.problem.rho = p.number("rho");
    rc.problem.mu = p.number("mu");
    rc.problem.tau = p.number("tau");
    p.reject_unknown();
  }
  {
    SectionReader b(doc, "problem.declared_bounds", false);
    rc.problem.declared.eps_inf = b.opt_number("eps_inf");
    rc.problem.declared.eps_ddot_inf = b.opt_number("eps_ddot_inf");
    rc.problem.declared.C_inf = b.opt_number("C_inf");
    rc.problem.declared.g_sup = b.opt_number("g_sup");
    if (auto cls = b.opt_string("g_growth")) {
      auto& g = rc.problem.declared.growth;
      if (*cls == "bounded") g.cls = GrowthDecl::Class::bounded;
      else if (*cls == "sublinear") g.cls = GrowthDecl::Class::sublinear;
      else if (*cls == "linear") g.cls = GrowthDecl::Class::linear;
      else if (*cls == "other") g.cls = GrowthDecl::Class::other;
      else throw ConfigError("g_growth must be one of bounded|sublinear|linear|other");
    }
    rc.problem.declared.growth.K = b.number("g_K", 0.0);
    rc.problem.declared.growth.Kprime = b.number("g_Kprime", 0.0);
    rc.problem.declared.growth.Kpp = b.number("g_Kpp", 0.0);
    rc.problem.declared.growth.power = b.number("g_power", 0.0);
    b.reject_unknown();
  }
  {
    SectionReader g(doc, "grid", true);
    const double n = g.number("n_interior");
    rc.n_interior = static_cast<int>(n);
    if (rc.n_interior != n || rc.n_interior < 3 || rc.n_interior % 2 == 0)
      throw ConfigError("grid.n_interior must be an odd integer >= 3");
    g.reject_unknown();
  }
  {
    SectionReader t(doc, "time", true);
    rc.dt = t.number("dt");
    rc.t_end = t.number("t_end");
    rc.t0 = t.number("t0", 0.0);
    if (!(rc.dt > 0.0)) throw ConfigError("time.dt must be positive");
    t.reject_unknown();
  }
  {
    SectionReader s(doc, "solver", false);
    rc.solver.picard_tol = s.number("picard_tol", 1e-10);
    rc.solver.picard_max = static_cast<int>(s.number("picard_max", 50.0));
    rc.solver.max_halvings = static_cast<int>(s.number("max_halvings", 10.0));
    s.reject_unknown();
  }
  {
    SectionReader t(doc, "thresholds", false);
    rc.thresholds.theta_margin = t.number("theta_margin", 0.5);
    rc.thresholds.scan.horizon = t.number("scan_horizon", 1e3);
    rc.thresholds.scan.samples = static_cast<int>(t.number("scan_samples", 4096.0));
    rc.thresholds.s_horizon = t.number("s_horizon", 1e3);
    rc.thresholds.s_samples = static_cast<int>(t.number("s_samples", 4096.0));
    rc.thresholds.xi_default = t.number("xi_default", 1.0);
    t.reject_unknown();
  }
  {
    SectionReader c(doc, "certify", false);
    rc.sigmas = c.numbers("sigma");
    rc.t0s = c.numbers("t0");
    if (rc.t0s.empty()) rc.t0s = {rc.t0};
    const auto u0s = c.strings("shape_u0");
    const auto u1s = c.strings("shape_u1");
    if (u0s.size() != u1s.size())
      throw ConfigError("certify.shape_u0 and certify.shape_u1 must have equal length");
    for (std::size_t i = 0; i < u0s.size(); ++i) rc.shapes.push_back({u0s[i], u1s[i]});
    if (rc.shapes.empty()) rc.shapes.push_back({"sin(x)", "0"});
    rc.d0_target = c.number("d0_target", 0.0);
    rc.nu = c.number("nu", 0.0);
    rc.certify_horizon = c.number("horizon", 0.0);
    rc.xi_fraction = c.number("xi_fraction", 0.5);
    if (!(rc.xi_fraction > 0.0) || !(rc.xi_fraction < 1.0))
      throw ConfigError("certify.xi_fraction must lie in ]0, 1[");
    c.reject_unknown();
  }
  {
    SectionReader o(doc, "output", false);
    rc.output.directory = o.string("directory", std::string("out"));
    auto fmts = o.strings("formats");
    if (!fmts.empty()) rc.output.formats = fmts;
    rc.output.snapshot_times = o.numbers("snapshot_times");
    rc.output.csv_stride = static_cast<int>(o.number("csv_stride", 1.0));
    if (rc.output.csv_stride < 1) throw ConfigError("output.csv_stride must be >= 1");
    o.reject_unknown();
  }
  // shape expressions must parse now, not at certification time
  for (const auto& [u0, u1] : rc.shapes) {
    const auto xv = shape_vars();
    parse_expr_for(u0, xv, "shape_u0", nullptr);
    parse_expr_for(u1, xv, "shape_u1", nullptr);
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

CertifyOptions RunConfig::certify_options(std::size_t sigma_index, std::size_t t0_index,
                                          std::size_t shape_index) const {
  CertifyOptions o;
  if (sigmas.empty()) throw ConfigError("certify.sigma is required for this command");
  o.sigma = sigmas.at(sigma_index);
  o.t0 = t0s.at(t0_index);
  o.u0 = shapes.at(shape_index).first;
  o.u1 = shapes.at(shape_index).second;
  o.d0_target = d0_target;
  o.nu = nu;
  o.horizon = certify_horizon;
  o.n_interior = n_interior;
  o.dt = dt;
  o.xi_fraction = xi_fraction;
  o.solver = solver;
  o.thresholds = thresholds;
  return o;
}

}  // namespace pdestab
