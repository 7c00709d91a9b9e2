#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iew/cli.hpp"

namespace iew::cli {

namespace {

const std::set<std::string> known_kinds = {"fredholm2", "volterra",   "firstkind", "riemann",        "wiener_hopf",
                                           "estimation", "nonlinear", "scatter_single", "scatter_many",
                                           "effective_medium"};

std::string type_name(const Json& j) { return j.type_name(); }

}  // namespace

Fields::Fields(const Json& object, std::string path) : json_(&object), path_(std::move(path)) {
  if (!object.is_object())
    throw ConfigError((path_.empty() ? std::string("config") : path_) + ": expected an object, found " +
                      type_name(object));
}

bool Fields::has(const std::string& key) const { return json_->contains(key); }

const Json& Fields::raw(const std::string& key) {
  if (!has(key)) throw ConfigError(where(key) + ": required field missing");
  used_.insert(key);
  return json_->at(key);
}

double Fields::number(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_number()) throw ConfigError(where(key) + ": expected a number, found " + type_name(v));
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where(key) + ": must be finite");
  return d;
}

double Fields::number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

int Fields::integer(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer, found " + type_name(v));
  return v.get<int>();
}

int Fields::integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

std::string Fields::string(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_string()) throw ConfigError(where(key) + ": expected a string, found " + type_name(v));
  return v.get<std::string>();
}

std::string Fields::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

bool Fields::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false, found " + type_name(v));
  return v.get<bool>();
}

cplx Fields::complex(const std::string& key, cplx fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (v.is_number()) return number(key);
  Fields f(v, where(key));
  const cplx out(f.number("re", 0.0), f.number("im", 0.0));
  f.finish();
  return out;
}

Vec3 Fields::vec3(const std::string& key, const Vec3& fallback) {
  if (!has(key)) return fallback;
  const Json& v = raw(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(where(key) + ": expected an array of three numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[static_cast<std::size_t>(i)].is_number()) throw ConfigError(where(key) + ": entries must be numbers");
    out[i] = v[static_cast<std::size_t>(i)].get<double>();
  }
  return out;
}

std::vector<double> Fields::numbers(const std::string& key) {
  const Json& v = raw(key);
  if (!v.is_array()) throw ConfigError(where(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& e : v) {
    if (!e.is_number()) throw ConfigError(where(key) + ": entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Fields Fields::object(const std::string& key) { return Fields(raw(key), where(key)); }

void Fields::finish() const {
  for (auto it = json_->begin(); it != json_->end(); ++it)
    if (!used_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown field");
}

// ---------------------------------------------------------------------------

FunctionSpec FunctionSpec::parse(const Json& value, const std::string& path) {
  FunctionSpec spec;
  if (value.is_number()) {
    spec.terms_.push_back({"constant", value.get<double>(), 0.0});
    return spec;
  }
  auto one = [&](const Json& j, const std::string& at) {
    Fields f(j, at);
    Term t;
    t.name = f.string("name");
    t.c = cplx(f.number("c", 1.0), f.number("c_im", 0.0));
    if (t.name == "constant") {
    } else if (t.name == "monomial") {
      t.p = f.integer("p");
      if (t.p < 0) throw ConfigError(f.where("p") + ": must be non-negative");
    } else if (t.name == "cos" || t.name == "sin" || t.name == "cosh" || t.name == "sinh") {
      t.p = f.number("w", 1.0);
    } else if (t.name == "exp") {
      t.p = f.number("r", 1.0);
    } else {
      throw ConfigError(f.where("name") + ": unknown function '" + t.name +
                        "' (constant, monomial, cos, sin, cosh, sinh, exp)");
    }
    f.finish();
    spec.terms_.push_back(t);
  };
  if (value.is_array()) {
    if (value.empty()) throw ConfigError(path + ": function needs at least one term");
    for (std::size_t i = 0; i < value.size(); ++i) one(value[i], path + "[" + std::to_string(i) + "]");
  } else {
    one(value, path);
  }
  return spec;
}

cplx FunctionSpec::eval(double x, int order) const {
  cplx sum = 0.0;
  for (const Term& t : terms_) {
    const double w = t.p;
    double v = 0.0;
    if (t.name == "constant") {
      v = order == 0 ? 1.0 : 0.0;
    } else if (t.name == "monomial") {
      const int p = static_cast<int>(w);
      if (order > p) v = 0.0;
      else {
        double coef = 1.0;
        for (int i = 0; i < order; ++i) coef *= p - i;
        v = coef * std::pow(x, p - order);
      }
    } else if (t.name == "cos") {
      v = order == 0 ? std::cos(w * x) : order == 1 ? -w * std::sin(w * x) : -w * w * std::cos(w * x);
    } else if (t.name == "sin") {
      v = order == 0 ? std::sin(w * x) : order == 1 ? w * std::cos(w * x) : -w * w * std::sin(w * x);
    } else if (t.name == "cosh") {
      v = order == 1 ? w * std::sinh(w * x) : std::pow(w, order) * std::cosh(w * x);
    } else if (t.name == "sinh") {
      v = order == 1 ? w * std::cosh(w * x) : std::pow(w, order) * std::sinh(w * x);
    } else if (t.name == "exp") {
      v = std::pow(w, order) * std::exp(w * x);
    }
    sum += t.c * v;
  }
  return sum;
}

ComplexFunction FunctionSpec::function() const {
  return [spec = *this](double x) { return spec.eval(x, 0); };
}

RealFunction FunctionSpec::real_part(int order) const {
  return [spec = *this, order](double x) { return spec.eval(x, order).real(); };
}

bool FunctionSpec::real_valued() const {
  for (const Term& t : terms_)
    if (t.c.imag() != 0.0) return false;
  return true;
}

// ---------------------------------------------------------------------------

void Table::add_row(std::vector<double> row) {
  if (row.size() != header.size()) throw Error("table row width does not match header");
  rows.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      const double v = row[i] == 0.0 ? 0.0 : row[i];  // drop the sign of -0
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

ProblemConfig parse_config(const std::string& text) {
  ProblemConfig cfg;
  try {
    cfg.document = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!cfg.document.is_object()) throw ConfigError("config: top level must be an object");
  if (!cfg.document.contains("kind")) throw ConfigError("kind: required field missing");
  if (!cfg.document["kind"].is_string()) throw ConfigError("kind: expected a string");
  cfg.kind = cfg.document["kind"].get<std::string>();
  if (!known_kinds.count(cfg.kind)) {
    std::string list;
    for (const auto& k : known_kinds) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError("kind: unknown problem kind '" + cfg.kind + "' (expected one of " + list + ")");
  }
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace iew::cli
