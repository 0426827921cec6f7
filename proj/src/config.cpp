#include "delab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "delab/estimate_auditor.hpp"

namespace delab {

ConfigError::ConfigError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line(line),
      column(column),
      message(message) {}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::ndjson: return "ndjson";
    case OutputFormat::both: return "both";
  }
  return "both";
}

bool AuditRequest::needs_seed() const {
  return id == "interpolation_a1" || id == "interpolation_inf" || id == "keyest" || id == "yudovich_pbound" ||
         id == "weight_lemmas" || id == "pressure_kernel";
}

bool AuditRequest::needs_checkpoints() const { return id == "enstrophy_balance" || id == "local_energy"; }

namespace {

struct Value {
  enum class Type { number, string, boolean, array } type = Type::number;
  double number = 0;
  bool integral = false;
  std::string text;  // string contents, or the integer literal
  bool boolean = false;
  std::vector<Value> items;
  int column = 0;
};

struct Entry {
  Value value;
  int line = 0, key_column = 0;
  bool used = false;
};

struct Section {
  int line = 0, column = 1;
  std::map<std::string, Entry> entries;
};

class Parser {
 public:
  Parser(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string line;
    int number = 0;
    Section* current = nullptr;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      line_ = line;
      lineno_ = number;
      pos_ = 0;
      skip_space();
      if (at_end_or_comment()) continue;
      if (line_[pos_] == '[') {
        current = &section_header();
        continue;
      }
      if (!current) fail(pos_, "key outside of any section");
      key_value(*current);
    }
  }

  std::map<std::string, Section>& sections() { return sections_; }
  const std::string& source() const { return source_; }

  [[noreturn]] void fail(std::size_t pos, const std::string& msg) const {
    throw ConfigError(source_, lineno_, static_cast<int>(pos) + 1, msg);
  }

 private:
  std::string source_, line_;
  int lineno_ = 0;
  std::size_t pos_ = 0;
  std::map<std::string, Section> sections_;

  void skip_space() {
    while (pos_ < line_.size() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() const { return pos_ >= line_.size() || line_[pos_] == '#'; }

  static bool bare(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

  Section& section_header() {
    const std::size_t open = pos_++;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < line_.size() && (bare(line_[pos_]) || line_[pos_] == '.')) ++pos_;
    const std::string name = line_.substr(start, pos_ - start);
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != ']') fail(pos_, "expected ']' to close the section header");
    ++pos_;
    skip_space();
    if (!at_end_or_comment()) fail(pos_, "unexpected text after section header");
    static const std::vector<std::string> known{"grid", "physics", "forcing", "init", "time", "output"};
    bool ok = std::find(known.begin(), known.end(), name) != known.end();
    if (!ok && name.rfind("audits.", 0) == 0) {
      const std::string idx = name.substr(7);
      ok = !idx.empty() && std::all_of(idx.begin(), idx.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    }
    if (!ok) fail(start, "unknown section [" + name + "]");
    if (sections_.count(name)) fail(open, "duplicate section [" + name + "]");
    auto& s = sections_[name];
    s.line = lineno_;
    s.column = static_cast<int>(open) + 1;
    return s;
  }

  void key_value(Section& sec) {
    const std::size_t start = pos_;
    while (pos_ < line_.size() && bare(line_[pos_])) ++pos_;
    if (pos_ == start) fail(pos_, "expected a key");
    const std::string key = line_.substr(start, pos_ - start);
    skip_space();
    if (pos_ >= line_.size() || line_[pos_] != '=') fail(pos_, "expected '=' after key '" + key + "'");
    ++pos_;
    skip_space();
    Entry e;
    e.line = lineno_;
    e.key_column = static_cast<int>(start) + 1;
    e.value = value();
    skip_space();
    if (!at_end_or_comment()) fail(pos_, "unexpected text after value");
    if (sec.entries.count(key)) fail(start, "duplicate key '" + key + "'");
    sec.entries.emplace(key, std::move(e));
  }

  Value value() {
    Value v;
    v.column = static_cast<int>(pos_) + 1;
    if (pos_ >= line_.size()) fail(pos_, "missing value");
    const char c = line_[pos_];
    if (c == '"') {
      v.type = Value::Type::string;
      ++pos_;
      while (true) {
        if (pos_ >= line_.size()) fail(pos_, "unterminated string");
        const char d = line_[pos_++];
        if (d == '"') break;
        if (d == '\\') {
          if (pos_ >= line_.size()) fail(pos_, "unterminated escape");
          const char x = line_[pos_++];
          switch (x) {
            case '"': v.text += '"'; break;
            case '\\': v.text += '\\'; break;
            case 'n': v.text += '\n'; break;
            case 't': v.text += '\t'; break;
            default: fail(pos_ - 1, std::string("unsupported escape '\\") + x + "'");
          }
        } else {
          v.text += d;
        }
      }
      return v;
    }
    if (c == '[') {
      v.type = Value::Type::array;
      ++pos_;
      skip_space();
      if (pos_ < line_.size() && line_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        skip_space();
        v.items.push_back(value());
        if (v.items.back().type == Value::Type::array) fail(v.items.back().column - 1, "nested arrays are not supported");
        skip_space();
        if (pos_ < line_.size() && line_[pos_] == ',') {
          ++pos_;
          skip_space();
          if (pos_ < line_.size() && line_[pos_] == ']') {
            ++pos_;
            return v;
          }
          continue;
        }
        if (pos_ < line_.size() && line_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail(pos_, "expected ',' or ']' in array");
      }
    }
    const std::size_t start = pos_;
    while (pos_ < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos_])) && line_[pos_] != ',' &&
           line_[pos_] != ']' && line_[pos_] != '#')
      ++pos_;
    const std::string tok = line_.substr(start, pos_ - start);
    if (tok == "true" || tok == "false") {
      v.type = Value::Type::boolean;
      v.boolean = tok == "true";
      return v;
    }
    std::string digits = tok;
    digits.erase(std::remove(digits.begin(), digits.end(), '_'), digits.end());
    const char* b = digits.data();
    const char* e = b + digits.size();
    const char* nb = (b != e && *b == '+') ? b + 1 : b;
    double d = 0;
    auto [ptr, ec] = std::from_chars(nb, e, d);
    if (tok.empty() || ec != std::errc() || ptr != e || !std::isfinite(d)) fail(start, "invalid value '" + tok + "'");
    v.number = d;
    v.integral = digits.find_first_of(".eEnN") == std::string::npos;
    v.text = std::string(nb, e);
    return v;
  }
};

class Binder {
 public:
  explicit Binder(Parser& p) : p_(p) {}

  Section* section(const std::string& name) {
    auto it = p_.sections().find(name);
    return it == p_.sections().end() ? nullptr : &it->second;
  }

  [[noreturn]] void fail_at(const Entry& e, const std::string& msg, bool at_value = true) const {
    throw ConfigError(p_.source(), e.line, at_value ? e.value.column : e.key_column, msg);
  }

  double number(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::number) fail_at(e, where + ": expected a number");
    return e.value.number;
  }
  long long integer(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::number || !e.value.integral) fail_at(e, where + ": expected an integer");
    long long v = 0;
    const auto& t = e.value.text;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail_at(e, where + ": integer out of range");
    return v;
  }
  std::uint64_t unsigned_integer(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::number || !e.value.integral || e.value.text.front() == '-')
      fail_at(e, where + ": expected a non-negative integer");
    std::uint64_t v = 0;
    const auto& t = e.value.text;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail_at(e, where + ": integer out of range");
    return v;
  }
  std::string string(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::string) fail_at(e, where + ": expected a string");
    return e.value.text;
  }
  bool boolean(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::boolean) fail_at(e, where + ": expected true or false");
    return e.value.boolean;
  }
  std::vector<double> numbers(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::array) fail_at(e, where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : e.value.items) {
      if (v.type != Value::Type::number) fail_at(e, where + ": expected an array of numbers");
      out.push_back(v.number);
    }
    return out;
  }
  std::vector<std::string> strings(const std::string& where, const Entry& e) const {
    if (e.value.type != Value::Type::array) fail_at(e, where + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : e.value.items) {
      if (v.type != Value::Type::string) fail_at(e, where + ": expected an array of strings");
      out.push_back(v.text);
    }
    return out;
  }
  Point point(const std::string& where, const Entry& e) const {
    const auto v = numbers(where, e);
    if (v.size() != 2) fail_at(e, where + ": expected two components");
    return {v[0], v[1]};
  }

  using Handler = std::function<void(const std::string& where, const Entry&)>;

  // Applies handlers to every key of the section; unknown keys are errors.
  void bind(const std::string& name, Section* sec, const std::map<std::string, Handler>& handlers) const {
    if (!sec) return;
    for (auto& [key, entry] : sec->entries) {
      auto it = handlers.find(key);
      if (it == handlers.end()) fail_at(entry, "unknown key '" + key + "' in [" + name + "]", false);
      it->second(name + "." + key, entry);
      entry.used = true;
    }
  }

  void require(const std::string& name, const std::string& key) const {
    auto it = p_.sections().find(name);
    if (it == p_.sections().end())
      throw ConfigError(p_.source(), 1, 1, "missing required section [" + name + "] (key " + name + "." + key + ")");
    if (!it->second.entries.count(key))
      throw ConfigError(p_.source(), it->second.line, it->second.column, "missing required key " + name + "." + key);
  }

  // Position of a dotted key for validation messages; section header or 1:1 otherwise.
  std::pair<int, int> locate(const std::string& dotted) const {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos) return {1, 1};
    auto it = p_.sections().find(dotted.substr(0, dot));
    if (it == p_.sections().end()) return {1, 1};
    auto e = it->second.entries.find(dotted.substr(dot + 1));
    if (e == it->second.entries.end()) return {it->second.line, it->second.column};
    return {e->second.line, e->second.value.column};
  }

  const std::string& source() const { return p_.source(); }

 private:
  Parser& p_;
};

template <class T>
T positive(const Binder& b, const std::string& where, const Entry& e, T v) {
  if (!(v > 0)) b.fail_at(e, where + " must be > 0");
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  Parser parser(text, source);
  Binder b(parser);
  ExperimentConfig cfg;
  auto& sim = cfg.simulation;

  b.require("grid", "n");
  b.require("physics", "alpha");
  b.require("time", "t_end");

  b.bind("grid", b.section("grid"),
         {{"n", [&](auto& w, auto& e) { sim.grid.n = static_cast<int>(positive(b, w, e, b.integer(w, e))); }},
          {"box_length", [&](auto& w, auto& e) { sim.grid.box_length = b.number(w, e); }},
          {"dealias_fraction", [&](auto& w, auto& e) { sim.grid.dealias_fraction = b.number(w, e); }}});
  b.bind("physics", b.section("physics"),
         {{"alpha", [&](auto& w, auto& e) { sim.alpha = b.number(w, e); }},
          {"nu", [&](auto& w, auto& e) { sim.nu = b.number(w, e); }}});
  b.bind("forcing", b.section("forcing"),
         {{"kind",
           [&](auto& w, auto& e) {
             try {
               sim.forcing.kind = forcing_kind_from_string(b.string(w, e));
             } catch (const std::invalid_argument&) {
               b.fail_at(e, w + ": expected one of none, constant, shear, taylor_green, random");
             }
           }},
          {"amplitude", [&](auto& w, auto& e) { sim.forcing.amplitude = b.number(w, e); }},
          {"direction", [&](auto& w, auto& e) { sim.forcing.direction = b.point(w, e); }},
          {"wavenumber", [&](auto& w, auto& e) { sim.forcing.wavenumber = static_cast<int>(b.integer(w, e)); }},
          {"seed", [&](auto& w, auto& e) { sim.forcing.seed = b.unsigned_integer(w, e); }},
          {"kmax", [&](auto& w, auto& e) { sim.forcing.kmax = static_cast<int>(b.integer(w, e)); }}});
  b.bind("init", b.section("init"),
         {{"kind",
           [&](auto& w, auto& e) {
             try {
               sim.init.kind = init_kind_from_string(b.string(w, e));
             } catch (const std::invalid_argument&) {
               b.fail_at(e, w + ": expected one of zero, taylor_green, random, mode, constant");
             }
           }},
          {"amplitude", [&](auto& w, auto& e) { sim.init.amplitude = b.number(w, e); }},
          {"seed", [&](auto& w, auto& e) { sim.init.seed = b.unsigned_integer(w, e); }},
          {"kmax", [&](auto& w, auto& e) { sim.init.kmax = static_cast<int>(b.integer(w, e)); }},
          {"mode",
           [&](auto& w, auto& e) {
             const auto m = b.numbers(w, e);
             if (m.size() != 2 || m[0] != std::trunc(m[0]) || m[1] != std::trunc(m[1]))
               b.fail_at(e, w + ": expected two integers");
             sim.init.m1 = static_cast<int>(m[0]);
             sim.init.m2 = static_cast<int>(m[1]);
           }},
          {"velocity", [&](auto& w, auto& e) { sim.init.velocity = b.point(w, e); }}});
  b.bind("time", b.section("time"),
         {{"t_end", [&](auto& w, auto& e) { sim.t_end = b.number(w, e); }},
          {"dt", [&](auto& w, auto& e) { sim.dt = b.number(w, e); }},
          {"cfl", [&](auto& w, auto& e) { sim.cfl = b.number(w, e); }},
          {"output_every", [&](auto& w, auto& e) { sim.output_every = b.number(w, e); }},
          {"checkpoint_every", [&](auto& w, auto& e) { sim.checkpoint_every = b.number(w, e); }}});
  b.bind("output", b.section("output"),
         {{"dir",
           [&](auto& w, auto& e) {
             cfg.output_dir = b.string(w, e);
             if (cfg.output_dir.empty()) b.fail_at(e, w + " must not be empty");
           }},
          {"formats",
           [&](auto& w, auto& e) {
             const auto f = b.string(w, e);
             if (f == "csv") cfg.formats = OutputFormat::csv;
             else if (f == "ndjson") cfg.formats = OutputFormat::ndjson;
             else if (f == "both") cfg.formats = OutputFormat::both;
             else b.fail_at(e, w + ": expected csv, ndjson or both");
           }},
          {"emit_plots", [&](auto& w, auto& e) { cfg.emit_plots = b.boolean(w, e); }},
          {"extras", [&](auto& w, auto& e) { sim.extras = b.strings(w, e); }}});

  std::vector<std::pair<long long, std::string>> audit_sections;
  for (auto& [name, sec] : parser.sections())
    if (name.rfind("audits.", 0) == 0) audit_sections.emplace_back(std::stoll(name.substr(7)), name);
  std::sort(audit_sections.begin(), audit_sections.end());
  for (const auto& [index, name] : audit_sections) {
    auto* sec = b.section(name);
    auto it = sec->entries.find("id");
    if (it == sec->entries.end())
      throw ConfigError(parser.source(), sec->line, sec->column, "missing required key " + name + ".id");
    AuditRequest req;
    const auto& id_entry = it->second;
    req.alias = b.string(name + ".id", id_entry);
    const auto canonical = resolve_audit_id(req.alias);
    if (!canonical) b.fail_at(id_entry, "unknown audit id '" + req.alias + "'");
    req.id = *canonical;
    b.bind(name, sec,
           {{"id", [](auto&, auto&) {}},
            {"R", [&](auto& w, auto& e) { req.R = positive(b, w, e, b.number(w, e)); }},
            {"eps", [&](auto& w, auto& e) { req.eps = positive(b, w, e, b.number(w, e)); }},
            {"x0", [&](auto& w, auto& e) { req.x0 = b.point(w, e); }},
            {"ensemble_size",
             [&](auto& w, auto& e) { req.ensemble_size = static_cast<std::size_t>(positive(b, w, e, b.integer(w, e))); }},
            {"seed", [&](auto& w, auto& e) { req.seed = b.unsigned_integer(w, e); }},
            {"delta0", [&](auto& w, auto& e) { req.delta0 = positive(b, w, e, b.number(w, e)); }},
            {"perturbation_mode",
             [&](auto& w, auto& e) {
               const auto m = b.numbers(w, e);
               if (m.size() != 2 || m[0] != std::trunc(m[0]) || m[1] != std::trunc(m[1]) || (m[0] == 0 && m[1] == 0))
                 b.fail_at(e, w + ": expected two integers, not both zero");
               req.perturbation_mode = {static_cast<int>(m[0]), static_cast<int>(m[1])};
             }},
            {"radii",
             [&](auto& w, auto& e) {
               req.radii = b.numbers(w, e);
               for (double r : req.radii)
                 if (!(r > 0)) b.fail_at(e, w + ": radii must be > 0");
             }},
            {"pairs", [&](auto& w, auto& e) { req.pairs = static_cast<std::size_t>(positive(b, w, e, b.integer(w, e))); }},
            {"mus",
             [&](auto& w, auto& e) {
               req.mus = b.numbers(w, e);
               if (req.mus.size() < 2) b.fail_at(e, w + ": need at least two mollifier radii");
               for (double m : req.mus)
                 if (!(m > 0)) b.fail_at(e, w + ": mollifier radii must be > 0");
             }},
            {"kernel_n", [&](auto& w, auto& e) { req.kernel_n = static_cast<int>(positive(b, w, e, b.integer(w, e))); }},
            {"samples",
             [&](auto& w, auto& e) { req.samples = static_cast<std::size_t>(positive(b, w, e, b.integer(w, e))); }}});
    if (req.needs_seed() && !req.seed)
      throw ConfigError(parser.source(), sec->line, sec->column,
                        "audit '" + req.alias + "' is seeded: missing required key " + name + ".seed");
    cfg.audits.push_back(std::move(req));
  }

  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const auto [line, col] = b.locate(msg.substr(0, msg.find(' ')));
    throw ConfigError(parser.source(), line, col, msg);
  }
  for (std::size_t k = 0; k < cfg.audits.size(); ++k)
    if (cfg.audits[k].id == "growth_alpha0" && sim.alpha != 0) {
      const auto [line, col] = b.locate("physics.alpha");
      throw ConfigError(parser.source(), line, col, "audit growth_alpha0 requires physics.alpha = 0");
    }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + num(v[k]);
  return out + "]";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  const auto& s = cfg.simulation;
  std::ostringstream o;
  o << "[grid]\n"
    << "n = " << s.grid.n << "\n"
    << "box_length = " << num(s.grid.box_length) << "\n"
    << "dealias_fraction = " << num(s.grid.dealias_fraction) << "\n\n"
    << "[physics]\n"
    << "alpha = " << num(s.alpha) << "\n"
    << "nu = " << num(s.nu) << "\n\n"
    << "[forcing]\n"
    << "kind = " << quoted(to_string(s.forcing.kind)) << "\n"
    << "amplitude = " << num(s.forcing.amplitude) << "\n"
    << "direction = " << array({s.forcing.direction[0], s.forcing.direction[1]}) << "\n"
    << "wavenumber = " << s.forcing.wavenumber << "\n"
    << "seed = " << s.forcing.seed << "\n"
    << "kmax = " << s.forcing.kmax << "\n\n"
    << "[init]\n"
    << "kind = " << quoted(to_string(s.init.kind)) << "\n"
    << "amplitude = " << num(s.init.amplitude) << "\n"
    << "seed = " << s.init.seed << "\n"
    << "kmax = " << s.init.kmax << "\n"
    << "mode = [" << s.init.m1 << ", " << s.init.m2 << "]\n"
    << "velocity = " << array({s.init.velocity[0], s.init.velocity[1]}) << "\n\n"
    << "[time]\n"
    << "t_end = " << num(s.t_end) << "\n";
  if (s.dt) o << "dt = " << num(*s.dt) << "\n";
  o << "cfl = " << num(s.cfl) << "\n"
    << "output_every = " << num(s.output_every) << "\n"
    << "checkpoint_every = " << num(s.checkpoint_every) << "\n\n"
    << "[output]\n"
    << "dir = " << quoted(cfg.output_dir) << "\n"
    << "formats = " << quoted(to_string(cfg.formats)) << "\n"
    << "emit_plots = " << (cfg.emit_plots ? "true" : "false") << "\n"
    << "extras = [";
  for (std::size_t k = 0; k < s.extras.size(); ++k) o << (k ? ", " : "") << quoted(s.extras[k]);
  o << "]\n";
  for (std::size_t k = 0; k < cfg.audits.size(); ++k) {
    const auto& a = cfg.audits[k];
    o << "\n[audits." << k + 1 << "]\n"
      << "id = " << quoted(a.alias) << "\n"
      << "R = " << num(a.R) << "\n"
      << "eps = " << num(a.eps) << "\n"
      << "x0 = " << array({a.x0[0], a.x0[1]}) << "\n";
    if (a.ensemble_size) o << "ensemble_size = " << *a.ensemble_size << "\n";
    if (a.seed) o << "seed = " << *a.seed << "\n";
    o << "delta0 = " << num(a.delta0) << "\n"
      << "perturbation_mode = [" << a.perturbation_mode[0] << ", " << a.perturbation_mode[1] << "]\n"
      << "radii = " << array(a.radii) << "\n"
      << "pairs = " << a.pairs << "\n"
      << "mus = " << array(a.mus) << "\n"
      << "kernel_n = " << a.kernel_n << "\n"
      << "samples = " << a.samples << "\n";
  }
  return o.str();
}

}  // namespace delab
