#include "groundr/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace groundr {

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == ':' || c == '/' || c == '~' || c == '+' || c == '%';
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

bool is_keyword(std::string_view s) {
  return s == "op" || s == "in" || s == "out" || s == "dur" || s == "param" || s == "id" ||
         s == "protocol" || s == "end";
}

// Splits one source line into word and comma tokens, dropping comments.
std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == ',') {
      out.push_back({",", static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ',' && line[i] != '#' &&
           !std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Length of the leading decimal number in `s` (sign, digits, fraction,
// exponent), or 0 when `s` does not start with one.
std::size_t numeric_prefix(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  }
  if (digits == 0) return 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::size_t j = i + 1;
    if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
    std::size_t exp_digits = 0;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j, ++exp_digits;
    if (exp_digits > 0) i = j;
  }
  return i;
}

Quantity split_quantity(std::string_view v) {
  std::size_t n = numeric_prefix(v);
  if (n == 0) return {std::string(v), ""};
  return {std::string(v.substr(0, n)), std::string(v.substr(n))};
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : source_(std::move(source)) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines_.push_back(line);
      pos = nl + 1;
    }
  }

  std::vector<Protocol> run() {
    std::vector<Protocol> result;
    std::optional<Protocol> current;
    std::set<std::string> op_ids;
    int open_line = 0;

    for (std::size_t ln = 0; ln < lines_.size(); ++ln) {
      line_ = static_cast<int>(ln) + 1;
      line_length_ = static_cast<int>(lines_[ln].size());
      auto toks = tokenize(lines_[ln]);
      if (toks.empty()) continue;
      const auto& head = toks.front();

      if (head.text == "protocol") {
        if (current) {
          error(head.column, "unexpected 'protocol' inside protocol '" + current->name + "'");
          continue;
        }
        if (toks.size() < 2 || !is_identifier(toks[1].text) || is_keyword(toks[1].text)) {
          error(toks.size() < 2 ? end_column() : toks[1].column, "expected protocol name");
          continue;
        }
        if (toks.size() > 2) error(toks[2].column, "unexpected token '" + toks[2].text + "'");
        current = Protocol{toks[1].text, {}};
        op_ids.clear();
        open_line = line_;
      } else if (head.text == "end") {
        if (!current) {
          error(head.column, "'end' without matching 'protocol'");
          continue;
        }
        if (toks.size() > 1) error(toks[1].column, "unexpected token '" + toks[1].text + "'");
        result.push_back(std::move(*current));
        current.reset();
      } else if (head.text == "op") {
        if (!current) {
          error(head.column, "'op' outside of a protocol block");
          continue;
        }
        if (auto op = parse_op(toks, current->operations.size())) {
          if (!op_ids.insert(op->id).second)
            error(head.column, "duplicate operation id '" + op->id + "'");
          else
            current->operations.push_back(std::move(*op));
        }
      } else {
        error(head.column, current ? "expected 'op' or 'end'" : "expected 'protocol'");
      }
    }
    if (current) {
      line_ = open_line;
      error(1, "protocol '" + current->name + "' is missing 'end'");
    }

    std::set<std::string> names;
    for (const auto& p : result)
      if (!names.insert(p.name).second) {
        diagnostics_.push_back({{source_, 0, 0}, "duplicate protocol name '" + p.name + "'"});
      }
    if (!diagnostics_.empty()) throw DslError(std::move(diagnostics_));
    return result;
  }

 private:
  int end_column() const { return line_length_ + 1; }

  void error(int column, std::string message) {
    diagnostics_.push_back({{source_, line_, column}, std::move(message)});
  }

  // Parses `r1, r2, ...` starting at toks[i]; advances i past the list.
  bool parse_list(const std::vector<Token>& toks, std::size_t& i, std::vector<std::string>& out) {
    bool expect_ident = true;
    while (i < toks.size()) {
      const auto& t = toks[i];
      if (expect_ident) {
        if (t.text == "," || !is_identifier(t.text) || is_keyword(t.text)) {
          error(t.column, "expected resource identifier");
          return false;
        }
        if (std::find(out.begin(), out.end(), t.text) != out.end()) {
          error(t.column, "duplicate resource '" + t.text + "'");
          return false;
        }
        out.push_back(t.text);
        expect_ident = false;
        ++i;
      } else {
        if (t.text != ",") return true;
        expect_ident = true;
        ++i;
      }
    }
    if (expect_ident) {
      error(end_column(), "expected resource identifier");
      return false;
    }
    return true;
  }

  std::optional<Operation> parse_op(const std::vector<Token>& toks, std::size_t index) {
    if (toks.size() < 2 || !is_identifier(toks[1].text) || is_keyword(toks[1].text)) {
      error(toks.size() < 2 ? end_column() : toks[1].column, "expected operation type");
      return std::nullopt;
    }
    Operation op;
    op.op_type = toks[1].text;
    bool seen_in = false, seen_out = false, seen_id = false;
    std::size_t i = 2;
    while (i < toks.size()) {
      const Token& kw = toks[i++];
      auto missing = [&](const char* what) {
        error(i < toks.size() ? toks[i].column : end_column(), std::string("expected ") + what);
      };
      if (kw.text == "in" || kw.text == "out") {
        bool& seen = kw.text == "in" ? seen_in : seen_out;
        if (seen) {
          error(kw.column, "repeated '" + kw.text + "' clause");
          return std::nullopt;
        }
        seen = true;
        if (!parse_list(toks, i, kw.text == "in" ? op.preconditions : op.postconditions))
          return std::nullopt;
      } else if (kw.text == "dur") {
        if (op.duration_s) {
          error(kw.column, "repeated 'dur' clause");
          return std::nullopt;
        }
        if (i >= toks.size()) {
          missing("duration");
          return std::nullopt;
        }
        const Token& t = toks[i++];
        std::size_t n = numeric_prefix(t.text);
        if (n == 0) {
          error(t.column, "expected duration, got '" + t.text + "'");
          return std::nullopt;
        }
        std::string unit = t.text.substr(n);
        double scale = 0;
        if (unit == "s")
          scale = 1;
        else if (unit == "min")
          scale = 60;
        else if (unit == "h")
          scale = 3600;
        else {
          error(t.column + static_cast<int>(n), "unknown duration unit '" + unit + "'");
          return std::nullopt;
        }
        auto v = parse_double(std::string_view(t.text).substr(0, n));
        if (!v || !(*v > 0) || !std::isfinite(*v * scale)) {
          error(t.column, "duration must be positive");
          return std::nullopt;
        }
        op.duration_s = *v * scale;
      } else if (kw.text == "param") {
        if (i >= toks.size()) {
          missing("key=value");
          return std::nullopt;
        }
        const Token& t = toks[i++];
        auto eq = t.text.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == t.text.size()) {
          error(t.column, "expected key=value, got '" + t.text + "'");
          return std::nullopt;
        }
        std::string key = t.text.substr(0, eq);
        std::string value = t.text.substr(eq + 1);
        if (!is_identifier(key) || !is_identifier(value)) {
          error(t.column, "malformed parameter '" + t.text + "'");
          return std::nullopt;
        }
        if (op.parameters.count(key)) {
          error(t.column, "duplicate parameter '" + key + "'");
          return std::nullopt;
        }
        op.parameters.emplace(std::move(key), split_quantity(value));
      } else if (kw.text == "id") {
        if (seen_id) {
          error(kw.column, "repeated 'id' clause");
          return std::nullopt;
        }
        seen_id = true;
        if (i >= toks.size() || !is_identifier(toks[i].text) || is_keyword(toks[i].text)) {
          missing("operation id");
          return std::nullopt;
        }
        op.id = toks[i++].text;
      } else {
        error(kw.column, "unexpected token '" + kw.text + "'");
        return std::nullopt;
      }
    }
    if (!seen_id) op.id = default_operation_id(index);
    return op;
  }

  std::string source_;
  std::vector<std::string_view> lines_;
  std::vector<Diagnostic> diagnostics_;
  int line_ = 0;
  int line_length_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DslError({{{path.string(), 0, 0}, "cannot open file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has_dsl_extension(const std::filesystem::path& p) {
  const std::string name = p.filename().string();
  const std::string ext = ".proto.dsl";
  return name.size() > ext.size() && name.compare(name.size() - ext.size(), ext.size(), ext) == 0;
}

}  // namespace

std::string Diagnostic::str() const {
  std::ostringstream ss;
  ss << where.file << ':' << where.line << ':' << where.column << ": " << message;
  return ss.str();
}

namespace {
std::string join_diagnostics(const std::vector<Diagnostic>& ds) {
  std::string out;
  for (const auto& d : ds) {
    if (!out.empty()) out += '\n';
    out += d.str();
  }
  return out;
}
}  // namespace

DslError::DslError(std::vector<Diagnostic> diagnostics)
    : Error(join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

const Protocol* Corpus::find(std::string_view name) const {
  for (const auto& p : protocols)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> Corpus::names() const {
  std::vector<std::string> out;
  out.reserve(protocols.size());
  for (const auto& p : protocols) out.push_back(p.name);
  return out;
}

std::string default_operation_id(std::size_t index) { return "op" + std::to_string(index + 1); }

std::vector<Protocol> parse_protocols(std::string_view text, const std::string& source) {
  return Parser(text, source).run();
}

Protocol parse_protocol(std::string_view text, const std::string& source) {
  auto ps = parse_protocols(text, source);
  if (ps.size() != 1)
    throw DslError({{{source, 0, 0},
                     "expected exactly one protocol block, found " + std::to_string(ps.size())}});
  return std::move(ps.front());
}

Corpus parse_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && has_dsl_extension(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  } else if (fs::is_regular_file(path, ec)) {
    files.push_back(path);
  } else {
    throw DslError({{{path.string(), 0, 0}, "no such file or directory"}});
  }

  Corpus corpus;
  std::vector<Diagnostic> diagnostics;
  std::map<std::string, std::string> seen;  // protocol name -> file
  for (const auto& f : files) {
    try {
      for (auto& p : parse_protocols(read_file(f), f.string())) {
        auto [it, fresh] = seen.emplace(p.name, f.string());
        if (!fresh) {
          diagnostics.push_back({{f.string(), 0, 0}, "duplicate protocol name '" + p.name +
                                                         "' (first defined in " + it->second + ")"});
          continue;
        }
        corpus.protocols.push_back(std::move(p));
      }
    } catch (const DslError& e) {
      diagnostics.insert(diagnostics.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
  }
  if (!diagnostics.empty()) throw DslError(std::move(diagnostics));
  return corpus;
}

void validate_protocol(const Protocol& p) {
  std::vector<Diagnostic> ds;
  auto fail = [&](std::string msg) { ds.push_back({{p.name, 0, 0}, std::move(msg)}); };
  if (!is_identifier(p.name) || is_keyword(p.name)) fail("invalid protocol name '" + p.name + "'");
  std::set<std::string> ids;
  for (const auto& op : p.operations) {
    const std::string where = "operation '" + op.id + "': ";
    if (!is_identifier(op.id) || is_keyword(op.id)) fail(where + "invalid id");
    if (!ids.insert(op.id).second) fail(where + "duplicate id");
    if (!is_identifier(op.op_type) || is_keyword(op.op_type)) fail(where + "invalid op_type");
    for (const auto* set : {&op.preconditions, &op.postconditions}) {
      std::set<std::string> uniq;
      for (const auto& r : *set) {
        if (!is_identifier(r) || is_keyword(r)) fail(where + "invalid resource '" + r + "'");
        if (!uniq.insert(r).second) fail(where + "duplicate resource '" + r + "'");
      }
    }
    if (op.duration_s && !(*op.duration_s > 0 && std::isfinite(*op.duration_s)))
      fail(where + "duration must be positive");
    for (const auto& [k, q] : op.parameters) {
      if (!is_identifier(k)) fail(where + "invalid parameter key '" + k + "'");
      const std::string text = q.value + q.unit;
      if (!is_identifier(text) || !(split_quantity(text) == q))
        fail(where + "parameter '" + k + "' is not representable as written text");
    }
  }
  if (!ds.empty()) throw DslError(std::move(ds));
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string to_dsl(const Protocol& p) {
  std::ostringstream out;
  out << "protocol " << p.name << '\n';
  for (std::size_t i = 0; i < p.operations.size(); ++i) {
    const auto& op = p.operations[i];
    out << "  op " << op.op_type;
    if (op.id != default_operation_id(i)) out << " id " << op.id;
    auto list = [&](const char* kw, const std::vector<std::string>& rs) {
      if (rs.empty()) return;
      out << ' ' << kw << ' ';
      for (std::size_t j = 0; j < rs.size(); ++j) out << (j ? "," : "") << rs[j];
    };
    list("in", op.preconditions);
    list("out", op.postconditions);
    if (op.duration_s) out << " dur " << format_number(*op.duration_s) << 's';
    for (const auto& [k, q] : op.parameters) out << " param " << k << '=' << q.value << q.unit;
    out << '\n';
  }
  out << "end\n";
  return out.str();
}

nlohmann::json serialize_protocol(const Protocol& p) {
  nlohmann::json ops = nlohmann::json::array();
  for (const auto& op : p.operations) {
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [k, q] : op.parameters) params[k] = {{"value", q.value}, {"unit", q.unit}};
    ops.push_back({{"id", op.id},
                   {"op_type", op.op_type},
                   {"in", op.preconditions},
                   {"out", op.postconditions},
                   {"dur_s", op.duration_s ? nlohmann::json(*op.duration_s) : nlohmann::json()},
                   {"params", std::move(params)}});
  }
  return {{"name", p.name}, {"operations", std::move(ops)}};
}

Protocol deserialize_protocol(const nlohmann::json& doc) {
  auto fail = [](const std::string& path, const std::string& msg) -> DslError {
    return DslError({{{"<json>", 0, 0}, path + ": " + msg}});
  };
  if (!doc.is_object()) throw fail("$", "expected object");
  if (!doc.contains("name") || !doc["name"].is_string()) throw fail("$.name", "expected string");
  if (!doc.contains("operations") || !doc["operations"].is_array())
    throw fail("$.operations", "expected array");
  Protocol p;
  p.name = doc["name"].get<std::string>();
  std::size_t idx = 0;
  for (const auto& o : doc["operations"]) {
    const std::string path = "$.operations[" + std::to_string(idx++) + "]";
    if (!o.is_object()) throw fail(path, "expected object");
    Operation op;
    if (!o.contains("id") || !o["id"].is_string()) throw fail(path + ".id", "expected string");
    if (!o.contains("op_type") || !o["op_type"].is_string())
      throw fail(path + ".op_type", "expected string");
    op.id = o["id"].get<std::string>();
    op.op_type = o["op_type"].get<std::string>();
    for (const char* key : {"in", "out"}) {
      if (!o.contains(key)) continue;
      if (!o[key].is_array()) throw fail(path + "." + key, "expected array");
      auto& dst = std::string_view(key) == "in" ? op.preconditions : op.postconditions;
      for (const auto& r : o[key]) {
        if (!r.is_string()) throw fail(path + "." + key, "expected strings");
        dst.push_back(r.get<std::string>());
      }
    }
    if (o.contains("dur_s") && !o["dur_s"].is_null()) {
      if (!o["dur_s"].is_number()) throw fail(path + ".dur_s", "expected number or null");
      op.duration_s = o["dur_s"].get<double>();
    }
    if (o.contains("params")) {
      if (!o["params"].is_object()) throw fail(path + ".params", "expected object");
      for (const auto& [k, v] : o["params"].items()) {
        if (!v.is_object() || !v.contains("value") || !v["value"].is_string())
          throw fail(path + ".params." + k, "expected {value, unit}");
        Quantity q{v["value"].get<std::string>(), ""};
        if (v.contains("unit")) {
          if (!v["unit"].is_string()) throw fail(path + ".params." + k + ".unit", "expected string");
          q.unit = v["unit"].get<std::string>();
        }
        op.parameters.emplace(k, std::move(q));
      }
    }
    p.operations.push_back(std::move(op));
  }
  validate_protocol(p);
  return p;
}

}  // namespace groundr
