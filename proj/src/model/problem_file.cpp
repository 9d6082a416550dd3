#include "cqcert/model/problem_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "cqcert/error.hpp"

namespace cqcert::model {

namespace {

struct Pos {
  std::size_t line = 1;
  std::size_t col = 1;
};

struct Value {
  enum class Kind { Number, Bool, String, Array, Table };
  Kind kind = Kind::Table;
  Pos pos;
  double number = 0.0;
  bool boolean = false;
  std::string text;
  bool escaped = false;  // string contained escape sequences
  std::vector<Value> items;
  std::vector<std::pair<std::string, Value>> fields;
  std::vector<Pos> key_pos;

  const Value* find(std::string_view key) const {
    for (const auto& [k, v] : fields)
      if (k == key) return &v;
    return nullptr;
  }
};

std::string_view kind_name(Value::Kind k) {
  switch (k) {
    case Value::Kind::Number:
      return "number";
    case Value::Kind::Bool:
      return "boolean";
    case Value::Kind::String:
      return "string";
    case Value::Kind::Array:
      return "array";
    case Value::Kind::Table:
      return "table";
  }
  return "value";
}

[[noreturn]] void fail(const std::string& msg, Pos p) { throw FormatError(msg, p.line, p.col); }

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  Value document() {
    Value root;
    root.kind = Value::Kind::Table;
    std::size_t section = kNoSection;
    for (;;) {
      skip_blank();
      if (eof()) break;
      const char c = peek();
      if (c == '\n') {
        advance();
        continue;
      }
      if (c == '#') {
        skip_comment();
        continue;
      }
      if (c == '[') {
        const Pos at = pos();
        advance();
        skip_blank();
        const std::string key = bare_key();
        skip_blank();
        expect(']');
        line_end();
        Value table;
        table.kind = Value::Kind::Table;
        table.pos = at;
        insert(root, key, std::move(table), at);
        section = root.fields.size() - 1;
        continue;
      }
      const Pos at = pos();
      const std::string key = bare_key();
      skip_blank();
      expect('=');
      skip_blank();
      Value v = value();
      line_end();
      Value& target = section == kNoSection ? root : root.fields[section].second;
      insert(target, key, std::move(v), at);
    }
    return root;
  }

 private:
  static constexpr std::size_t kNoSection = static_cast<std::size_t>(-1);

  bool eof() const { return i_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[i_]; }
  Pos pos() const { return {line_, col_}; }

  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void expect(char c) {
    if (peek() != c) {
      if (eof()) fail(std::string("expected '") + c + "', found end of input", pos());
      fail(std::string("expected '") + c + "', found '" + peek() + "'", pos());
    }
    advance();
  }

  void skip_blank() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }

  void skip_comment() {
    while (!eof() && peek() != '\n') advance();
  }

  // Whitespace, newlines and comments, as allowed inside arrays and tables.
  void skip_space() {
    for (;;) {
      skip_blank();
      if (peek() == '\n') {
        advance();
      } else if (peek() == '#') {
        skip_comment();
      } else {
        return;
      }
    }
  }

  void line_end() {
    skip_blank();
    if (peek() == '#') skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value", pos());
    advance();
  }

  static bool key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  }

  std::string bare_key() {
    const Pos at = pos();
    std::string key;
    while (!eof() && key_char(peek())) {
      key.push_back(peek());
      advance();
    }
    if (key.empty()) {
      if (eof()) fail("expected a key, found end of input", at);
      fail(std::string("expected a key, found '") + peek() + "'", at);
    }
    return key;
  }

  static void insert(Value& table, const std::string& key, Value v, Pos at) {
    if (table.find(key) != nullptr) fail("duplicate key '" + key + "'", at);
    table.fields.emplace_back(key, std::move(v));
    table.key_pos.push_back(at);
  }

  Value value() {
    const Pos at = pos();
    if (eof()) fail("expected a value, found end of input", at);
    const char c = peek();
    Value v;
    if (c == '"' || c == '\'') {
      v = string_value();
    } else if (c == '[') {
      v = array_value();
    } else if (c == '{') {
      v = table_value();
    } else if (c == 't' || c == 'f') {
      const std::string word = bare_key();
      if (word != "true" && word != "false") fail("unexpected bare word '" + word + "'", at);
      v.kind = Value::Kind::Bool;
      v.boolean = word == "true";
    } else if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.') {
      v = number_value();
    } else {
      fail(std::string("unexpected '") + c + "'", at);
    }
    v.pos = at;
    return v;
  }

  Value string_value() {
    const char quote = peek();
    advance();
    Value v;
    v.kind = Value::Kind::String;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string", pos());
      const char c = peek();
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\' && quote == '"') {
        const Pos esc = pos();
        advance();
        if (eof()) fail("unterminated string", pos());
        const char e = peek();
        switch (e) {
          case '"':
            v.text.push_back('"');
            break;
          case '\\':
            v.text.push_back('\\');
            break;
          case 'n':
            v.text.push_back('\n');
            break;
          case 't':
            v.text.push_back('\t');
            break;
          default:
            fail(std::string("unknown escape '\\") + e + "'", esc);
        }
        v.escaped = true;
        advance();
        continue;
      }
      v.text.push_back(c);
      advance();
    }
    return v;
  }

  Value number_value() {
    const Pos at = pos();
    std::string token;
    while (!eof()) {
      const char c = peek();
      if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E') {
        token.push_back(c);
      } else if (c != '_') {
        break;
      }
      advance();
    }
    const char* first = token.data();
    if (!token.empty() && token.front() == '+') ++first;
    Value v;
    v.kind = Value::Kind::Number;
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v.number);
    if (ec != std::errc() || ptr != last || first == last || !std::isfinite(v.number))
      fail("malformed number '" + token + "'", at);
    return v;
  }

  Value array_value() {
    advance();  // '['
    Value v;
    v.kind = Value::Kind::Array;
    for (;;) {
      skip_space();
      if (peek() == ']') {
        advance();
        return v;
      }
      v.items.push_back(value());
      skip_space();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == ']') {
        advance();
        return v;
      }
      if (eof()) fail("unterminated array", pos());
      fail(std::string("expected ',' or ']' in array, found '") + peek() + "'", pos());
    }
  }

  Value table_value() {
    advance();  // '{'
    Value v;
    v.kind = Value::Kind::Table;
    for (;;) {
      skip_space();
      if (peek() == '}') {
        advance();
        return v;
      }
      const Pos at = pos();
      const std::string key = bare_key();
      skip_blank();
      expect('=');
      skip_blank();
      Value item = value();
      insert(v, key, std::move(item), at);
      skip_space();
      if (peek() == ',') {
        advance();
        continue;
      }
      if (peek() == '}') {
        advance();
        return v;
      }
      if (eof()) fail("unterminated inline table", pos());
      fail(std::string("expected ',' or '}' in table, found '") + peek() + "'", pos());
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// ---- schema ---------------------------------------------------------------

void require_kind(const Value& v, Value::Kind k, std::string_view key) {
  if (v.kind != k)
    fail("'" + std::string(key) + "' must be a " + std::string(kind_name(k)) + ", found " +
             std::string(kind_name(v.kind)),
         v.pos);
}

double as_number(const Value& v, std::string_view key) {
  require_kind(v, Value::Kind::Number, key);
  return v.number;
}

long as_integer(const Value& v, std::string_view key, long lo, long hi) {
  const double d = as_number(v, key);
  if (d != std::floor(d) || d < static_cast<double>(lo) || d > static_cast<double>(hi))
    fail("'" + std::string(key) + "' must be an integer in [" + std::to_string(lo) + ", " +
             std::to_string(hi) + "]",
         v.pos);
  return static_cast<long>(d);
}

bool as_bool(const Value& v, std::string_view key) {
  require_kind(v, Value::Kind::Bool, key);
  return v.boolean;
}

const std::string& as_string(const Value& v, std::string_view key) {
  require_kind(v, Value::Kind::String, key);
  return v.text;
}

std::vector<double> as_numbers(const Value& v, std::string_view key) {
  require_kind(v, Value::Kind::Array, key);
  std::vector<double> out;
  for (const Value& item : v.items) out.push_back(as_number(item, key));
  return out;
}

void reject_unknown(const Value& table, std::initializer_list<std::string_view> known,
                    std::string_view where) {
  for (std::size_t k = 0; k < table.fields.size(); ++k) {
    bool ok = false;
    for (auto name : known) ok = ok || table.fields[k].first == name;
    if (!ok)
      fail("unknown key '" + table.fields[k].first + "'" +
               (where.empty() ? std::string() : " in " + std::string(where)),
           table.key_pos[k]);
  }
}

expr::Expr parse_expression(const Value& v, std::string_view key, int n, bool allow_t) {
  const std::string& text = as_string(v, key);
  expr::Expr e;
  try {
    e = expr::parse(text, n);
  } catch (const ParseError& err) {
    // Column of the offending byte when the literal has no escapes.
    Pos at = v.pos;
    if (!v.escaped) at.col += 1 + err.offset();
    fail("in '" + std::string(key) + "': " + err.what(), at);
  }
  if (!allow_t && e.uses_param())
    fail("'" + std::string(key) + "' may not use the index parameter t", v.pos);
  return e;
}

IndexSetDesc parse_index_set(const Value& v) {
  require_kind(v, Value::Kind::Table, "index_set");
  IndexSetDesc d;
  const Value* type = v.find("type");
  if (type == nullptr) fail("index_set needs a 'type' (\"interval\" or \"finite\")", v.pos);
  const std::string& kind = as_string(*type, "type");
  if (kind == "interval") {
    reject_unknown(v, {"type", "lo", "hi", "open_lo", "open_hi", "grid"}, "index_set");
    d.kind = IndexKind::Interval;
    const Value* lo = v.find("lo");
    const Value* hi = v.find("hi");
    if (lo == nullptr || hi == nullptr) fail("interval index_set needs 'lo' and 'hi'", v.pos);
    d.lo = as_number(*lo, "lo");
    d.hi = as_number(*hi, "hi");
    if (!(d.lo < d.hi)) fail("interval index_set needs lo < hi", lo->pos);
    if (const Value* o = v.find("open_lo")) d.open_lo = as_bool(*o, "open_lo");
    if (const Value* o = v.find("open_hi")) d.open_hi = as_bool(*o, "open_hi");
    if (const Value* g = v.find("grid")) d.grid_points = static_cast<int>(as_integer(*g, "grid", 2, 1000000));
  } else if (kind == "finite") {
    reject_unknown(v, {"type", "values"}, "index_set");
    d.kind = IndexKind::Finite;
    const Value* values = v.find("values");
    if (values == nullptr) fail("finite index_set needs 'values'", v.pos);
    d.values = as_numbers(*values, "values");
    if (d.values.empty()) fail("finite index_set needs at least one value", values->pos);
    for (std::size_t k = 1; k < d.values.size(); ++k)
      if (!(d.values[k - 1] < d.values[k]))
        fail("finite index_set values must be strictly increasing", values->items[k].pos);
  } else {
    fail("index_set type must be \"interval\" or \"finite\", found \"" + kind + "\"", type->pos);
  }
  return d;
}

}  // namespace

double IndexSetDesc::inset() const {
  return (hi - lo) / (10.0 * static_cast<double>(grid_points));
}

void IndexSetDesc::validate() const {
  if (kind == IndexKind::Interval) {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
      throw DimensionError("index set: need finite lo < hi");
    if (grid_points < 2) throw DimensionError("index set: grid needs at least 2 points");
  } else {
    if (values.empty()) throw DimensionError("index set: no values");
    for (std::size_t k = 1; k < values.size(); ++k)
      if (!(values[k - 1] < values[k]))
        throw DimensionError("index set: values must be strictly increasing");
  }
}

std::vector<double> IndexSetDesc::grid() const {
  validate();
  if (kind == IndexKind::Finite) return values;
  const double a = open_lo ? lo + inset() : lo;
  const double b = open_hi ? hi - inset() : hi;
  const auto count = static_cast<std::size_t>(grid_points);
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k)
    t[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1);
  t.back() = b;
  return t;
}

ProblemSpec load_problem(std::string_view text) {
  const Value root = Reader(text).document();
  reject_unknown(root,
                 {"name", "dim", "objective", "equality", "inequality", "inequality_list",
                  "index_set", "point"},
                 "");
  ProblemSpec spec;
  if (const Value* v = root.find("name")) spec.name = as_string(*v, "name");

  const Value* dim = root.find("dim");
  if (dim == nullptr) fail("missing required key 'dim'", {1, 1});
  spec.n = static_cast<int>(as_integer(*dim, "dim", 1, 10000));

  if (const Value* v = root.find("objective")) {
    spec.objective = parse_expression(*v, "objective", spec.n, false);
    spec.objective_text = v->text;
  }
  if (const Value* v = root.find("equality")) {
    require_kind(*v, Value::Kind::Array, "equality");
    for (const Value& item : v->items) {
      spec.equalities.push_back(parse_expression(item, "equality", spec.n, false));
      spec.equality_texts.push_back(item.text);
    }
  }

  const Value* family = root.find("inequality");
  const Value* list = root.find("inequality_list");
  const Value* index_set = root.find("index_set");
  if (family != nullptr && list != nullptr)
    fail("give either 'inequality' or 'inequality_list', not both", list->pos);
  if (family != nullptr) {
    spec.family_kind = FamilyKind::Parametric;
    spec.family = parse_expression(*family, "inequality", spec.n, true);
    spec.inequality_texts.push_back(family->text);
    if (index_set == nullptr) fail("'inequality' needs an index_set", family->pos);
    spec.index_set = parse_index_set(*index_set);
  } else if (list != nullptr) {
    require_kind(*list, Value::Kind::Array, "inequality_list");
    for (const Value& item : list->items) {
      spec.inequality_list.push_back(parse_expression(item, "inequality_list", spec.n, false));
      spec.inequality_texts.push_back(item.text);
    }
    if (!spec.inequality_list.empty()) spec.family_kind = FamilyKind::List;
    if (index_set != nullptr) {
      spec.index_set = parse_index_set(*index_set);
      if (spec.index_set.kind != IndexKind::Finite ||
          spec.index_set.values.size() != spec.inequality_list.size())
        fail("index_set for 'inequality_list' must be finite with one value per entry",
             index_set->pos);
    } else {
      spec.index_set.kind = IndexKind::Finite;
      for (std::size_t k = 0; k < spec.inequality_list.size(); ++k)
        spec.index_set.values.push_back(static_cast<double>(k + 1));
    }
  } else if (index_set != nullptr) {
    fail("index_set given without inequalities", index_set->pos);
  }

  const Value* point = root.find("point");
  if (point == nullptr) fail("missing required key 'point'", {1, 1});
  spec.point = as_numbers(*point, "point");
  if (spec.point.size() != static_cast<std::size_t>(spec.n))
    throw DimensionError("line " + std::to_string(point->pos.line) + ":" +
                         std::to_string(point->pos.col) + ": point has " +
                         std::to_string(spec.point.size()) + " entries, expected dim = " +
                         std::to_string(spec.n));
  return spec;
}

ProblemSpec load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("cannot read problem file '" + path.string() + "'");
  return load_problem(buf.str());
}

}  // namespace cqcert::model
