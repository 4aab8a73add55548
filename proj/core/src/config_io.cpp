#include "gsrisk/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "gsrisk/errors.hpp"

namespace gsrisk {
namespace {

enum class TokenKind { identifier, number, equals, open_brace, close_brace, end };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == ',') {
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '=') {
      tokens.push_back({TokenKind::equals, "=", line});
      ++i;
    } else if (c == '{') {
      tokens.push_back({TokenKind::open_brace, "{", line});
      ++i;
    } else if (c == '}') {
      tokens.push_back({TokenKind::close_brace, "}", line});
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      tokens.push_back({TokenKind::identifier, std::string(text.substr(i, j - i)), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
                                 text[j] == '-' || text[j] == '+'))
        ++j;
      tokens.push_back({TokenKind::number, std::string(text.substr(i, j - i)), line});
      i = j;
    } else {
      throw ParseError(line, "", std::string("unexpected character '") + c + "'");
    }
  }
  tokens.push_back({TokenKind::end, "", line});
  return tokens;
}

struct Value {
  std::string text;
  std::size_t line;
};

using Fields = std::map<std::string, Value>;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  // key = value, where value is a number or identifier (true/false).
  void assignment(const Token& key, Fields& fields) {
    const Token& eq = take();
    if (eq.kind != TokenKind::equals) throw ParseError(eq.line, key.text, "expected '='");
    const Token& value = take();
    if (value.kind != TokenKind::number && value.kind != TokenKind::identifier)
      throw ParseError(value.line, key.text, "expected a value");
    if (!fields.emplace(key.text, Value{value.text, value.line}).second)
      throw ParseError(key.line, key.text, "duplicate field");
  }

  Fields block(const Token& name) {
    const Token& open = take();
    if (open.kind != TokenKind::open_brace) throw ParseError(open.line, name.text, "expected '{'");
    Fields fields;
    for (;;) {
      const Token& t = take();
      if (t.kind == TokenKind::close_brace) return fields;
      if (t.kind == TokenKind::end) throw ParseError(t.line, name.text, "unterminated block");
      if (t.kind != TokenKind::identifier) throw ParseError(t.line, name.text, "expected a field name");
      assignment(t, fields);
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

double to_number(const Value& v, const std::string& field) {
  double out = 0.0;
  const char* first = v.text.data();
  const char* last = first + v.text.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(v.line, field, "'" + v.text + "' is not a number");
  return out;
}

int to_count(const Value& v, const std::string& field) {
  int out = 0;
  const auto res = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
  if (res.ec != std::errc() || res.ptr != v.text.data() + v.text.size())
    throw ParseError(v.line, field, "'" + v.text + "' is not an integer");
  return out;
}

bool to_bool(const Value& v, const std::string& field) {
  if (v.text == "true") return true;
  if (v.text == "false") return false;
  throw ParseError(v.line, field, "expected true or false");
}

const Value& require(const Fields& fields, const std::string& field, const std::string& block,
                     std::size_t line) {
  const auto it = fields.find(field);
  if (it == fields.end()) throw ParseError(line, block + "." + field, "missing required field");
  return it->second;
}

void reject_unknown(const Fields& fields, std::initializer_list<std::string_view> known,
                    const std::string& block) {
  for (const auto& [key, value] : fields)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ParseError(value.line, block + "." + key, "unknown field");
}

GaussianComponent component(const Fields& fields, const std::string& block, std::size_t line) {
  reject_unknown(fields, {"forecast_mw", "sigma_mw", "truncate_at_zero"}, block);
  GaussianComponent c;
  c.forecast_mw = to_number(require(fields, "forecast_mw", block, line), block + ".forecast_mw");
  c.sigma_mw = to_number(require(fields, "sigma_mw", block, line), block + ".sigma_mw");
  if (auto it = fields.find("truncate_at_zero"); it != fields.end())
    c.truncate_at_zero = to_bool(it->second, block + ".truncate_at_zero");
  return c;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

SystemModel parse_model(std::string_view text) {
  Parser parser(tokenize(text));
  std::optional<double> lead_time;
  std::vector<Station> stations;
  UncertaintyModel uncertainty;

  for (;;) {
    const Token& t = parser.take();
    if (t.kind == TokenKind::end) break;
    if (t.kind != TokenKind::identifier) throw ParseError(t.line, "", "expected a field or block name");

    if (t.text == "lead_time_hours") {
      Fields f;
      parser.assignment(t, f);
      if (lead_time) throw ParseError(t.line, t.text, "duplicate field");
      lead_time = to_number(f.at(t.text), t.text);
    } else if (t.text == "station") {
      const Fields f = parser.block(t);
      const std::string name = "station[" + std::to_string(stations.size()) + "]";
      reject_unknown(f, {"count", "capacity_mw", "outage_rate_per_hour"}, name);
      Station s;
      s.unit_count = to_count(require(f, "count", name, t.line), name + ".count");
      s.unit_capacity_mw = to_number(require(f, "capacity_mw", name, t.line), name + ".capacity_mw");
      s.outage_rate_per_hour =
          to_number(require(f, "outage_rate_per_hour", name, t.line), name + ".outage_rate_per_hour");
      stations.push_back(s);
    } else if (t.text == "load" || t.text == "wind") {
      auto& slot = t.text == "load" ? uncertainty.load : uncertainty.wind;
      if (slot) throw ParseError(t.line, t.text, "duplicate block");
      slot = component(parser.block(t), t.text, t.line);
    } else {
      throw ParseError(t.line, t.text, "unknown field or block");
    }
  }

  if (!lead_time) throw ParseError(1, "lead_time_hours", "missing required field");
  return SystemModel(std::move(stations), *lead_time, uncertainty);
}

SystemModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_model(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.field(), path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string serialize_model(const SystemModel& model) {
  std::ostringstream out;
  out << "lead_time_hours = " << shortest(model.lead_time_hours()) << "\n";
  for (const Station& s : model.stations()) {
    out << "station {\n"
        << "  count = " << s.unit_count << "\n"
        << "  capacity_mw = " << shortest(s.unit_capacity_mw) << "\n"
        << "  outage_rate_per_hour = " << shortest(s.outage_rate_per_hour) << "\n"
        << "}\n";
  }
  const auto write = [&](const char* name, const std::optional<GaussianComponent>& c) {
    if (!c) return;
    out << name << " {\n"
        << "  forecast_mw = " << shortest(c->forecast_mw) << "\n"
        << "  sigma_mw = " << shortest(c->sigma_mw) << "\n";
    if (c->truncate_at_zero) out << "  truncate_at_zero = true\n";
    out << "}\n";
  };
  write("load", model.uncertainty().load);
  write("wind", model.uncertainty().wind);
  return out.str();
}

}  // namespace gsrisk
