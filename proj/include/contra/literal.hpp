// Copyright (C) 2026 The contra-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace contra {

using BigInt = boost::multiprecision::cpp_int;

class LiteralValue;

struct ListItems {
  std::vector<LiteralValue> items;
};
struct TupleItems {
  std::vector<LiteralValue> items;
};
struct SetItems {
  std::vector<LiteralValue> items;
};
struct MappingItems {
  std::vector<std::pair<LiteralValue, LiteralValue>> entries;
};

enum class LiteralKind { None, Boolean, Integer, Float, Text, List, Tuple, Set, Mapping };

inline std::string_view to_string(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::None: return "none";
    case LiteralKind::Boolean: return "boolean";
    case LiteralKind::Integer: return "integer";
    case LiteralKind::Float: return "float";
    case LiteralKind::Text: return "text";
    case LiteralKind::List: return "list";
    case LiteralKind::Tuple: return "tuple";
    case LiteralKind::Set: return "set";
    case LiteralKind::Mapping: return "mapping";
  }
  return "unknown";
}

struct EqualityConfig {
  // 0 means exact float comparison; otherwise math.isclose-style relative tolerance.
  double rel_tol = 0.0;
};

/// An immutable value from the subject language's literal grammar.
///
/// Sets and mappings are built through the named constructors, which collapse
/// duplicates the way the subject language does (first element wins for sets,
/// first key with last value for mappings), so their elements and keys are
/// always pairwise unequal.
class LiteralValue {
 public:
  LiteralValue() = default;

  static LiteralValue none() { return LiteralValue{}; }
  static LiteralValue boolean(bool b) { return LiteralValue{Storage{b}}; }
  static LiteralValue integer(BigInt i) { return LiteralValue{Storage{std::move(i)}}; }
  static LiteralValue integer(long long i) { return LiteralValue{Storage{BigInt{i}}}; }
  static LiteralValue floating(double d) { return LiteralValue{Storage{d}}; }
  static LiteralValue text(std::string s) { return LiteralValue{Storage{std::move(s)}}; }
  static LiteralValue list(std::vector<LiteralValue> items) {
    return LiteralValue{Storage{ListItems{std::move(items)}}};
  }
  static LiteralValue tuple(std::vector<LiteralValue> items) {
    return LiteralValue{Storage{TupleItems{std::move(items)}}};
  }
  static LiteralValue set(std::vector<LiteralValue> items);
  static LiteralValue mapping(std::vector<std::pair<LiteralValue, LiteralValue>> entries);

  LiteralKind kind() const { return static_cast<LiteralKind>(storage_.index()); }
  bool is(LiteralKind k) const { return kind() == k; }

  bool as_bool() const { return std::get<bool>(storage_); }
  const BigInt& as_integer() const { return std::get<BigInt>(storage_); }
  double as_float() const { return std::get<double>(storage_); }
  const std::string& as_text() const { return std::get<std::string>(storage_); }

  /// Elements of a list, tuple or set.
  const std::vector<LiteralValue>& elements() const;
  const std::vector<std::pair<LiteralValue, LiteralValue>>& entries() const {
    return std::get<MappingItems>(storage_).entries;
  }

  /// Mapping lookup under exact equality; nullptr when absent or not a mapping.
  const LiteralValue* find(const LiteralValue& key) const;
  const LiteralValue* find(std::string_view key) const { return find(text(std::string{key})); }

  bool hashable() const;

 private:
  using Storage = std::variant<std::monostate, bool, BigInt, double, std::string, ListItems,
                               TupleItems, SetItems, MappingItems>;
  explicit LiteralValue(Storage s) : storage_(std::move(s)) {}

  Storage storage_;
};

bool values_equal(const LiteralValue& a, const LiteralValue& b, const EqualityConfig& cfg = {});

// ---------------------------------------------------------------------------
// Errors

enum class LiteralErrorKind { Syntax, UnsafeExpression, DepthExceeded, NonFiniteFloat };

inline std::string_view to_string(LiteralErrorKind kind) {
  switch (kind) {
    case LiteralErrorKind::Syntax: return "SyntaxError";
    case LiteralErrorKind::UnsafeExpression: return "UnsafeExpression";
    case LiteralErrorKind::DepthExceeded: return "DepthExceeded";
    case LiteralErrorKind::NonFiniteFloat: return "NonFiniteFloat";
  }
  return "LiteralError";
}

class LiteralError : public std::runtime_error {
 public:
  LiteralError(LiteralErrorKind kind, std::size_t offset, const std::string& what)
      : std::runtime_error(std::string{to_string(kind)} + " at offset " +
                           std::to_string(offset) + ": " + what),
        kind_(kind),
        offset_(offset) {}

  LiteralErrorKind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  LiteralErrorKind kind_;
  std::size_t offset_;
};

struct ParseOptions {
  std::size_t max_depth = 64;
  // Accept `1, 2` at top level as a tuple.
  bool allow_bare_tuple = true;
};

// ---------------------------------------------------------------------------
// Equality

namespace detail {

inline bool is_numeric(LiteralKind k) {
  return k == LiteralKind::Boolean || k == LiteralKind::Integer || k == LiteralKind::Float;
}

inline BigInt numeric_as_int(const LiteralValue& v) {
  if (v.is(LiteralKind::Boolean)) return BigInt{v.as_bool() ? 1 : 0};
  return v.as_integer();
}

// Exact comparison of an integer against a binary64 value.
inline bool int_equals_float(const BigInt& i, double d) {
  if (!std::isfinite(d) || std::trunc(d) != d) return false;
  return i == BigInt{d};
}

inline bool floats_close(double a, double b, double rel_tol) {
  if (a == b) return true;
  if (rel_tol <= 0.0 || !std::isfinite(a) || !std::isfinite(b)) return false;
  return std::fabs(a - b) <= rel_tol * std::max(std::fabs(a), std::fabs(b));
}

inline bool numeric_equal(const LiteralValue& a, const LiteralValue& b, const EqualityConfig& cfg) {
  const bool af = a.is(LiteralKind::Float);
  const bool bf = b.is(LiteralKind::Float);
  if (af && bf) return floats_close(a.as_float(), b.as_float(), cfg.rel_tol);
  if (!af && !bf) return numeric_as_int(a) == numeric_as_int(b);
  const LiteralValue& f = af ? a : b;
  const LiteralValue& i = af ? b : a;
  const BigInt iv = numeric_as_int(i);
  if (int_equals_float(iv, f.as_float())) return true;
  if (cfg.rel_tol > 0.0) return floats_close(iv.convert_to<double>(), f.as_float(), cfg.rel_tol);
  return false;
}

inline bool contains(const std::vector<LiteralValue>& items, const LiteralValue& v,
                     const EqualityConfig& cfg) {
  return std::any_of(items.begin(), items.end(),
                     [&](const LiteralValue& x) { return values_equal(x, v, cfg); });
}

}  // namespace detail

inline bool values_equal(const LiteralValue& a, const LiteralValue& b, const EqualityConfig& cfg) {
  const LiteralKind ka = a.kind();
  const LiteralKind kb = b.kind();
  if (detail::is_numeric(ka) && detail::is_numeric(kb)) return detail::numeric_equal(a, b, cfg);
  if (ka != kb) return false;
  switch (ka) {
    case LiteralKind::None: return true;
    case LiteralKind::Text: return a.as_text() == b.as_text();
    case LiteralKind::List:
    case LiteralKind::Tuple: {
      const auto& xs = a.elements();
      const auto& ys = b.elements();
      if (xs.size() != ys.size()) return false;
      for (std::size_t i = 0; i < xs.size(); ++i)
        if (!values_equal(xs[i], ys[i], cfg)) return false;
      return true;
    }
    case LiteralKind::Set: {
      const auto& xs = a.elements();
      const auto& ys = b.elements();
      if (xs.size() != ys.size()) return false;
      return std::all_of(xs.begin(), xs.end(),
                         [&](const LiteralValue& x) { return detail::contains(ys, x, cfg); });
    }
    case LiteralKind::Mapping: {
      const auto& xs = a.entries();
      const auto& ys = b.entries();
      if (xs.size() != ys.size()) return false;
      for (const auto& [key, value] : xs) {
        auto it = std::find_if(ys.begin(), ys.end(),
                               [&](const auto& e) { return values_equal(e.first, key, cfg); });
        if (it == ys.end() || !values_equal(it->second, value, cfg)) return false;
      }
      return true;
    }
    default: return false;
  }
}

inline LiteralValue LiteralValue::set(std::vector<LiteralValue> items) {
  std::vector<LiteralValue> unique;
  unique.reserve(items.size());
  for (auto& item : items)
    if (!detail::contains(unique, item, {})) unique.push_back(std::move(item));
  return LiteralValue{Storage{SetItems{std::move(unique)}}};
}

inline LiteralValue LiteralValue::mapping(std::vector<std::pair<LiteralValue, LiteralValue>> entries) {
  std::vector<std::pair<LiteralValue, LiteralValue>> unique;
  unique.reserve(entries.size());
  for (auto& [key, value] : entries) {
    auto it = std::find_if(unique.begin(), unique.end(),
                           [&](const auto& e) { return values_equal(e.first, key, {}); });
    if (it == unique.end())
      unique.emplace_back(std::move(key), std::move(value));
    else
      it->second = std::move(value);
  }
  return LiteralValue{Storage{MappingItems{std::move(unique)}}};
}

inline const std::vector<LiteralValue>& LiteralValue::elements() const {
  switch (kind()) {
    case LiteralKind::List: return std::get<ListItems>(storage_).items;
    case LiteralKind::Tuple: return std::get<TupleItems>(storage_).items;
    case LiteralKind::Set: return std::get<SetItems>(storage_).items;
    default: throw std::logic_error("elements() on a non-sequence literal");
  }
}

inline const LiteralValue* LiteralValue::find(const LiteralValue& key) const {
  if (!is(LiteralKind::Mapping)) return nullptr;
  for (const auto& [k, v] : entries())
    if (values_equal(k, key)) return &v;
  return nullptr;
}

inline bool LiteralValue::hashable() const {
  switch (kind()) {
    case LiteralKind::List:
    case LiteralKind::Set:
    case LiteralKind::Mapping: return false;
    case LiteralKind::Tuple:
      return std::all_of(elements().begin(), elements().end(),
                         [](const LiteralValue& v) { return v.hashable(); });
    default: return true;
  }
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

// Shortest round-trip digits, laid out the way the subject language's repr does.
inline std::string render_float(double d) {
  if (!std::isfinite(d))
    throw LiteralError(LiteralErrorKind::NonFiniteFloat, 0, "cannot render NaN or infinity");
  if (d == 0.0) return std::signbit(d) ? "-0.0" : "0.0";

  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(d), std::chars_format::scientific);
  std::string_view sci(buf, static_cast<std::size_t>(res.ptr - buf));
  const auto epos = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, epos))
    if (c != '.') digits.push_back(c);
  int exponent = 0;
  std::from_chars(sci.data() + epos + 1 + (sci[epos + 1] == '+' ? 1 : 0), sci.data() + sci.size(),
                  exponent);
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

  std::string out = d < 0 ? "-" : "";
  if (exponent < -4 || exponent >= 16) {
    out += digits[0];
    if (digits.size() > 1) {
      out += '.';
      out.append(digits, 1);
    }
    out += 'e';
    out += exponent < 0 ? '-' : '+';
    const int mag = std::abs(exponent);
    if (mag < 10) out += '0';
    out += std::to_string(mag);
  } else if (exponent >= 0) {
    const auto int_len = static_cast<std::size_t>(exponent) + 1;
    if (digits.size() <= int_len) {
      out += digits;
      out.append(int_len - digits.size(), '0');
      out += ".0";
    } else {
      out.append(digits, 0, int_len);
      out += '.';
      out.append(digits, int_len);
    }
  } else {
    out += "0.";
    out.append(static_cast<std::size_t>(-exponent - 1), '0');
    out += digits;
  }
  return out;
}

inline std::string render_text(const std::string& s) {
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "'";
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          out += "\\x";
          out += hex[c >> 4];
          out += hex[c & 0xf];
        } else {
          out += ch;
        }
    }
  }
  out += '\'';
  return out;
}

inline void render_into(std::string& out, const LiteralValue& v);

inline void render_joined(std::string& out, const std::vector<LiteralValue>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    render_into(out, items[i]);
  }
}

inline void render_into(std::string& out, const LiteralValue& v) {
  switch (v.kind()) {
    case LiteralKind::None: out += "None"; break;
    case LiteralKind::Boolean: out += v.as_bool() ? "True" : "False"; break;
    case LiteralKind::Integer: out += v.as_integer().str(); break;
    case LiteralKind::Float: out += render_float(v.as_float()); break;
    case LiteralKind::Text: out += render_text(v.as_text()); break;
    case LiteralKind::List:
      out += '[';
      render_joined(out, v.elements());
      out += ']';
      break;
    case LiteralKind::Tuple:
      out += '(';
      render_joined(out, v.elements());
      if (v.elements().size() == 1) out += ',';
      out += ')';
      break;
    case LiteralKind::Set: {
      if (v.elements().empty()) {
        out += "set()";
        break;
      }
      std::vector<std::string> parts;
      for (const auto& e : v.elements()) {
        std::string part;
        render_into(part, e);
        parts.push_back(std::move(part));
      }
      std::sort(parts.begin(), parts.end());
      out += '{';
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
      }
      out += '}';
      break;
    }
    case LiteralKind::Mapping: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : v.entries()) {
        if (!first) out += ", ";
        first = false;
        render_into(out, key);
        out += ": ";
        render_into(out, value);
      }
      out += '}';
      break;
    }
  }
}

}  // namespace detail

/// Canonical text form. Throws LiteralError(NonFiniteFloat) on NaN or infinity.
inline std::string render_literal(const LiteralValue& v) {
  std::string out;
  detail::render_into(out, v);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

/// Recursive-descent reader for the pure literal grammar. Never evaluates
/// anything: names other than None/True/False, calls, attribute access,
/// subscripts and operators other than a numeric sign are rejected.
class LiteralReader {
 public:
  LiteralReader(std::string_view text, ParseOptions options = {})
      : text_(text), options_(options) {}

  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }
  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  /// Reads one element (no bare top-level tuple).
  LiteralValue read_value() { return read_element(0); }

  /// Reads a complete top-level expression and requires the input to end there.
  LiteralValue read_all() {
    LiteralValue first = read_element(0);
    if (options_.allow_bare_tuple && peek() == ',') {
      std::vector<LiteralValue> items{std::move(first)};
      while (consume(",")) {
        if (at_end()) break;
        items.push_back(read_element(0));
      }
      first = LiteralValue::tuple(std::move(items));
    }
    if (!at_end()) fail_trailing();
    return first;
  }

  /// Identifier at the cursor, or empty.
  std::string_view read_identifier() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && is_ident_start(text_[pos_])) {
      ++pos_;
      while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  [[noreturn]] void fail(LiteralErrorKind kind, const std::string& what) const {
    throw LiteralError(kind, pos_, what);
  }

  // Classifies an unexpected character following a complete value.
  [[noreturn]] void fail_trailing() {
    const char c = peek();
    if (is_ident_start(c) || std::string_view{"+-*/%@&|^~<>=!.([:"}.find(c) != std::string_view::npos)
      fail(LiteralErrorKind::UnsafeExpression, std::string{"operator or name '"} + c + "' after value");
    fail(LiteralErrorKind::Syntax, std::string{"unexpected character '"} + c + "'");
  }

  static bool is_ident_start(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || u >= 0x80;
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

 private:
  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r' || text_[pos_] == '\f' || text_[pos_] == '\v'))
      ++pos_;
  }

  void enter(std::size_t depth) const {
    if (depth >= options_.max_depth)
      fail(LiteralErrorKind::DepthExceeded,
           "nesting deeper than " + std::to_string(options_.max_depth));
  }

  // After an element inside a container, the next token must be one of `allowed`.
  void expect_separator(std::string_view allowed) {
    const char c = peek();
    if (c == '\0') fail(LiteralErrorKind::Syntax, "unexpected end of input");
    if (allowed.find(c) == std::string_view::npos) fail_trailing();
  }

  LiteralValue read_element(std::size_t depth) {
    const char c = peek();
    if (c == '\0') fail(LiteralErrorKind::Syntax, "unexpected end of input");
    if (c == '-' || c == '+') {
      ++pos_;
      const char n = peek();
      if (!((n >= '0' && n <= '9') || n == '.'))
        fail(LiteralErrorKind::UnsafeExpression, "sign applied to a non-number");
      LiteralValue v = read_number();
      if (c == '+') return v;
      if (v.is(LiteralKind::Float)) return LiteralValue::floating(-v.as_float());
      return LiteralValue::integer(BigInt{-v.as_integer()});
    }
    if ((c >= '0' && c <= '9') || c == '.') return read_number();
    if (c == '\'' || c == '"') return read_strings();
    if (c == '[') return read_list(depth);
    if (c == '(') return read_paren(depth);
    if (c == '{') return read_brace(depth);
    if (is_ident_start(c)) return read_name();
    if (c == '*') fail(LiteralErrorKind::UnsafeExpression, "unpacking is not a literal");
    fail(LiteralErrorKind::Syntax, std::string{"unexpected character '"} + c + "'");
  }

  LiteralValue read_name() {
    const std::size_t start = pos_;
    const std::string_view name = read_identifier();
    if (pos_ < text_.size() && (text_[pos_] == '\'' || text_[pos_] == '"') && name.size() <= 2) {
      pos_ = start;
      return read_strings();
    }
    if (name == "None") return LiteralValue::none();
    if (name == "True") return LiteralValue::boolean(true);
    if (name == "False") return LiteralValue::boolean(false);
    if (name == "set") {
      const std::size_t after = pos_;
      if (consume("(") && consume(")")) return LiteralValue::set({});
      pos_ = after;
      fail(LiteralErrorKind::UnsafeExpression, "call to 'set' with arguments");
    }
    pos_ = start;
    fail(LiteralErrorKind::UnsafeExpression, "name '" + std::string{name} + "' is not a literal");
  }

  static bool valid_digit_groups(std::string_view s, bool (*is_digit)(char)) {
    if (s.empty() || s.front() == '_' || s.back() == '_') return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '_') {
        if (s[i + 1] == '_') return false;
      } else if (!is_digit(s[i])) {
        return false;
      }
    }
    return true;
  }

  static bool is_dec(char c) { return c >= '0' && c <= '9'; }
  static bool is_hex(char c) {
    return is_dec(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
  }
  static bool is_oct(char c) { return c >= '0' && c <= '7'; }
  static bool is_bin(char c) { return c == '0' || c == '1'; }

  static int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return c - 'A' + 10;
  }

  static BigInt accumulate(std::string_view digits, int base) {
    BigInt v = 0;
    for (char c : digits) {
      if (c == '_') continue;
      v *= base;
      v += digit_value(c);
    }
    return v;
  }

  void reject_number_suffix() {
    if (pos_ < text_.size() && is_ident_char(text_[pos_])) {
      if (text_[pos_] == 'j' || text_[pos_] == 'J')
        fail(LiteralErrorKind::Syntax, "complex literals are not supported");
      fail(LiteralErrorKind::Syntax, "invalid numeric literal");
    }
  }

  LiteralValue read_number() {
    const std::size_t start = pos_;
    auto take = [&](bool (*pred)(char)) {
      while (pos_ < text_.size() && (pred(text_[pos_]) || text_[pos_] == '_')) ++pos_;
    };
    if (text_[pos_] == '0' && pos_ + 1 < text_.size()) {
      const char p = text_[pos_ + 1];
      int base = 0;
      bool (*pred)(char) = nullptr;
      if (p == 'x' || p == 'X') base = 16, pred = is_hex;
      if (p == 'o' || p == 'O') base = 8, pred = is_oct;
      if (p == 'b' || p == 'B') base = 2, pred = is_bin;
      if (base) {
        pos_ += 2;
        const std::size_t digits_start = pos_;
        take(pred);
        std::string_view digits = text_.substr(digits_start, pos_ - digits_start);
        // A single leading underscore is allowed after the base prefix.
        if (!digits.empty() && digits.front() == '_') digits.remove_prefix(1);
        if (!valid_digit_groups(digits, pred)) fail(LiteralErrorKind::Syntax, "invalid integer literal");
        reject_number_suffix();
        return LiteralValue::integer(accumulate(digits, base));
      }
    }

    take(is_dec);
    const std::string_view int_part = text_.substr(start, pos_ - start);
    bool is_float = false;
    std::string_view frac_part;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_float = true;
      ++pos_;
      const std::size_t fs = pos_;
      take(is_dec);
      frac_part = text_.substr(fs, pos_ - fs);
    }
    std::string_view exp_part;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_dec(text_[p])) {
        is_float = true;
        pos_ = p;
        take(is_dec);
        exp_part = text_.substr(p, pos_ - p);
      }
    }
    reject_number_suffix();

    if (int_part.empty() && frac_part.empty()) fail(LiteralErrorKind::Syntax, "invalid number");
    if (!int_part.empty() && !valid_digit_groups(int_part, is_dec))
      fail(LiteralErrorKind::Syntax, "invalid digit grouping");
    if (!frac_part.empty() && !valid_digit_groups(frac_part, is_dec))
      fail(LiteralErrorKind::Syntax, "invalid digit grouping");
    if (!exp_part.empty() && !valid_digit_groups(exp_part, is_dec))
      fail(LiteralErrorKind::Syntax, "invalid exponent");

    if (!is_float) {
      if (int_part.size() > 1 && int_part.front() == '0' &&
          int_part.find_first_not_of("0_") != std::string_view::npos)
        fail(LiteralErrorKind::Syntax, "leading zeros in decimal integer literal");
      return LiteralValue::integer(accumulate(int_part, 10));
    }

    std::string cleaned;
    for (char ch : text_.substr(start, pos_ - start))
      if (ch != '_') cleaned.push_back(ch);
    double d = 0.0;
    const auto res = std::from_chars(cleaned.data(), cleaned.data() + cleaned.size(), d);
    if (res.ec == std::errc::result_out_of_range) d = std::strtod(cleaned.c_str(), nullptr);
    if (!std::isfinite(d)) fail(LiteralErrorKind::NonFiniteFloat, "float literal overflows");
    return LiteralValue::floating(d);
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  std::uint32_t read_hex_escape(std::size_t count) {
    if (pos_ + count > text_.size()) fail(LiteralErrorKind::Syntax, "truncated escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const char h = text_[pos_ + i];
      if (!is_hex(h)) fail(LiteralErrorKind::Syntax, "invalid hex escape");
      cp = cp * 16 + static_cast<std::uint32_t>(digit_value(h));
    }
    pos_ += count;
    return cp;
  }

  void read_one_string(std::string& out) {
    bool raw = false;
    while (pos_ < text_.size() && is_ident_start(text_[pos_])) {
      const char p = static_cast<char>(text_[pos_] | 0x20);
      if (p == 'r') raw = true;
      else if (p == 'b') fail(LiteralErrorKind::Syntax, "byte strings are not supported");
      else if (p == 'f') fail(LiteralErrorKind::UnsafeExpression, "f-strings evaluate expressions");
      else if (p != 'u') fail(LiteralErrorKind::Syntax, "invalid string prefix");
      ++pos_;
    }
    const char quote = text_[pos_];
    const bool triple = text_.substr(pos_, 3) == std::string(3, quote);
    pos_ += triple ? 3 : 1;
    for (;;) {
      if (pos_ >= text_.size()) fail(LiteralErrorKind::Syntax, "unterminated string");
      const char c = text_[pos_];
      if (c == quote) {
        if (!triple) {
          ++pos_;
          return;
        }
        if (text_.substr(pos_, 3) == std::string(3, quote)) {
          pos_ += 3;
          return;
        }
      }
      if (!triple && c == '\n') fail(LiteralErrorKind::Syntax, "newline in single-quoted string");
      if (c != '\\') {
        out += c;
        ++pos_;
        continue;
      }
      if (pos_ + 1 >= text_.size()) fail(LiteralErrorKind::Syntax, "unterminated string");
      const char e = text_[pos_ + 1];
      if (raw) {
        out += c;
        out += e;
        pos_ += 2;
        continue;
      }
      pos_ += 2;
      switch (e) {
        case '\n': break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        case 'a': out += '\a'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'v': out += '\v'; break;
        case 'x': append_utf8(out, read_hex_escape(2)); break;
        case 'u':
        case 'U': {
          const std::uint32_t cp = read_hex_escape(e == 'u' ? 4 : 8);
          if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            fail(LiteralErrorKind::Syntax, "escape is not a valid code point");
          append_utf8(out, cp);
          break;
        }
        case 'N': fail(LiteralErrorKind::Syntax, "named unicode escapes are not supported");
        default:
          if (is_oct(e)) {
            std::uint32_t cp = static_cast<std::uint32_t>(e - '0');
            for (int i = 0; i < 2 && pos_ < text_.size() && is_oct(text_[pos_]); ++i)
              cp = cp * 8 + static_cast<std::uint32_t>(text_[pos_++] - '0');
            append_utf8(out, cp);
          } else {
            out += '\\';
            out += e;
          }
      }
    }
  }

  bool string_starts_here() {
    std::size_t p = pos_;
    while (p < text_.size() && p - pos_ < 2 && is_ident_start(text_[p])) ++p;
    return p < text_.size() && (text_[p] == '\'' || text_[p] == '"');
  }

  // Adjacent string literals concatenate.
  LiteralValue read_strings() {
    std::string out;
    do {
      read_one_string(out);
      skip_space();
    } while (pos_ < text_.size() && string_starts_here());
    return LiteralValue::text(std::move(out));
  }

  std::vector<LiteralValue> read_items(char close, std::size_t depth) {
    std::vector<LiteralValue> items;
    while (!consume(std::string_view{&close, 1})) {
      items.push_back(read_element(depth + 1));
      expect_separator(close == ']' ? ",]" : close == ')' ? ",)" : ",}");
      consume(",");
    }
    return items;
  }

  LiteralValue read_list(std::size_t depth) {
    enter(depth);
    ++pos_;
    return LiteralValue::list(read_items(']', depth));
  }

  LiteralValue read_paren(std::size_t depth) {
    enter(depth);
    ++pos_;
    if (consume(")")) return LiteralValue::tuple({});
    LiteralValue first = read_element(depth + 1);
    expect_separator(",)");
    if (consume(")")) return first;
    consume(",");
    std::vector<LiteralValue> items{std::move(first)};
    auto rest = read_items(')', depth);
    for (auto& r : rest) items.push_back(std::move(r));
    return LiteralValue::tuple(std::move(items));
  }

  void require_hashable(const LiteralValue& v, std::size_t at) const {
    if (!v.hashable())
      throw LiteralError(LiteralErrorKind::Syntax, at,
                         "unhashable " + std::string{to_string(v.kind())} + " used as key or set element");
  }

  LiteralValue read_brace(std::size_t depth) {
    enter(depth);
    ++pos_;
    if (consume("}")) return LiteralValue::mapping({});
    if (peek() == '*') fail(LiteralErrorKind::UnsafeExpression, "unpacking is not a literal");
    std::size_t at = pos_;
    LiteralValue first = read_element(depth + 1);
    require_hashable(first, at);
    if (peek() != ':') {
      expect_separator(",}");
      std::vector<LiteralValue> items{std::move(first)};
      while (consume(",")) {
        if (consume("}")) return LiteralValue::set(std::move(items));
        at = pos_;
        items.push_back(read_element(depth + 1));
        require_hashable(items.back(), at);
        expect_separator(",}");
      }
      consume("}");
      return LiteralValue::set(std::move(items));
    }
    std::vector<std::pair<LiteralValue, LiteralValue>> entries;
    LiteralValue key = std::move(first);
    for (;;) {
      if (!consume(":")) expect_separator(":");
      LiteralValue value = read_element(depth + 1);
      entries.emplace_back(std::move(key), std::move(value));
      expect_separator(",}");
      if (consume("}")) break;
      consume(",");
      if (consume("}")) break;
      if (peek() == '*') fail(LiteralErrorKind::UnsafeExpression, "unpacking is not a literal");
      at = pos_;
      key = read_element(depth + 1);
      require_hashable(key, at);
    }
    return LiteralValue::mapping(std::move(entries));
  }

  std::string_view text_;
  ParseOptions options_;
  std::size_t pos_ = 0;
};

inline LiteralValue parse_literal(std::string_view text, const ParseOptions& options = {}) {
  LiteralReader reader(text, options);
  if (reader.at_end()) reader.fail(LiteralErrorKind::Syntax, "empty input");
  return reader.read_all();
}

}  // namespace contra
