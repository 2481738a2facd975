#include "peo/rdf_reader.hpp"

#include <cctype>
#include <map>
#include <optional>

#include "peo/error.hpp"
#include "peo/turtle.hpp"

namespace peo {

namespace {

std::string xsd(std::string_view local) { return std::string(kXsdNs) + std::string(local); }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class TurtleParser {
 public:
  explicit TurtleParser(std::string_view text) : s_(text) {}

  std::vector<Triple> parse() {
    for (;;) {
      skip_ws();
      if (at_end()) break;
      statement();
    }
    return std::move(triples_);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::string base_;
  std::map<std::string, std::string, std::less<>> prefixes_;
  std::vector<Triple> triples_;
  std::size_t blank_counter_ = 0;

  [[noreturn]] void fail(std::string_view what) const { throw RdfSyntaxError(line_, what); }

  bool at_end() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
  char get() {
    if (at_end()) fail("unexpected end of input");
    char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    get();
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == '#') {
        while (!at_end() && peek() != '\n') get();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        get();
      } else {
        break;
      }
    }
  }

  bool starts_with_keyword(std::string_view kw, bool case_insensitive) const {
    if (s_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      char a = s_[pos_ + i];
      char b = kw[i];
      if (case_insensitive ? std::toupper(static_cast<unsigned char>(a)) != b : a != b) return false;
    }
    char after = peek(kw.size());
    return !std::isalnum(static_cast<unsigned char>(after)) && after != '_' && after != ':';
  }

  void statement() {
    if (peek() == '@') {
      if (starts_with_keyword("@prefix", false)) {
        pos_ += 7;
        prefix_decl();
        expect('.');
        return;
      }
      if (starts_with_keyword("@base", false)) {
        pos_ += 5;
        skip_ws();
        base_ = iri_ref();
        expect('.');
        return;
      }
      fail("unknown directive");
    }
    if (starts_with_keyword("PREFIX", true)) {
      pos_ += 6;
      prefix_decl();
      return;
    }
    if (starts_with_keyword("BASE", true)) {
      pos_ += 4;
      skip_ws();
      base_ = iri_ref();
      return;
    }
    Term subject = subject_term();
    skip_ws();
    if (subject.type == Term::Type::Blank && peek() == '.' && last_was_bracket_) {
      last_was_bracket_ = false;
      get();
      return;
    }
    predicate_object_list(subject);
    expect('.');
  }

  bool last_was_bracket_ = false;

  void prefix_decl() {
    skip_ws();
    std::string name;
    while (!at_end() && peek() != ':') {
      char c = get();
      if (std::isspace(static_cast<unsigned char>(c))) fail("malformed prefix name");
      name.push_back(c);
    }
    get();  // ':'
    skip_ws();
    prefixes_[name] = iri_ref();
  }

  std::string resolve(std::string iri) const {
    if (base_.empty()) return iri;
    auto colon = iri.find(':');
    bool absolute = colon != std::string::npos &&
                    iri.find_first_of("/?#") > colon;
    if (absolute) return iri;
    if (!iri.empty() && iri.front() == '#') {
      auto hash = base_.find('#');
      return base_.substr(0, hash) + iri;
    }
    auto slash = base_.rfind('/');
    return (slash == std::string::npos ? base_ : base_.substr(0, slash + 1)) + iri;
  }

  std::uint32_t hex_digits(int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) {
      char c = get();
      if (!std::isxdigit(static_cast<unsigned char>(c))) fail("bad unicode escape");
      v = v * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(c))
                                                  ? c - '0'
                                                  : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
    }
    return v;
  }

  std::string iri_ref() {
    if (peek() != '<') fail("expected IRI");
    get();
    std::string out;
    for (;;) {
      char c = get();
      if (c == '>') break;
      if (c == '\\') {
        char e = get();
        if (e == 'u')
          append_utf8(out, hex_digits(4));
        else if (e == 'U')
          append_utf8(out, hex_digits(8));
        else
          fail("bad IRI escape");
      } else if (c == '\n' || c == ' ' || c == '<' || c == '"') {
        fail("illegal character in IRI");
      } else {
        out.push_back(c);
      }
    }
    return resolve(std::move(out));
  }

  static bool local_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == '.' || c == ':' || c == '%' || u >= 0x80;
  }

  std::string prefixed_name() {
    std::string prefix;
    while (!at_end() && peek() != ':') {
      char c = peek();
      auto u = static_cast<unsigned char>(c);
      if (!(std::isalnum(u) || c == '_' || c == '-' || c == '.' || u >= 0x80)) fail("malformed name");
      prefix.push_back(get());
    }
    if (at_end()) fail("malformed prefixed name");
    get();  // ':'
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + "'");
    std::string local;
    while (!at_end()) {
      char c = peek();
      if (c == '\\') {
        get();
        local.push_back(get());
      } else if (local_char(c)) {
        local.push_back(get());
      } else {
        break;
      }
    }
    // A trailing '.' ends the statement rather than the name.
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
    }
    return it->second + local;
  }

  Term blank_label() {
    get();  // '_'
    if (get() != ':') fail("malformed blank node label");
    std::string label;
    while (!at_end() && local_char(peek())) label.push_back(get());
    while (!label.empty() && label.back() == '.') {
      label.pop_back();
      --pos_;
    }
    if (label.empty()) fail("empty blank node label");
    return {Term::Type::Blank, label, {}, {}};
  }

  Term fresh_blank() { return {Term::Type::Blank, "_b" + std::to_string(++blank_counter_), {}, {}}; }

  Term bracket_node() {
    get();  // '['
    Term node = fresh_blank();
    skip_ws();
    if (peek() != ']') predicate_object_list(node);
    expect(']');
    return node;
  }

  Term subject_term() {
    skip_ws();
    last_was_bracket_ = false;
    char c = peek();
    if (c == '<') return Term::iri(iri_ref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') {
      last_was_bracket_ = true;
      return bracket_node();
    }
    if (c == '(') fail("collections are not supported");
    return Term::iri(prefixed_name());
  }

  Term predicate_term() {
    skip_ws();
    if (peek() == 'a') {
      char after = peek(1);
      if (std::isspace(static_cast<unsigned char>(after)) || after == '<' || after == '[' ||
          after == '"' || after == '_') {
        get();
        return Term::iri(std::string(kRdfNs) + "type");
      }
    }
    if (peek() == '<') return Term::iri(iri_ref());
    return Term::iri(prefixed_name());
  }

  void predicate_object_list(const Term& subject) {
    for (;;) {
      Term predicate = predicate_term();
      for (;;) {
        Term object = object_term();
        triples_.push_back({subject, predicate, std::move(object)});
        skip_ws();
        if (peek() != ',') break;
        get();
      }
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        get();
        skip_ws();
      }
      char c = peek();
      if (c == '.' || c == ']' || at_end()) return;
    }
  }

  std::string quoted_string() {
    char q = get();
    bool long_form = peek() == q && peek(1) == q;
    if (long_form) {
      get();
      get();
    }
    std::string out;
    for (;;) {
      char c = get();
      if (c == q) {
        if (!long_form) break;
        if (peek() == q && peek(1) == q) {
          get();
          get();
          // """a"""" : extra quotes belong to the content
          while (peek() == q) out.push_back(get());
          break;
        }
        out.push_back(c);
        continue;
      }
      if (!long_form && (c == '\n' || c == '\r')) fail("newline in short string");
      if (c == '\\') {
        char e = get();
        switch (e) {
          case 't': out.push_back('\t'); break;
          case 'b': out.push_back('\b'); break;
          case 'n': out.push_back('\n'); break;
          case 'r': out.push_back('\r'); break;
          case 'f': out.push_back('\f'); break;
          case '"': out.push_back('"'); break;
          case '\'': out.push_back('\''); break;
          case '\\': out.push_back('\\'); break;
          case 'u': append_utf8(out, hex_digits(4)); break;
          case 'U': append_utf8(out, hex_digits(8)); break;
          default: fail("bad string escape");
        }
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  Term literal() {
    Term t{Term::Type::Literal, quoted_string(), xsd("string"), {}};
    if (peek() == '@') {
      get();
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
        t.language.push_back(get());
      t.datatype = std::string(kRdfNs) + "langString";
    } else if (peek() == '^' && peek(1) == '^') {
      get();
      get();
      t.datatype = peek() == '<' ? iri_ref() : prefixed_name();
    }
    return t;
  }

  std::optional<Term> number() {
    std::size_t start = pos_;
    std::size_t i = pos_;
    auto digit = [&](std::size_t k) {
      return k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]));
    };
    if (i < s_.size() && (s_[i] == '+' || s_[i] == '-')) ++i;
    std::size_t int_start = i;
    while (digit(i)) ++i;
    bool has_int = i > int_start;
    bool has_frac = false;
    if (i < s_.size() && s_[i] == '.' && digit(i + 1)) {
      ++i;
      while (digit(i)) ++i;
      has_frac = true;
    }
    if (!has_int && !has_frac) return std::nullopt;
    bool has_exp = false;
    if (i < s_.size() && (s_[i] == 'e' || s_[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
      if (digit(j)) {
        while (digit(j)) ++j;
        i = j;
        has_exp = true;
      }
    }
    pos_ = i;
    std::string lex(s_.substr(start, i - start));
    const char* dt = has_exp ? "double" : has_frac ? "decimal" : "integer";
    return Term{Term::Type::Literal, lex, xsd(dt), {}};
  }

  Term object_term() {
    skip_ws();
    char c = peek();
    if (c == '<') return Term::iri(iri_ref());
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return bracket_node();
    if (c == '(') fail("collections are not supported");
    if (c == '"' || c == '\'') return literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.') {
      if (auto n = number()) return *n;
      fail("malformed number");
    }
    if (starts_with_keyword("true", false) || starts_with_keyword("false", false)) {
      bool v = c == 't';
      pos_ += v ? 4 : 5;
      return {Term::Type::Literal, v ? "true" : "false", xsd("boolean"), {}};
    }
    return Term::iri(prefixed_name());
  }
};

std::string nt_term(const Term& t) {
  switch (t.type) {
    case Term::Type::Iri:
      return "<" + t.value + ">";
    case Term::Type::Blank:
      return "_:" + t.value;
    case Term::Type::Literal: {
      std::string out = "\"" + escape_literal(t.value) + "\"";
      if (!t.language.empty())
        out += "@" + t.language;
      else if (t.datatype != xsd("string"))
        out += "^^<" + t.datatype + ">";
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<Triple> parse_turtle(std::string_view text) { return TurtleParser(text).parse(); }

std::string to_ntriples(const Triple& t) {
  return nt_term(t.subject) + " " + nt_term(t.predicate) + " " + nt_term(t.object) + " .\n";
}

}  // namespace peo
