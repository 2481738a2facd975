#include "peo/concept_query.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>
#include <utility>

#include "json.hpp"
#include "peo/error.hpp"

namespace peo {

namespace {

constexpr std::array<std::string_view, 5> kObjectProperties = {
    "has_action", "has_file_feature", "has_section", "has_section_feature", "has_section_flag"};

bool is_thing(std::string_view name) { return name == "Thing" || name == "owl:Thing"; }

std::string_view strip_peo(std::string_view name) {
  if (name.starts_with("peo:")) name.remove_prefix(4);
  return name;
}

bool sha_like(std::string_view name) {
  static const std::regex pattern("[0-9a-f]{64}(_section_[0-9]+)?");
  return std::regex_match(name.begin(), name.end(), pattern);
}

// ---------------------------------------------------------------- lexer

struct Token {
  enum class Type { End, LParen, RParen, LBrace, RBrace, LBracket, RBracket, Comma, Ident, Number, String, Op };
  Type type = Type::End;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.pos = pos_;
      if (pos_ >= text_.size()) {
        out.push_back(t);
        return out;
      }
      char c = text_[pos_];
      switch (c) {
        case '(': t.type = Token::Type::LParen; ++pos_; break;
        case ')': t.type = Token::Type::RParen; ++pos_; break;
        case '{': t.type = Token::Type::LBrace; ++pos_; break;
        case '}': t.type = Token::Type::RBrace; ++pos_; break;
        case '[': t.type = Token::Type::LBracket; ++pos_; break;
        case ']': t.type = Token::Type::RBracket; ++pos_; break;
        case ',': t.type = Token::Type::Comma; ++pos_; break;
        case '"': t.type = Token::Type::String; t.text = string_literal(); break;
        case '<':
        case '>':
        case '=':
          t.type = Token::Type::Op;
          t.text = std::string(1, c);
          ++pos_;
          if (c != '=' && pos_ < text_.size() && text_[pos_] == '=') {
            t.text += '=';
            ++pos_;
          }
          break;
        default:
          if (text_.substr(pos_).starts_with("≤") || text_.substr(pos_).starts_with("≥")) {
            t.type = Token::Type::Op;
            t.text = text_.substr(pos_).starts_with("≤") ? "<=" : ">=";
            pos_ += 3;
          } else if (word_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && word_char(text_[pos_])) ++pos_;
            t.text = std::string(text_.substr(start, pos_ - start));
            t.type = is_number(t.text) ? Token::Type::Number : Token::Type::Ident;
          } else {
            throw QueryError(QueryError::Kind::SyntaxError, pos_, std::string("unexpected character '") + c + "'");
          }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool word_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == ':' || c == '.' || c == '+';
  }

  static bool is_number(const std::string& s) {
    static const std::regex pattern("[+-]?([0-9]+(\\.[0-9]*)?|\\.[0-9]+)([eE][+-]?[0-9]+)?");
    return std::regex_match(s, pattern);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string string_literal() {
    std::size_t start = pos_++;
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        char e = text_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          default: out += e;
        }
      } else {
        out += c;
      }
    }
    throw QueryError(QueryError::Kind::SyntaxError, start, "unterminated string literal");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(std::string_view text, const Vocabulary& v) : tokens_(Lexer(text).run()), v_(v) {}

  ClassExpression parse() {
    ClassExpression e = or_expr();
    if (peek().type != Token::Type::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return tokens_[i_]; }
  const Token& take() { return tokens_[i_ == tokens_.size() - 1 ? i_ : i_++]; }
  bool keyword(std::string_view kw) const { return peek().type == Token::Type::Ident && peek().text == kw; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw QueryError(QueryError::Kind::SyntaxError, peek().pos, msg);
  }
  [[noreturn]] void unknown(const Token& t, const std::string& what) const {
    throw QueryError(QueryError::Kind::UnknownName, t.pos, "unknown " + what + " '" + t.text + "'");
  }

  void expect(Token::Type type, const char* what) {
    if (peek().type != type) fail(std::string("expected ") + what);
    take();
  }

  ClassExpression or_expr() {
    std::vector<ClassExpression> parts{and_expr()};
    while (keyword("or")) {
      take();
      parts.push_back(and_expr());
    }
    return parts.size() == 1 ? std::move(parts.front()) : ClassExpression::disjunction(std::move(parts));
  }

  ClassExpression and_expr() {
    std::vector<ClassExpression> parts{unary()};
    while (keyword("and")) {
      take();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? std::move(parts.front()) : ClassExpression::conjunction(std::move(parts));
  }

  ClassExpression unary() {
    if (keyword("not")) {
      take();
      return ClassExpression::negation(unary());
    }
    return primary();
  }

  ClassExpression primary() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::LParen: {
        take();
        ClassExpression e = or_expr();
        expect(Token::Type::RParen, "')'");
        return e;
      }
      case Token::Type::LBrace:
        return nominal();
      case Token::Type::Ident:
        break;
      case Token::Type::End:
        fail("unexpected end of expression");
      default:
        fail("unexpected '" + t.text + "'");
    }
    if (t.text == "and" || t.text == "or" || t.text == "some" || t.text == "min") fail("unexpected keyword '" + t.text + "'");

    Token name_tok = take();
    std::string name(strip_peo(name_tok.text));
    if (v_.find_object_property(name)) return object_restriction(name);
    if (v_.find_data_property(name)) return data_restriction(name);
    if (is_thing(name)) return ClassExpression::atom("Thing");
    if (!v_.find_class(name)) unknown(name_tok, "class or property");
    return ClassExpression::atom(name);
  }

  ClassExpression nominal() {
    expect(Token::Type::LBrace, "'{'");
    std::vector<std::string> names;
    while (true) {
      const Token& t = peek();
      if (t.type != Token::Type::Ident && t.type != Token::Type::Number) fail("expected an individual name");
      Token tok = take();
      std::string name(strip_peo(tok.text));
      if (!v_.class_of_prototype(name) && !sha_like(name)) unknown(tok, "individual");
      names.push_back(std::move(name));
      if (peek().type == Token::Type::Comma) {
        take();
        continue;
      }
      break;
    }
    expect(Token::Type::RBrace, "'}'");
    return ClassExpression::nominal(std::move(names));
  }

  ClassExpression object_restriction(const std::string& property) {
    if (keyword("some")) {
      take();
      return ClassExpression::some(property, unary());
    }
    if (keyword("min")) {
      take();
      if (peek().type != Token::Type::Number) fail("expected a cardinality after 'min'");
      const Token& n = take();
      std::uint64_t value = 0;
      auto [ptr, ec] = std::from_chars(n.text.data(), n.text.data() + n.text.size(), value);
      if (ec != std::errc() || ptr != n.text.data() + n.text.size() || value == 0)
        throw QueryError(QueryError::Kind::SyntaxError, n.pos, "cardinality must be a positive integer");
      if (starts_filler()) return ClassExpression::min(value, property, unary());
      return ClassExpression::min(value, property, ClassExpression::atom("Thing"));
    }
    fail("expected 'some' or 'min' after property '" + property + "'");
  }

  bool starts_filler() const {
    const Token& t = peek();
    if (t.type == Token::Type::LParen || t.type == Token::Type::LBrace) return true;
    return t.type == Token::Type::Ident && t.text != "and" && t.text != "or";
  }

  ClassExpression data_restriction(const std::string& property) {
    if (!keyword("some")) fail("expected 'some' after data property '" + property + "'");
    take();
    return ClassExpression::data_some(property, data_range());
  }

  DataRange data_range() {
    DataRange r;
    if (keyword("not")) {
      take();
      r.kind = DataRange::Kind::Complement;
      r.inner.push_back(data_range());
      return r;
    }
    if (peek().type == Token::Type::LParen) {
      take();
      DataRange inner = data_range();
      expect(Token::Type::RParen, "')'");
      return inner;
    }
    if (peek().type == Token::Type::LBrace) {
      take();
      r.kind = DataRange::Kind::OneOf;
      while (true) {
        r.values.push_back(literal());
        if (peek().type == Token::Type::Comma) {
          take();
          continue;
        }
        break;
      }
      expect(Token::Type::RBrace, "'}'");
      return r;
    }
    if (peek().type != Token::Type::Ident) fail("expected a data range");
    const Token& dt = take();
    if (dt.text != "xsd:integer" && dt.text != "xsd:double" && dt.text != "xsd:string" && dt.text != "rdfs:Literal")
      throw QueryError(QueryError::Kind::UnknownName, dt.pos, "unknown datatype '" + dt.text + "'");
    r.kind = DataRange::Kind::Datatype;
    r.datatype = dt.text;
    if (peek().type == Token::Type::LBracket) {
      take();
      if (peek().type != Token::Type::Op) fail("expected a facet operator");
      const std::string op = take().text;
      if (op == "<") r.facet = Facet::Less;
      else if (op == "<=") r.facet = Facet::LessEqual;
      else if (op == ">") r.facet = Facet::Greater;
      else if (op == ">=") r.facet = Facet::GreaterEqual;
      else r.facet = Facet::Equal;
      if (peek().type != Token::Type::Number) fail("expected a numeric facet value");
      r.facet_value = number(take());
      expect(Token::Type::RBracket, "']'");
    }
    return r;
  }

  static Literal number(const Token& t) {
    bool integral = t.text.find_first_of(".eE") == std::string::npos;
    std::string lexical = t.text;
    if (!lexical.empty() && lexical.front() == '+') lexical.erase(0, 1);
    if (integral) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(lexical.data(), lexical.data() + lexical.size(), v);
      if (ec != std::errc() || ptr != lexical.data() + lexical.size())
        throw QueryError(QueryError::Kind::SyntaxError, t.pos, "integer out of range");
      return {Literal::Type::Integer, std::to_string(v)};
    }
    double d = 0;
    auto [ptr, ec] = std::from_chars(lexical.data(), lexical.data() + lexical.size(), d);
    if (ec != std::errc() || ptr != lexical.data() + lexical.size())
      throw QueryError(QueryError::Kind::SyntaxError, t.pos, "malformed number");
    return {Literal::Type::Double, format_double(d)};
  }

  Literal literal() {
    const Token& t = peek();
    if (t.type == Token::Type::String) return {Literal::Type::String, take().text};
    if (t.type == Token::Type::Number) return number(take());
    fail("expected a literal");
  }

  std::vector<Token> tokens_;
  std::size_t i_ = 0;
  const Vocabulary& v_;
};

// ---------------------------------------------------------------- printer

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string literal_text(const Literal& l) { return l.type == Literal::Type::String ? quote(l.lexical) : l.lexical; }

std::string range_text(const DataRange& r) {
  switch (r.kind) {
    case DataRange::Kind::Datatype: {
      std::string out = r.datatype;
      if (r.facet) out += "[" + std::string(to_string(*r.facet)) + " " + literal_text(r.facet_value) + "]";
      return out;
    }
    case DataRange::Kind::OneOf: {
      std::string out = "{";
      for (std::size_t i = 0; i < r.values.size(); ++i) out += (i ? ", " : "") + literal_text(r.values[i]);
      return out + "}";
    }
    case DataRange::Kind::Complement:
      return "not (" + range_text(r.inner.front()) + ")";
  }
  return {};
}

bool atomic(const ClassExpression& e) {
  return e.kind == ClassExpression::Kind::Class || e.kind == ClassExpression::Kind::Nominal;
}

std::string wrapped(const ClassExpression& e) { return atomic(e) ? to_string(e) : "(" + to_string(e) + ")"; }

}  // namespace

std::string_view to_string(Facet f) {
  switch (f) {
    case Facet::Less: return "<";
    case Facet::LessEqual: return "<=";
    case Facet::Greater: return ">";
    case Facet::GreaterEqual: return ">=";
    case Facet::Equal: return "=";
  }
  return "=";
}

ClassExpression ClassExpression::atom(std::string name) {
  ClassExpression e;
  e.kind = Kind::Class;
  e.name = std::move(name);
  return e;
}

ClassExpression ClassExpression::nominal(std::vector<std::string> names) {
  ClassExpression e;
  e.kind = Kind::Nominal;
  e.individuals = std::move(names);
  return e;
}

ClassExpression ClassExpression::negation(ClassExpression inner) {
  ClassExpression e;
  e.kind = Kind::Not;
  e.operands.push_back(std::move(inner));
  return e;
}

ClassExpression ClassExpression::conjunction(std::vector<ClassExpression> es) {
  ClassExpression e;
  e.kind = Kind::And;
  e.operands = std::move(es);
  return e;
}

ClassExpression ClassExpression::disjunction(std::vector<ClassExpression> es) {
  ClassExpression e;
  e.kind = Kind::Or;
  e.operands = std::move(es);
  return e;
}

ClassExpression ClassExpression::some(std::string property, ClassExpression filler) {
  ClassExpression e;
  e.kind = Kind::ObjectSome;
  e.name = std::move(property);
  e.operands.push_back(std::move(filler));
  return e;
}

ClassExpression ClassExpression::min(std::uint64_t n, std::string property, ClassExpression filler) {
  ClassExpression e;
  e.kind = Kind::ObjectMin;
  e.cardinality = n;
  e.name = std::move(property);
  e.operands.push_back(std::move(filler));
  return e;
}

ClassExpression ClassExpression::data_some(std::string property, DataRange range) {
  ClassExpression e;
  e.kind = Kind::DataSome;
  e.name = std::move(property);
  e.range = std::move(range);
  return e;
}

ClassExpression parse_expression(std::string_view text, const Vocabulary& v) { return Parser(text, v).parse(); }

std::string to_string(const ClassExpression& e) {
  using K = ClassExpression::Kind;
  switch (e.kind) {
    case K::Class:
      return e.name;
    case K::Nominal: {
      std::string out = "{";
      for (std::size_t i = 0; i < e.individuals.size(); ++i) out += (i ? ", " : "") + e.individuals[i];
      return out + "}";
    }
    case K::Not:
      return "not " + wrapped(e.operands.front());
    case K::And:
    case K::Or: {
      std::string out;
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += e.kind == K::And ? " and " : " or ";
        out += wrapped(e.operands[i]);
      }
      return out;
    }
    case K::ObjectSome:
      return e.name + " some " + wrapped(e.operands.front());
    case K::ObjectMin:
      return e.name + " min " + std::to_string(e.cardinality) + " " + wrapped(e.operands.front());
    case K::DataSome:
      return e.name + " some " + range_text(e.range);
  }
  return {};
}

// ---------------------------------------------------------------- sets

std::size_t IndividualSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<std::size_t> IndividualSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

IndividualSet& IndividualSet::operator&=(const IndividualSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

IndividualSet& IndividualSet::operator|=(const IndividualSet& o) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

IndividualSet IndividualSet::complement() const {
  IndividualSet out = *this;
  for (auto& w : out.words_) w = ~w;
  if (n_ % 64 && !out.words_.empty()) out.words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
  return out;
}

// ---------------------------------------------------------------- model

int QueryModel::object_property_index(std::string_view name) const {
  for (std::size_t i = 0; i < kObjectProperties.size(); ++i)
    if (kObjectProperties[i] == name) return static_cast<int>(i);
  return -1;
}

QueryModel::QueryModel(const KnowledgeBase& kb, const Vocabulary& v, QueryOptions options)
    : vocab_(&v), options_(std::move(options)) {
  n_files_ = kb.files.size();
  n_sections_ = kb.section_count();

  auto add = [&](std::string iri, std::string local, std::string cls) {
    by_local_name_.emplace(local, iris_.size());
    iris_.push_back(std::move(iri));
    local_names_.push_back(std::move(local));
    direct_class_.push_back(std::move(cls));
  };
  for (const auto& f : kb.files) {
    add(f.iri, std::string(options_.ns.local_name(f.iri)), std::string(class_name(f.file_class)));
    labels_.push_back(f.label);
    file_data_.push_back(f.data.values);
  }
  for (const auto& f : kb.files)
    for (const auto& s : f.sections) {
      add(s.iri, std::string(options_.ns.local_name(s.iri)), std::string(class_name(s.section_class)));
      section_entropy_.push_back(s.section_entropy);
      section_name_.push_back(s.section_name);
    }
  for (const auto& [cls, proto] : v.prototypes) add(options_.ns.iri(proto), proto, cls);

  auto proto_index = [&](std::string_view cls) -> std::uint32_t {
    auto it = v.prototypes.find(std::string(cls));
    if (it == v.prototypes.end()) throw UnknownPrototypeError(std::string(cls));
    return static_cast<std::uint32_t>(by_local_name_.at(it->second));
  };
  auto action_index = [&](const std::string& id) -> std::uint32_t {
    auto it = by_local_name_.find(id);
    if (it == by_local_name_.end() || it->second < n_files_ + n_sections_) throw UnknownPrototypeError(id);
    return static_cast<std::uint32_t>(it->second);
  };

  edges_.assign(kObjectProperties.size(), std::vector<std::vector<std::uint32_t>>(size()));
  auto& has_action = edges_[0];
  auto& has_file_feature = edges_[1];
  auto& has_section = edges_[2];
  auto& has_section_feature = edges_[3];
  auto& has_section_flag = edges_[4];
  std::size_t section = n_files_;
  for (std::size_t fi = 0; fi < kb.files.size(); ++fi) {
    const auto& f = kb.files[fi];
    for (const auto& id : f.actions) has_action[fi].push_back(action_index(id));
    f.features.for_each([&](FileFeature ff) {
      if (options_.include_derived || !is_derived(ff)) has_file_feature[fi].push_back(proto_index(class_name(ff)));
    });
    for (const auto& s : f.sections) {
      has_section[fi].push_back(static_cast<std::uint32_t>(section));
      s.flags.for_each([&](SectionFlag fl) { has_section_flag[section].push_back(proto_index(class_name(fl))); });
      if (options_.include_derived)
        s.features.for_each(
            [&](SectionFeature sf) { has_section_feature[section].push_back(proto_index(class_name(sf))); });
      ++section;
    }
  }
}

std::optional<std::size_t> QueryModel::find(std::string_view local_name) const {
  auto it = by_local_name_.find(local_name);
  if (it == by_local_name_.end()) return std::nullopt;
  return it->second;
}

IndividualSet QueryModel::files() const {
  IndividualSet s(size());
  for (std::size_t i = 0; i < n_files_; ++i) s.set(i);
  return s;
}

IndividualSet QueryModel::sections() const {
  IndividualSet s(size());
  for (std::size_t i = n_files_; i < n_files_ + n_sections_; ++i) s.set(i);
  return s;
}

std::vector<QueryModel::DataValue> QueryModel::data_values(std::size_t i, std::string_view property) const {
  std::vector<DataValue> out;
  if (i < n_files_) {
    if (auto k = FileDataValues::index_of(property)) {
      DataValue d{Literal::Type::Integer};
      d.integer = static_cast<std::int64_t>(file_data_[i][*k]);
      out.push_back(d);
    }
  } else if (i < n_files_ + n_sections_) {
    std::size_t s = i - n_files_;
    if (property == "section_entropy") {
      DataValue d{Literal::Type::Double};
      d.real = section_entropy_[s];
      out.push_back(d);
    } else if (property == "section_name") {
      DataValue d{Literal::Type::String};
      d.text = &section_name_[s];
      out.push_back(d);
    }
  }
  return out;
}

namespace {

template <class A, class B>
bool compare(Facet f, A a, B b) {
  if constexpr (std::is_integral_v<A> && std::is_integral_v<B>) {
    switch (f) {
      case Facet::Less: return std::cmp_less(a, b);
      case Facet::LessEqual: return std::cmp_less_equal(a, b);
      case Facet::Greater: return std::cmp_greater(a, b);
      case Facet::GreaterEqual: return std::cmp_greater_equal(a, b);
      case Facet::Equal: return std::cmp_equal(a, b);
    }
  } else {
    switch (f) {
      case Facet::Less: return a < b;
      case Facet::LessEqual: return a <= b;
      case Facet::Greater: return a > b;
      case Facet::GreaterEqual: return a >= b;
      case Facet::Equal: return a == b;
    }
  }
  return false;
}

double literal_double(const Literal& l) {
  double d = 0;
  std::from_chars(l.lexical.data(), l.lexical.data() + l.lexical.size(), d);
  return d;
}

std::int64_t literal_integer(const Literal& l) {
  std::int64_t v = 0;
  std::from_chars(l.lexical.data(), l.lexical.data() + l.lexical.size(), v);
  return v;
}

}  // namespace

bool QueryModel::matches(const DataRange& r, const DataValue& value) const {
  switch (r.kind) {
    case DataRange::Kind::Complement:
      return !matches(r.inner.front(), value);
    case DataRange::Kind::OneOf:
      for (const Literal& l : r.values) {
        if (value.type == Literal::Type::String) {
          if (l.type == Literal::Type::String && l.lexical == *value.text) return true;
        } else if (l.type == Literal::Type::Integer && value.type == Literal::Type::Integer) {
          if (literal_integer(l) == value.integer) return true;
        } else if (l.type != Literal::Type::String) {
          double x = value.type == Literal::Type::Integer ? static_cast<double>(value.integer) : value.real;
          if (x == literal_double(l)) return true;
        }
      }
      return false;
    case DataRange::Kind::Datatype: {
      if (r.datatype == "xsd:integer" && value.type != Literal::Type::Integer) return false;
      if (r.datatype == "xsd:double" && value.type != Literal::Type::Double) return false;
      if (r.datatype == "xsd:string" && value.type != Literal::Type::String) return false;
      if (!r.facet) return true;
      if (value.type == Literal::Type::String) return false;
      if (value.type == Literal::Type::Integer && r.facet_value.type == Literal::Type::Integer)
        return compare(*r.facet, value.integer, literal_integer(r.facet_value));
      double x = value.type == Literal::Type::Integer ? static_cast<double>(value.integer) : value.real;
      return compare(*r.facet, x, literal_double(r.facet_value));
    }
  }
  return false;
}

IndividualSet QueryModel::evaluate(const ClassExpression& e) const {
  using K = ClassExpression::Kind;
  IndividualSet out(size());
  switch (e.kind) {
    case K::Class: {
      if (is_thing(e.name)) return out.complement();
      for (std::size_t i = 0; i < size(); ++i)
        if (vocab_->is_subclass_of(direct_class_[i], e.name)) out.set(i);
      return out;
    }
    case K::Nominal:
      for (const auto& name : e.individuals)
        if (auto i = find(name)) out.set(*i);
      return out;
    case K::Not:
      return evaluate(e.operands.front()).complement();
    case K::And: {
      out = evaluate(e.operands.front());
      for (std::size_t i = 1; i < e.operands.size(); ++i) out &= evaluate(e.operands[i]);
      return out;
    }
    case K::Or:
      for (const auto& op : e.operands) out |= evaluate(op);
      return out;
    case K::ObjectSome:
    case K::ObjectMin: {
      int p = object_property_index(e.name);
      if (p < 0) return out;
      IndividualSet filler = evaluate(e.operands.front());
      std::uint64_t need = e.kind == K::ObjectSome ? 1 : e.cardinality;
      const auto& adj = edges_[static_cast<std::size_t>(p)];
      for (std::size_t i = 0; i < size(); ++i) {
        std::uint64_t hits = 0;
        for (auto target : adj[i])
          if (filler.test(target) && ++hits >= need) break;
        if (hits >= need) out.set(i);
      }
      return out;
    }
    case K::DataSome:
      for (std::size_t i = 0; i < n_files_ + n_sections_; ++i)
        for (const auto& value : data_values(i, e.name))
          if (matches(e.range, value)) {
            out.set(i);
            break;
          }
      return out;
  }
  return out;
}

std::vector<std::string> QueryModel::members(const IndividualSet& s) const {
  std::vector<std::string> out;
  for (auto i : s.indices()) out.push_back(iris_[i]);
  return out;
}

std::vector<std::string> QueryModel::evaluate_files(const ClassExpression& e) const {
  IndividualSet s = evaluate(e);
  s &= files();
  auto out = members(s);
  std::sort(out.begin(), out.end());
  return out;
}

std::string ConceptScore::to_json() const {
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["tn"] = tn;
  j["fn"] = fn;
  j["accuracy"] = accuracy;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["precision_undefined"] = precision_undefined;
  j["recall_undefined"] = recall_undefined;
  j["f1_undefined"] = f1_undefined;
  return j.dump();
}

ConceptScore score(const ClassExpression& e, const QueryModel& model) {
  IndividualSet matched = model.evaluate(e);
  ConceptScore s;
  for (std::size_t i = 0; i < model.file_count(); ++i) {
    int label = model.label(i);
    if (label < 0) continue;
    bool m = matched.test(i);
    if (label == 1) (m ? s.tp : s.fn)++;
    else (m ? s.fp : s.tn)++;
  }
  std::size_t n = s.tp + s.fp + s.tn + s.fn;
  if (n == 0) throw QueryError(QueryError::Kind::NoLabeledData, 0, "the knowledge base has no labeled files");
  auto ratio = [](std::size_t a, std::size_t b, bool& undefined) {
    if (b == 0) {
      undefined = true;
      return 0.0;
    }
    return static_cast<double>(a) / static_cast<double>(b);
  };
  bool unused = false;
  s.accuracy = ratio(s.tp + s.tn, n, unused);
  s.precision = ratio(s.tp, s.tp + s.fp, s.precision_undefined);
  s.recall = ratio(s.tp, s.tp + s.fn, s.recall_undefined);
  if (s.precision + s.recall == 0.0) {
    s.f1_undefined = true;
    s.f1 = 0.0;
  } else {
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  return s;
}

}  // namespace peo
