#include "peo/turtle.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace peo {

Namespace::Namespace(std::string_view base_iri) : iri_(base_iri) {
  if (iri_.empty()) throw std::invalid_argument("base IRI must not be empty");
  if (iri_.back() != '#' && iri_.back() != '/') iri_.push_back('#');
}

std::string Namespace::ontology_iri() const { return iri_.substr(0, iri_.size() - 1); }

std::string_view Namespace::local_name(std::string_view iri) const {
  if (iri.size() > iri_.size() && iri.substr(0, iri_.size()) == iri_)
    return iri.substr(iri_.size());
  return {};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "INF" : "-INF";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  std::string out(buf.data(), end);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

std::string escape_literal(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out.push_back(ch);
        }
    }
  }
  return out;
}

bool is_plain_local_name(std::string_view local) {
  if (local.empty()) return false;
  auto word = [](unsigned char c) { return std::isalnum(c) || c == '_'; };
  if (!word(static_cast<unsigned char>(local.front()))) return false;
  if (!word(static_cast<unsigned char>(local.back()))) return false;
  for (char ch : local) {
    auto c = static_cast<unsigned char>(ch);
    if (!word(c) && c != '-') return false;
  }
  return true;
}

std::string turtle_name(std::string_view prefix, const Namespace& ns, std::string_view local) {
  if (is_plain_local_name(local)) return std::string(prefix) + ":" + std::string(local);
  return "<" + ns.iri(local) + ">";
}

}  // namespace peo
