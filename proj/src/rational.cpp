#include "walg/rational.hpp"

#include <cctype>

namespace walg {

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw DomainError("empty rational literal");
  std::size_t start = 0;
  if (text[0] == '+' || text[0] == '-') start = 1;
  bool seen_digit = false;
  bool seen_slash = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '/') {
      if (seen_slash || !seen_digit || i + 1 == text.size())
        throw DomainError("malformed rational literal: " + text);
      seen_slash = true;
      seen_digit = false;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw DomainError("malformed rational literal: " + text);
    seen_digit = true;
  }
  if (!seen_digit) throw DomainError("malformed rational literal: " + text);
  Rational r;
  if (r.set_str(text, 10) != 0) throw DomainError("malformed rational literal: " + text);
  if (r.get_den() == 0) throw DomainError("zero denominator: " + text);
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

std::string to_string(const GaussianRational& z) {
  if (z.im == 0) return z.re.get_str();
  std::string s = z.re.get_str();
  s += (z.im < 0) ? "-" : "+";
  Rational mag = abs(z.im);
  s += mag.get_str();
  s += "i";
  return s;
}

}  // namespace walg
