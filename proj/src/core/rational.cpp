#include "conelab/rational.hpp"

#include "conelab/error.hpp"

namespace conelab {

Rational parse_rational(const std::string& text) {
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0) throw ParseError("not a rational number: '" + text + "'");
  if (text.find('/') != std::string::npos && sgn(q.get_den()) == 0) throw ParseError("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const GaussianRational& z) {
  if (z.is_real()) return z.re.get_str();
  if (sgn(z.re) == 0) return z.im.get_str() + "i";
  return z.re.get_str() + (sgn(z.im) > 0 ? "+" : "") + z.im.get_str() + "i";
}

}  // namespace conelab
