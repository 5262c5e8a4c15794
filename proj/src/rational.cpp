#include "wtsdist/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <string>

#include "wtsdist/errors.hpp"
#include "wtsdist/ext_value.hpp"

namespace wtsdist {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto fail = [&] {
    throw ParseError("malformed rational \"" + std::string(text) + "\"");
  };

  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) fail();
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) throw ParseError("zero denominator in \"" + std::string(text) + "\"");
    result = Rational(n, d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    auto whole = body.substr(0, dot);
    auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) fail();
    mpz_class n(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 10, frac.size());
    result = Rational(n, d);
  } else {
    if (!all_digits(body)) fail();
    result = Rational(mpz_class(std::string(body), 10));
  }
  result.canonicalize();
  if (negative) result = -result;
  return result;
}

std::string to_string(const Rational& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_str();
}

Rational pow(const Rational& base, std::size_t exponent) {
  Rational result = 1;
  Rational b = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= b;
    b *= b;
    exponent >>= 1u;
  }
  return result;
}

ExtValue::ExtValue(const Rational& v) : value_(v) {
  if (value_ < 0) {
    throw std::invalid_argument("ExtValue must be nonnegative, got " +
                                wtsdist::to_string(v));
  }
}

const Rational& ExtValue::finite() const {
  if (infinite_) throw std::logic_error("finite() called on infinity");
  return value_;
}

ExtValue ExtValue::scaled(const Rational& factor) const {
  if (infinite_) return *this;
  return ExtValue(Rational(value_ * factor));
}

std::string ExtValue::to_string() const {
  return infinite_ ? "inf" : wtsdist::to_string(value_);
}

ExtValue ExtValue::parse(std::string_view text) {
  if (text == "inf") return infinity();
  return ExtValue(parse_rational(text));
}

ExtValue operator+(const ExtValue& a, const ExtValue& b) {
  if (a.infinite_ || b.infinite_) return ExtValue::infinity();
  return ExtValue(Rational(a.value_ + b.value_));
}

bool operator==(const ExtValue& a, const ExtValue& b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::strong_ordering operator<=>(const ExtValue& a, const ExtValue& b) {
  if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
  if (a.infinite_) return std::strong_ordering::greater;
  if (b.infinite_) return std::strong_ordering::less;
  int c = cmp(a.value_, b.value_);
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ExtValue gap(const ExtValue& a, const ExtValue& b) {
  if (b.is_infinite()) return a.is_infinite() ? ExtValue() : ExtValue::infinity();
  if (a.is_infinite()) throw std::logic_error("gap: a > b");
  Rational d = b.finite() - a.finite();
  if (d < 0) throw std::logic_error("gap: a > b");
  return ExtValue(d);
}

}  // namespace wtsdist
