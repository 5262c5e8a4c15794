#pragma once

#include <compare>
#include <string>
#include <string_view>

#include "wtsdist/rational.hpp"

namespace wtsdist {

/// A value in [0, ∞]: an exact nonnegative rational or infinity.
class ExtValue {
 public:
  ExtValue() = default;
  ExtValue(const Rational& v);  // NOLINT: implicit on purpose
  ExtValue(long v) : ExtValue(Rational(v)) {}  // NOLINT

  static ExtValue infinity() {
    ExtValue r;
    r.infinite_ = true;
    return r;
  }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  bool is_zero() const { return !infinite_ && value_ == 0; }

  /// The rational value. Must not be called on infinity.
  const Rational& finite() const;

  /// factor·v with factor ≥ 0; infinity stays infinity even for factor 0.
  ExtValue scaled(const Rational& factor) const;

  /// "inf" or the canonical rational.
  std::string to_string() const;
  static ExtValue parse(std::string_view text);

  friend ExtValue operator+(const ExtValue& a, const ExtValue& b);
  friend bool operator==(const ExtValue& a, const ExtValue& b);
  friend std::strong_ordering operator<=>(const ExtValue& a,
                                          const ExtValue& b);

 private:
  bool infinite_ = false;
  Rational value_ = 0;
};

inline const ExtValue& max(const ExtValue& a, const ExtValue& b) {
  return a < b ? b : a;
}
inline const ExtValue& min(const ExtValue& a, const ExtValue& b) {
  return b < a ? b : a;
}

/// b − a for a ≤ b, with ∞ − ∞ = 0 and ∞ − x = ∞.
ExtValue gap(const ExtValue& a, const ExtValue& b);

}  // namespace wtsdist
