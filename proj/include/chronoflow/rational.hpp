#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "chronoflow/errors.hpp"

namespace chronoflow {

// Positive exact fraction, always stored reduced.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den) {
    if (den <= 0 || num < 0) {
      throw ConfigError("rational requires num >= 0 and den > 0");
    }
    const std::int64_t g = std::gcd(num, den);
    num_ = g == 0 ? 0 : num / g;
    den_ = g == 0 ? 1 : den / g;
  }

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  // "num/den", e.g. "24/1".
  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  static Rational parse(const std::string& text);

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace chronoflow
