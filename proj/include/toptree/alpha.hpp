#pragma once

// Exact rational growth factor for the size cap alpha^t. All comparisons
// against powers of alpha are done in integer arithmetic.

#include <boost/multiprecision/cpp_int.hpp>
#include <charconv>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace toptree {

using BigInt = boost::multiprecision::cpp_int;

struct Alpha {
  std::uint64_t num = 10;
  std::uint64_t den = 9;

  /// Accepts "P/Q" or a bare integer "P". Requires P/Q > 1.
  static Alpha parse(std::string_view text) {
    auto read = [&](std::string_view part) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
        throw std::invalid_argument("alpha: expected P/Q, got '" + std::string(text) + "'");
      }
      return v;
    };
    Alpha a;
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
      a.num = read(text);
      a.den = 1;
    } else {
      a.num = read(text.substr(0, slash));
      a.den = read(text.substr(slash + 1));
    }
    a.validate();
    return a;
  }

  void validate() const {
    if (den == 0 || num <= den) throw std::invalid_argument("alpha must be a rational > 1");
  }

  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// floor(alpha^t), saturated to `cap`.
  std::uint64_t floor_power(unsigned t, std::uint64_t cap) const {
    BigInt n = 1, d = 1;
    for (unsigned i = 0; i < t; ++i) {
      n *= num;
      d *= den;
      if (n >= d * BigInt(cap)) return cap;
    }
    return static_cast<std::uint64_t>(BigInt(n / d));
  }

  /// size <= alpha^t, exactly.
  bool within_power(std::uint64_t size, unsigned t) const {
    return BigInt(size) * pow(BigInt(den), t) <= pow(BigInt(num), t);
  }

  friend bool operator==(const Alpha&, const Alpha&) = default;
};

}  // namespace toptree
