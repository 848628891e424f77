#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace icaa {

// Exact fixed-point currency amount with 12 fractional decimal digits (picodollars).
class Money {
public:
    static constexpr std::int64_t kScale = 1'000'000'000'000LL;

    constexpr Money() = default;
    static constexpr Money from_picos(std::int64_t picos) { return Money(picos); }
    // Parses a plain decimal such as "0.0015" or "1032". More than 12 fractional
    // digits, signs other than a leading '-', or exponents are rejected.
    static Money parse(std::string_view text);

    constexpr std::int64_t picos() const { return picos_; }
    double to_double() const { return static_cast<double>(picos_) / static_cast<double>(kScale); }
    // Shortest exact decimal rendering ("0.0015", "812", "-1.25").
    std::string to_string() const;

    // amount * numerator / denominator, computed in 128-bit and truncated toward zero.
    Money scaled(std::int64_t numerator, std::int64_t denominator) const;

    constexpr Money operator+(Money o) const { return Money(picos_ + o.picos_); }
    constexpr Money operator-(Money o) const { return Money(picos_ - o.picos_); }
    constexpr Money& operator+=(Money o) {
        picos_ += o.picos_;
        return *this;
    }
    constexpr auto operator<=>(const Money&) const = default;

private:
    constexpr explicit Money(std::int64_t picos) : picos_(picos) {}
    std::int64_t picos_ = 0;
};

}  // namespace icaa
