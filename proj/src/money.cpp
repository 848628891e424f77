#include "icaa/money.hpp"

#include "icaa/util.hpp"

#include <limits>

namespace icaa {

Money Money::parse(std::string_view text) {
    const auto raw = trim(text);
    std::string_view s = raw;
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    if (s.empty()) throw Error("invalid amount: '" + std::string(raw) + "'");
    const auto dot = s.find('.');
    const auto whole = s.substr(0, dot);
    const auto frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || frac.size() > 12) {
        throw Error("invalid amount: '" + std::string(raw) + "'");
    }
    __int128 value = 0;
    for (const char c : whole) {
        if (c < '0' || c > '9') throw Error("invalid amount: '" + std::string(raw) + "'");
        value = value * 10 + (c - '0');
        if (value > std::numeric_limits<std::int64_t>::max() / kScale) throw Error("amount out of range: " + std::string(raw));
    }
    value *= kScale;
    __int128 unit = kScale / 10;
    for (const char c : frac) {
        if (c < '0' || c > '9') throw Error("invalid amount: '" + std::string(raw) + "'");
        value += unit * (c - '0');
        unit /= 10;
    }
    const auto picos = static_cast<std::int64_t>(value);
    return Money(negative ? -picos : picos);
}

std::string Money::to_string() const {
    const bool negative = picos_ < 0;
    const auto magnitude = negative ? -static_cast<__int128>(picos_) : static_cast<__int128>(picos_);
    const auto whole = static_cast<std::int64_t>(magnitude / kScale);
    auto frac = static_cast<std::int64_t>(magnitude % kScale);
    std::string out = (negative ? "-" : "") + std::to_string(whole);
    if (frac != 0) {
        std::string digits = std::to_string(frac);
        digits.insert(0, 12 - digits.size(), '0');
        while (!digits.empty() && digits.back() == '0') digits.pop_back();
        out += "." + digits;
    }
    return out;
}

Money Money::scaled(std::int64_t numerator, std::int64_t denominator) const {
    if (denominator == 0) throw Error("Money::scaled: zero denominator");
    const __int128 v = static_cast<__int128>(picos_) * numerator / denominator;
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw Error("Money::scaled: overflow");
    }
    return Money(static_cast<std::int64_t>(v));
}

}  // namespace icaa
