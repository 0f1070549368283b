#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace termdp {

/// A cost in the extended range [0, +inf].
///
/// Finite values are stored as a double; infinity is a separate tag, so the
/// type never holds a NaN or a negative number and comparisons form a total
/// order. Infinity absorbs under addition.
class ExtCost {
public:
    constexpr ExtCost() noexcept = default;

    /// Throws std::domain_error for negative or NaN input. +inf maps to infinity().
    explicit ExtCost(double v) {
        if (std::isnan(v)) throw std::domain_error("ExtCost: NaN is not a cost");
        if (v < 0.0) throw std::domain_error("ExtCost: negative cost " + std::to_string(v));
        if (std::isinf(v)) {
            infinite_ = true;
        } else {
            value_ = v == 0.0 ? 0.0 : v;  // drop -0.0
        }
    }

    static constexpr ExtCost infinity() noexcept {
        ExtCost c;
        c.infinite_ = true;
        return c;
    }
    static constexpr ExtCost zero() noexcept { return ExtCost{}; }

    constexpr bool is_infinite() const noexcept { return infinite_; }
    constexpr bool is_finite() const noexcept { return !infinite_; }
    constexpr bool is_zero() const noexcept { return !infinite_ && value_ == 0.0; }

    /// Finite value, or +inf as a double.
    constexpr double value() const noexcept {
        return infinite_ ? std::numeric_limits<double>::infinity() : value_;
    }

    ExtCost& operator+=(ExtCost other) noexcept {
        if (infinite_ || other.infinite_) {
            *this = infinity();
        } else {
            value_ += other.value_;
            if (std::isinf(value_)) *this = infinity();
        }
        return *this;
    }
    friend ExtCost operator+(ExtCost a, ExtCost b) noexcept { return a += b; }

    friend constexpr bool operator==(ExtCost a, ExtCost b) noexcept {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_;
    }
    friend constexpr std::strong_ordering operator<=>(ExtCost a, ExtCost b) noexcept {
        if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (a.value_ > b.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    double value_ = 0.0;
    bool infinite_ = false;
};

inline ExtCost ext_add(ExtCost a, ExtCost b) noexcept { return a + b; }

/// |a - b| with inf - inf = 0 and |inf - finite| = inf.
inline double ext_distance(ExtCost a, ExtCost b) noexcept {
    if (a.is_infinite() && b.is_infinite()) return 0.0;
    if (a.is_infinite() || b.is_infinite()) return std::numeric_limits<double>::infinity();
    return std::abs(a.value() - b.value());
}

/// "inf" or the value with 17 significant digits.
std::string to_string(ExtCost c);

/// Accepts "inf", "infinity", "Inf" and decimal numbers. Throws
/// std::invalid_argument on malformed text and std::domain_error on negatives.
ExtCost parse_ext_cost(std::string_view text);

std::ostream& operator<<(std::ostream& os, ExtCost c);

}  // namespace termdp
