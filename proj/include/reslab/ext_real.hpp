#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

namespace reslab {

/// Extended nonnegative real: a value in [0, +inf].
///
/// Every energy, resistance and functional value in the library is carried
/// as an ExtNonNeg so that +inf survives arithmetic and serialization.
class ExtNonNeg {
public:
    constexpr ExtNonNeg() = default;

    static ExtNonNeg finite(double v) { return ExtNonNeg(v <= 0.0 ? 0.0 : v); }  // no -0
    static constexpr ExtNonNeg infinity() {
        return ExtNonNeg(std::numeric_limits<double>::infinity());
    }
    static constexpr ExtNonNeg zero() { return ExtNonNeg(0.0); }

    bool is_finite() const { return std::isfinite(v_); }
    bool is_infinite() const { return !is_finite(); }

    /// Raw double; +inf maps to IEEE infinity.
    double to_double() const { return v_; }

    ExtNonNeg& operator+=(ExtNonNeg o) {
        v_ += o.v_;
        return *this;
    }
    friend ExtNonNeg operator+(ExtNonNeg a, ExtNonNeg b) { return a += b; }
    friend ExtNonNeg operator*(double s, ExtNonNeg a) {
        // 0 * inf = 0 (convention of convex analysis for nonnegative scalings)
        if (s <= 0.0) return zero();
        return ExtNonNeg(s * a.v_);
    }

    friend bool operator==(ExtNonNeg a, ExtNonNeg b) { return a.v_ == b.v_; }
    friend auto operator<=>(ExtNonNeg a, ExtNonNeg b) { return a.v_ <=> b.v_; }
    friend bool operator<=(ExtNonNeg a, double b) { return a.v_ <= b; }
    friend bool operator<(ExtNonNeg a, double b) { return a.v_ < b; }
    friend bool operator>(ExtNonNeg a, double b) { return a.v_ > b; }
    friend bool operator>=(ExtNonNeg a, double b) { return a.v_ >= b; }

    friend std::ostream& operator<<(std::ostream& os, ExtNonNeg a) {
        if (a.is_infinite()) return os << "inf";
        return os << a.v_;
    }

private:
    constexpr explicit ExtNonNeg(double v) : v_(v) {}
    double v_ = 0.0;
};

}  // namespace reslab
