#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace stc {

using Vector = std::vector<double>;

[[nodiscard]] inline double squared_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

[[nodiscard]] inline double norm(std::span<const double> v) noexcept { return std::sqrt(squared_norm(v)); }

/// ‖a − b‖; spans must have equal length.
[[nodiscard]] inline double distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

[[nodiscard]] inline bool all_finite(std::span<const double> v) noexcept {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace stc
