#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace stc {

/// Scalar function of a radius r ≥ 0: the comparison functions β(·,0), γ₁,
/// γ₂, the envelope L̂ and the ν coefficients all use this representation.
/// Presets serialize to short strings ("const:c", "linear:c", "sqrt:c",
/// "poly:c,p"); tabulated and custom functions do not round-trip.
class RadialFunction {
  public:
    enum class Kind { kConstant, kLinear, kSqrt, kPower, kTabulated, kCustom };

    RadialFunction() : RadialFunction(constant(0.0)) {}

    static RadialFunction constant(double c);
    static RadialFunction linear(double c);
    static RadialFunction sqrt(double c);
    static RadialFunction power(double c, double p);
    /// Step function taking the value of the first table radius ≥ r, so that
    /// a nondecreasing table gives an upper envelope. Radii must increase.
    static RadialFunction tabulated(std::vector<double> radii, std::vector<double> values);
    static RadialFunction custom(std::function<double(double)> fn, std::string label = "custom");

    /// Parses a preset string; a bare number is a constant.
    static RadialFunction parse(std::string_view text);

    [[nodiscard]] double operator()(double r) const;

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_constant() const noexcept { return kind_ == Kind::kConstant; }
    [[nodiscard]] double coefficient() const noexcept { return c_; }
    [[nodiscard]] double exponent() const noexcept { return p_; }
    /// Largest radius the function is defined on (+∞ except for tables).
    [[nodiscard]] double domain_max() const noexcept;
    [[nodiscard]] std::string to_string() const;

  private:
    RadialFunction(Kind kind, double c, double p) : kind_(kind), c_(c), p_(p) {}

    Kind kind_;
    double c_ = 0.0;
    double p_ = 1.0;
    std::vector<double> radii_;
    std::vector<double> values_;
    std::function<double(double)> fn_;
    std::string label_;
};

/// f(0) = 0 and f nondecreasing on a uniform grid over [0, r_max].
[[nodiscard]] bool looks_class_k(const RadialFunction& f, double r_max = 100.0, int points = 2001);

/// f nondecreasing on a uniform grid over [0, r_max].
[[nodiscard]] bool is_nondecreasing_on_grid(const RadialFunction& f, double r_max = 100.0, int points = 2001);

}  // namespace stc
