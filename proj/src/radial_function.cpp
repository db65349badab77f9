#include "stc/radial_function.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "stc/errors.hpp"

namespace stc {

namespace {

double parse_number(std::string_view s, std::string_view whole) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError("bad number in radial function preset '" + std::string(whole) + "'");
    return v;
}

std::string fmt_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

RadialFunction RadialFunction::constant(double c) { return {Kind::kConstant, c, 0.0}; }
RadialFunction RadialFunction::linear(double c) { return {Kind::kLinear, c, 1.0}; }
RadialFunction RadialFunction::sqrt(double c) { return {Kind::kSqrt, c, 0.5}; }

RadialFunction RadialFunction::power(double c, double p) {
    if (!(p >= 0.0)) throw ContractViolation("RadialFunction::power: exponent must be nonnegative");
    return {Kind::kPower, c, p};
}

RadialFunction RadialFunction::tabulated(std::vector<double> radii, std::vector<double> values) {
    if (radii.empty() || radii.size() != values.size())
        throw ContractViolation("RadialFunction::tabulated: radii and values must be non-empty and equal length");
    for (std::size_t i = 1; i < radii.size(); ++i) {
        if (!(radii[i] > radii[i - 1])) throw ContractViolation("RadialFunction::tabulated: radii must increase");
    }
    RadialFunction f(Kind::kTabulated, 0.0, 0.0);
    f.radii_ = std::move(radii);
    f.values_ = std::move(values);
    return f;
}

RadialFunction RadialFunction::custom(std::function<double(double)> fn, std::string label) {
    if (!fn) throw ContractViolation("RadialFunction::custom: empty function");
    RadialFunction f(Kind::kCustom, 0.0, 0.0);
    f.fn_ = std::move(fn);
    f.label_ = std::move(label);
    return f;
}

RadialFunction RadialFunction::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) return constant(parse_number(text, text));
    const auto name = text.substr(0, colon);
    const auto args = text.substr(colon + 1);
    if (name == "const") return constant(parse_number(args, text));
    if (name == "linear") return linear(parse_number(args, text));
    if (name == "sqrt") return sqrt(parse_number(args, text));
    if (name == "poly") {
        const auto comma = args.find(',');
        if (comma == std::string_view::npos) throw ConfigError("poly preset needs 'poly:c,p': " + std::string(text));
        return power(parse_number(args.substr(0, comma), text), parse_number(args.substr(comma + 1), text));
    }
    throw ConfigError("unknown radial function preset '" + std::string(text) + "'");
}

double RadialFunction::operator()(double r) const {
    switch (kind_) {
        case Kind::kConstant: return c_;
        case Kind::kLinear: return c_ * r;
        case Kind::kSqrt: return c_ * std::sqrt(r);
        case Kind::kPower: return p_ == 0.0 ? c_ : c_ * std::pow(r, p_);
        case Kind::kTabulated: {
            if (r > radii_.back()) throw DomainError("RadialFunction: radius beyond tabulated range");
            const auto it = std::lower_bound(radii_.begin(), radii_.end(), r);
            return values_[static_cast<std::size_t>(it - radii_.begin())];
        }
        case Kind::kCustom: return fn_(r);
    }
    return 0.0;
}

double RadialFunction::domain_max() const noexcept {
    return kind_ == Kind::kTabulated ? radii_.back() : std::numeric_limits<double>::infinity();
}

std::string RadialFunction::to_string() const {
    switch (kind_) {
        case Kind::kConstant: return "const:" + fmt_number(c_);
        case Kind::kLinear: return "linear:" + fmt_number(c_);
        case Kind::kSqrt: return "sqrt:" + fmt_number(c_);
        case Kind::kPower: return "poly:" + fmt_number(c_) + "," + fmt_number(p_);
        case Kind::kTabulated: return "tabulated";
        case Kind::kCustom: return label_;
    }
    return "unknown";
}

bool is_nondecreasing_on_grid(const RadialFunction& f, double r_max, int points) {
    r_max = std::min(r_max, f.domain_max());
    double prev = f(0.0);
    for (int i = 1; i < points; ++i) {
        const double v = f(r_max * i / (points - 1));
        if (!(v >= prev)) return false;
        prev = v;
    }
    return true;
}

bool looks_class_k(const RadialFunction& f, double r_max, int points) {
    return f(0.0) == 0.0 && is_nondecreasing_on_grid(f, r_max, points);
}

}  // namespace stc
