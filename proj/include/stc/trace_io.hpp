#pragma once

#include <ostream>

#include "stc/simulation.hpp"

namespace stc {

/// Header t,x1..xn,u1..um,w1..wp,is_sample then one row per trace point,
/// printed with round-trip precision.
void write_trace_csv(const Trace& trace, std::ostream& os);

/// Static SVG: state components against time (top) and a stem plot of the
/// inter-sample intervals (bottom).
void write_trace_svg(const Trace& trace, std::ostream& os);

}  // namespace stc
