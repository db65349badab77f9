#include "stc/trace_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace stc {

namespace {

void put(std::ostream& os, double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    os.write(buf.data(), res.ptr - buf.data());
}

struct Panel {
    double x0, y0, w, h;
    double t_lo, t_hi, v_lo, v_hi;

    [[nodiscard]] double px(double t) const { return x0 + (t - t_lo) / (t_hi - t_lo) * w; }
    [[nodiscard]] double py(double v) const { return y0 + h - (v - v_lo) / (v_hi - v_lo) * h; }
};

void frame(std::ostream& os, const Panel& p, const std::string& title) {
    os << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.w << "\" height=\"" << p.h
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << p.x0 << "\" y=\"" << p.y0 - 6 << "\" font-size=\"13\" font-family=\"sans-serif\">" << title
       << "</text>\n";
    os << "<text x=\"" << p.x0 - 6 << "\" y=\"" << p.y0 + 10
       << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">" << p.v_hi << "</text>\n";
    os << "<text x=\"" << p.x0 - 6 << "\" y=\"" << p.y0 + p.h
       << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">" << p.v_lo << "</text>\n";
    os << "<text x=\"" << p.x0 + p.w << "\" y=\"" << p.y0 + p.h + 14
       << "\" font-size=\"10\" text-anchor=\"end\" font-family=\"sans-serif\">t = " << p.t_hi << " s</text>\n";
}

}  // namespace

void write_trace_csv(const Trace& tr, std::ostream& os) {
    os << 't';
    for (std::size_t i = 1; i <= tr.dim_state; ++i) os << ",x" << i;
    for (std::size_t i = 1; i <= tr.dim_input; ++i) os << ",u" << i;
    for (std::size_t i = 1; i <= tr.dim_disturbance; ++i) os << ",w" << i;
    os << ",is_sample\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        put(os, tr.times[k]);
        for (double v : tr.state(k)) {
            os << ',';
            put(os, v);
        }
        for (double v : tr.input(k)) {
            os << ',';
            put(os, v);
        }
        for (double v : tr.disturbance(k)) {
            os << ',';
            put(os, v);
        }
        os << ',' << static_cast<int>(tr.is_sample[k]) << '\n';
    }
}

void write_trace_svg(const Trace& tr, std::ostream& os) {
    constexpr double kWidth = 900, kHeight = 620;
    static constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c",
                                                        "#9467bd", "#ff7f0e", "#8c564b"};
    const double t_hi = tr.size() > 1 ? tr.times.back() : 1.0;

    double v_lo = 0.0, v_hi = 0.0;
    for (double v : tr.states) {
        if (std::isfinite(v)) {
            v_lo = std::min(v_lo, v);
            v_hi = std::max(v_hi, v);
        }
    }
    if (v_hi - v_lo < 1e-12) v_hi = v_lo + 1.0;
    const Panel top{70, 30, kWidth - 100, 330, 0.0, t_hi, v_lo, v_hi};

    std::vector<double> h;
    for (std::size_t i = 1; i < tr.sample_instants.size(); ++i)
        h.push_back(tr.sample_instants[i] - tr.sample_instants[i - 1]);
    const double h_hi = h.empty() ? 1.0 : std::max(*std::max_element(h.begin(), h.end()), 1e-15);
    const Panel bottom{70, 420, kWidth - 100, 160, 0.0, t_hi, 0.0, h_hi};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    frame(os, top, "states");
    frame(os, bottom, "inter-sample intervals [s]");

    // Thin the polyline to roughly one vertex per pixel column.
    const std::size_t stride = std::max<std::size_t>(1, tr.size() / 2000);
    for (std::size_t c = 0; c < tr.dim_state; ++c) {
        os << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << kColors[c % kColors.size()]
           << "\" points=\"";
        for (std::size_t k = 0; k < tr.size(); k += stride) {
            const double v = tr.state(k)[c];
            if (!std::isfinite(v)) break;
            os << top.px(tr.times[k]) << ',' << top.py(v) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << top.x0 + top.w - 40 << "\" y=\"" << top.y0 + 16 + 14 * static_cast<double>(c)
           << "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"" << kColors[c % kColors.size()] << "\">x"
           << c + 1 << "</text>\n";
    }

    const std::size_t stem_stride = std::max<std::size_t>(1, h.size() / 3000);
    for (std::size_t i = 0; i < h.size(); i += stem_stride) {
        const double x = bottom.px(tr.sample_instants[i]);
        os << "<line x1=\"" << x << "\" y1=\"" << bottom.py(0.0) << "\" x2=\"" << x << "\" y2=\"" << bottom.py(h[i])
           << "\" stroke=\"#1f77b4\" stroke-width=\"0.6\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace stc
