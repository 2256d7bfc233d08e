#pragma once

// Static SVG chart of a trace: (phi_d, phi) vs t on top, e1 vs t below.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "sea/simulator.hpp"

namespace sea {

namespace detail {

struct Panel {
    double x0, y0, w, h;
    double tmin, tmax, vmin, vmax;

    double px(double t) const { return x0 + w * (t - tmin) / (tmax - tmin); }
    double py(double v) const { return y0 + h * (1.0 - (v - vmin) / (vmax - vmin)); }
};

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

template <typename Get>
void polyline(std::ostream& out, const Panel& p, const std::vector<TraceRecord>& trace, Get get,
              const char* colour) {
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    // at most ~2 points per horizontal pixel keeps the file small
    const std::size_t stride = std::max<std::size_t>(1, trace.size() / static_cast<std::size_t>(2 * p.w));
    for (std::size_t i = 0; i < trace.size(); i += stride)
        out << svg_num(p.px(trace[i].t)) << ',' << svg_num(p.py(get(trace[i]))) << ' ';
    out << "\"/>\n";
}

inline void frame(std::ostream& out, const Panel& p, const char* ylabel) {
    out << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.w << "\" height=\"" << p.h
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = p.vmin + (p.vmax - p.vmin) * i / 4.0;
        const double y = p.py(v);
        out << "<line x1=\"" << p.x0 << "\" x2=\"" << p.x0 + p.w << "\" y1=\"" << svg_num(y) << "\" y2=\""
            << svg_num(y) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << p.x0 - 6 << "\" y=\"" << svg_num(y + 4) << "\" text-anchor=\"end\">" << tick_label(v)
            << "</text>\n";
    }
    for (int i = 0; i <= 8; ++i) {
        const double t = p.tmin + (p.tmax - p.tmin) * i / 8.0;
        out << "<text x=\"" << svg_num(p.px(t)) << "\" y=\"" << p.y0 + p.h + 16 << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << p.x0 - 48 << "\" y=\"" << p.y0 + p.h / 2 << "\" transform=\"rotate(-90 " << p.x0 - 48
        << ' ' << p.y0 + p.h / 2 << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
}

inline std::pair<double, double> padded_range(double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 1e-3;
        hi += 1e-3;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace detail

inline void write_trace_svg(std::ostream& out, const std::vector<TraceRecord>& trace) {
    constexpr double width = 800, height = 560;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (trace.size() < 2) {
        out << "<text x=\"20\" y=\"30\">empty trace</text>\n</svg>\n";
        return;
    }
    const double tmin = trace.front().t, tmax = trace.back().t;

    double lo = trace.front().phi, hi = lo, elo = trace.front().e1, ehi = elo;
    for (const auto& r : trace) {
        lo = std::min({lo, r.phi, r.phi_d});
        hi = std::max({hi, r.phi, r.phi_d});
        elo = std::min(elo, r.e1);
        ehi = std::max(ehi, r.e1);
    }
    const auto [alo, ahi] = detail::padded_range(lo, hi);
    const auto [blo, bhi] = detail::padded_range(elo, ehi);
    const detail::Panel top{80, 30, 690, 280, tmin, tmax, alo, ahi};
    const detail::Panel bottom{80, 360, 690, 160, tmin, tmax, blo, bhi};

    detail::frame(out, top, "angle [rad]");
    detail::polyline(out, top, trace, [](const TraceRecord& r) { return r.phi_d; }, "#1f77b4");
    detail::polyline(out, top, trace, [](const TraceRecord& r) { return r.phi; }, "#d62728");
    out << "<text x=\"" << top.x0 + 10 << "\" y=\"" << top.y0 + 16 << "\" fill=\"#1f77b4\">phi_d</text>\n"
        << "<text x=\"" << top.x0 + 60 << "\" y=\"" << top.y0 + 16 << "\" fill=\"#d62728\">phi</text>\n";

    detail::frame(out, bottom, "e1 [rad]");
    detail::polyline(out, bottom, trace, [](const TraceRecord& r) { return r.e1; }, "#2ca02c");
    out << "<text x=\"" << bottom.x0 + bottom.w / 2 << "\" y=\"" << height - 8
        << "\" text-anchor=\"middle\">t [s]</text>\n</svg>\n";
}

}  // namespace sea
