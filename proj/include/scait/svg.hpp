// Minimal SVG emission for the report charts: multi-series line charts and
// stacked bar charts. Presentation only; the CSV is the canonical output.
#ifndef SCAIT_SVG_HPP
#define SCAIT_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace scait::svg {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (x, y), plotted in given order
};

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f6fb2", "#d1495b", "#3e8e57", "#8a5fbf", "#c98a2b", "#4d4d4d"};
    return colors[i % 6];
}

struct Scale {
    double lo = 0.0, hi = 1.0;
    double px0 = 0.0, px1 = 1.0;
    double map(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

inline void expand_range(double& lo, double& hi) {
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
}

inline std::string axis_ticks(const Scale& s, bool horizontal, double cross_px, int count = 5) {
    std::string out;
    for (int i = 0; i <= count; ++i) {
        double v = s.lo + (s.hi - s.lo) * i / count;
        double p = s.map(v);
        if (horizontal) {
            out += "<line x1='" + num(p) + "' y1='" + num(cross_px) + "' x2='" + num(p) + "' y2='" +
                   num(cross_px + 5) + "' stroke='#333'/>\n";
            out += "<text x='" + num(p) + "' y='" + num(cross_px + 18) +
                   "' font-size='11' text-anchor='middle' fill='#333'>" + num(v) + "</text>\n";
        } else {
            out += "<line x1='" + num(cross_px - 5) + "' y1='" + num(p) + "' x2='" + num(cross_px) + "' y2='" +
                   num(p) + "' stroke='#333'/>\n";
            out += "<text x='" + num(cross_px - 8) + "' y='" + num(p + 4) +
                   "' font-size='11' text-anchor='end' fill='#333'>" + num(v) + "</text>\n";
        }
    }
    return out;
}

}  // namespace detail

inline std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series) {
    const double W = 640, H = 420, ml = 70, mr = 160, mt = 50, mb = 55;
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool any = false;
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!any) {
                xlo = xhi = x;
                ylo = yhi = y;
                any = true;
            }
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    detail::expand_range(xlo, xhi);
    detail::expand_range(ylo, yhi);
    detail::Scale sx{xlo, xhi, ml, W - mr};
    detail::Scale sy{ylo, yhi, H - mb, mt};

    std::string out = "<svg xmlns='http://www.w3.org/2000/svg' width='" + detail::num(W) + "' height='" +
                      detail::num(H) + "' viewBox='0 0 " + detail::num(W) + " " + detail::num(H) + "'>\n";
    out += "<rect width='100%' height='100%' fill='white'/>\n";
    out += "<text x='" + detail::num(W / 2) + "' y='24' font-size='15' text-anchor='middle' fill='#111'>" + title +
           "</text>\n";
    out += "<rect x='" + detail::num(ml) + "' y='" + detail::num(mt) + "' width='" + detail::num(W - ml - mr) +
           "' height='" + detail::num(H - mt - mb) + "' fill='none' stroke='#333'/>\n";
    out += detail::axis_ticks(sx, true, H - mb);
    out += detail::axis_ticks(sy, false, ml);
    out += "<text x='" + detail::num((ml + W - mr) / 2) + "' y='" + detail::num(H - 12) +
           "' font-size='12' text-anchor='middle' fill='#111'>" + x_label + "</text>\n";
    out += "<text x='16' y='" + detail::num((mt + H - mb) / 2) + "' font-size='12' text-anchor='middle' fill='#111'" +
           " transform='rotate(-90 16 " + detail::num((mt + H - mb) / 2) + ")'>" + y_label + "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        if (s.points.empty()) continue;
        std::string pts;
        for (auto [x, y] : s.points) pts += detail::num(sx.map(x)) + "," + detail::num(sy.map(y)) + " ";
        out += "<polyline points='" + pts + "' fill='none' stroke='" + detail::palette(i) + "' stroke-width='2'/>\n";
        for (auto [x, y] : s.points)
            out += "<circle cx='" + detail::num(sx.map(x)) + "' cy='" + detail::num(sy.map(y)) +
                   "' r='3' fill='" + detail::palette(i) + "'/>\n";
        double ly = mt + 16 + 18 * static_cast<double>(i);
        out += "<line x1='" + detail::num(W - mr + 10) + "' y1='" + detail::num(ly - 4) + "' x2='" +
               detail::num(W - mr + 32) + "' y2='" + detail::num(ly - 4) + "' stroke='" + detail::palette(i) +
               "' stroke-width='2'/>\n";
        out += "<text x='" + detail::num(W - mr + 38) + "' y='" + detail::num(ly) + "' font-size='11' fill='#111'>" +
               s.name + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

struct StackedBar {
    std::string label;
    std::vector<std::pair<std::string, double>> segments;  // (name, value), bottom-up
};

inline std::string stacked_bar_chart(const std::string& title, const std::string& y_label,
                                     const std::vector<StackedBar>& bars) {
    const double W = 640, H = 420, ml = 70, mr = 160, mt = 50, mb = 70;
    double hi = 0.0;
    for (const auto& b : bars) {
        double total = 0.0;
        for (auto& [_, v] : b.segments) total += v;
        hi = std::max(hi, total);
    }
    double lo = 0.0;
    if (hi <= 0.0) hi = 1.0;
    hi *= 1.1;
    detail::Scale sy{lo, hi, H - mb, mt};

    std::string out = "<svg xmlns='http://www.w3.org/2000/svg' width='" + detail::num(W) + "' height='" +
                      detail::num(H) + "' viewBox='0 0 " + detail::num(W) + " " + detail::num(H) + "'>\n";
    out += "<rect width='100%' height='100%' fill='white'/>\n";
    out += "<text x='" + detail::num(W / 2) + "' y='24' font-size='15' text-anchor='middle' fill='#111'>" + title +
           "</text>\n";
    out += "<rect x='" + detail::num(ml) + "' y='" + detail::num(mt) + "' width='" + detail::num(W - ml - mr) +
           "' height='" + detail::num(H - mt - mb) + "' fill='none' stroke='#333'/>\n";
    out += detail::axis_ticks(sy, false, ml);
    out += "<text x='16' y='" + detail::num((mt + H - mb) / 2) + "' font-size='12' text-anchor='middle' fill='#111'" +
           " transform='rotate(-90 16 " + detail::num((mt + H - mb) / 2) + ")'>" + y_label + "</text>\n";

    std::vector<std::string> seg_names;
    double span = W - ml - mr;
    double slot = bars.empty() ? span : span / static_cast<double>(bars.size());
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const auto& b = bars[i];
        double cx = ml + slot * (static_cast<double>(i) + 0.5);
        double bw = slot * 0.5;
        double acc = 0.0;
        for (const auto& [name, v] : b.segments) {
            std::size_t ci = 0;
            auto it = std::find(seg_names.begin(), seg_names.end(), name);
            if (it == seg_names.end()) {
                seg_names.push_back(name);
                ci = seg_names.size() - 1;
            } else {
                ci = static_cast<std::size_t>(it - seg_names.begin());
            }
            double y0 = sy.map(acc);
            double y1 = sy.map(acc + v);
            out += "<rect x='" + detail::num(cx - bw / 2) + "' y='" + detail::num(y1) + "' width='" +
                   detail::num(bw) + "' height='" + detail::num(y0 - y1) + "' fill='" + detail::palette(ci) +
                   "'/>\n";
            acc += v;
        }
        out += "<text x='" + detail::num(cx) + "' y='" + detail::num(H - mb + 18) +
               "' font-size='11' text-anchor='middle' fill='#111'>" + b.label + "</text>\n";
    }
    for (std::size_t i = 0; i < seg_names.size(); ++i) {
        double ly = mt + 16 + 18 * static_cast<double>(i);
        out += "<rect x='" + detail::num(W - mr + 10) + "' y='" + detail::num(ly - 10) +
               "' width='12' height='12' fill='" + detail::palette(i) + "'/>\n";
        out += "<text x='" + detail::num(W - mr + 28) + "' y='" + detail::num(ly) + "' font-size='11' fill='#111'>" +
               seg_names[i] + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace scait::svg

#endif  // SCAIT_SVG_HPP
