/*
 * SPDX-FileCopyrightText: Copyright 2026 The scnn-lab authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Minimal SVG line charts and histograms.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "scnn/attack/cpa.hpp"
#include "scnn/error.hpp"

namespace scnn {

struct Series {
    std::string label;
    std::vector<double> x, y;
    bool highlight = false;
};

struct ChartOptions {
    std::string title, x_label, y_label;
    int width = 720, height = 420;
};

namespace detail {

inline std::string svg_escape(const std::string &s) {
    std::string o;
    for (char c : s) {
        switch (c) {
        case '&':
            o += "&amp;";
            break;
        case '<':
            o += "&lt;";
            break;
        case '>':
            o += "&gt;";
            break;
        case '"':
            o += "&quot;";
            break;
        default:
            o += c;
        }
    }
    return o;
}

inline std::string fmt(double v, const char *f = "%.4g") {
    char b[32];
    std::snprintf(b, sizeof b, f, v);
    return b;
}

struct Frame {
    double x0, x1, y0, y1;
    int w, h;
    static constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (w - kLeft - kRight); }
    double py(double y) const { return h - kBottom - (y - y0) / (y1 - y0) * (h - kTop - kBottom); }
};

inline std::string axes(const Frame &f, const ChartOptions &o) {
    std::string s;
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(f.w) + "\" height=\"" + std::to_string(f.h) +
         "\" fill=\"white\"/>\n";
    const double l = Frame::kLeft, r = f.w - Frame::kRight, t = Frame::kTop, b = f.h - Frame::kBottom;
    s += "<path d=\"M" + fmt(l) + " " + fmt(t) + " V" + fmt(b) + " H" + fmt(r) +
         "\" stroke=\"black\" fill=\"none\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0, yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        s += "<text x=\"" + fmt(f.px(xv)) + "\" y=\"" + fmt(b + 16) + "\" font-size=\"11\" text-anchor=\"middle\">" +
             fmt(xv) + "</text>\n";
        s += "<text x=\"" + fmt(l - 6) + "\" y=\"" + fmt(f.py(yv) + 4) + "\" font-size=\"11\" text-anchor=\"end\">" +
             fmt(yv) + "</text>\n";
    }
    s += "<text x=\"" + fmt(f.w / 2.0) + "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">" +
         svg_escape(o.title) + "</text>\n";
    s += "<text x=\"" + fmt((l + r) / 2) + "\" y=\"" + fmt(f.h - 12.0) + "\" font-size=\"12\" text-anchor=\"middle\">" +
         svg_escape(o.x_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + fmt((t + b) / 2) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt((t + b) / 2) + ")\">" + svg_escape(o.y_label) + "</text>\n";
    return s;
}

inline std::string header(int w, int h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
           std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) + "\">\n";
}

} // namespace detail

/// Highlighted series are drawn last, in red; the rest in light grey.
inline std::string line_chart_svg(const std::vector<Series> &series, const ChartOptions &o) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto &s : series) {
        if (s.x.size() != s.y.size())
            throw UsageError("line chart: x and y lengths differ in series '" + s.label + "'");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0))
        throw UsageError("line chart: no data");
    if (x1 == x0)
        x1 = x0 + 1;
    if (y1 == y0)
        y1 = y0 + 1;
    const detail::Frame f{x0, x1, y0, y1, o.width, o.height};
    std::string svg = detail::header(o.width, o.height) + detail::axes(f, o);
    auto draw = [&](const Series &s) {
        std::string d;
        for (std::size_t i = 0; i < s.x.size(); ++i)
            d += (i ? " L" : "M") + detail::fmt(f.px(s.x[i]), "%.2f") + " " + detail::fmt(f.py(s.y[i]), "%.2f");
        svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + (s.highlight ? "#c0392b" : "#b0b0b0") +
               "\" stroke-width=\"" + (s.highlight ? "2" : "1") + "\"><title>" + detail::svg_escape(s.label) +
               "</title></path>\n";
    };
    for (const auto &s : series)
        if (!s.highlight)
            draw(s);
    int legend = 0;
    for (const auto &s : series)
        if (s.highlight) {
            draw(s);
            svg += "<text x=\"" + std::to_string(o.width - 30) + "\" y=\"" + std::to_string(52 + 14 * legend++) +
                   "\" font-size=\"11\" text-anchor=\"end\" fill=\"#c0392b\">" + detail::svg_escape(s.label) +
                   "</text>\n";
        }
    return svg + "</svg>\n";
}

/// Correlation against sample index, one line per hypothesis. The `highlight`
/// strongest peaks are emphasised.
inline std::string correlation_svg(const std::vector<CorrelationCurve> &curves, const ChartOptions &o,
                                   std::size_t highlight = 1, std::size_t first_sample = 0) {
    std::vector<std::size_t> order(curves.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return curves[a].peak > curves[b].peak; });
    std::vector<Series> s(curves.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
        s[i].label = detail::fmt(curves[i].hypothesis, "%.6g");
        for (std::size_t k = 0; k < curves[i].rho.size(); ++k) {
            s[i].x.push_back(double(first_sample + k));
            s[i].y.push_back(curves[i].rho[k]);
        }
    }
    for (std::size_t i = 0; i < std::min(highlight, order.size()); ++i)
        s[order[i]].highlight = true;
    return line_chart_svg(s, o);
}

/// Peak correlation against hypothesis value.
inline std::string peak_svg(const std::vector<CorrelationCurve> &curves, const ChartOptions &o) {
    Series s{"peak", {}, {}, true};
    for (const auto &c : curves) {
        s.x.push_back(c.hypothesis);
        s.y.push_back(c.peak);
    }
    return line_chart_svg({s}, o);
}

inline std::string histogram_svg(const std::vector<double> &values, std::size_t bins, const ChartOptions &o) {
    if (values.empty())
        throw UsageError("histogram: no data");
    if (bins == 0)
        throw UsageError("histogram: bins must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it > *lo_it ? *hi_it : *lo_it + 1;
    std::vector<std::size_t> count(bins, 0);
    for (double v : values)
        ++count[std::min(bins - 1, std::size_t((v - lo) / (hi - lo) * double(bins)))];
    const double top = double(*std::max_element(count.begin(), count.end()));
    const detail::Frame f{lo, hi, 0, top, o.width, o.height};
    std::string svg = detail::header(o.width, o.height) + detail::axes(f, o);
    const double bw = (hi - lo) / double(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        const double xa = f.px(lo + bw * double(b)), xb = f.px(lo + bw * double(b + 1)), y = f.py(double(count[b]));
        svg += "<rect x=\"" + detail::fmt(xa, "%.2f") + "\" y=\"" + detail::fmt(y, "%.2f") + "\" width=\"" +
               detail::fmt(std::max(0.5, xb - xa - 1), "%.2f") + "\" height=\"" +
               detail::fmt(f.py(0) - y, "%.2f") + "\" fill=\"#2e86c1\"/>\n";
    }
    return svg + "</svg>\n";
}

} // namespace scnn
