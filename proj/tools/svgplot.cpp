#include "svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace femcert::tools {

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx, bool logy)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
      logx_(logx), logy_(logy) {}

void SvgPlot::add_series(std::string name, std::vector<double> x, std::vector<double> y) {
    series_.push_back({std::move(name), std::move(x), std::move(y)});
}

std::string SvgPlot::render() const {
    const double W = 640, H = 480;
    const double L = 70, R = 20, T = 36, B = 50;

    auto tx = [&](double v) { return logx_ ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy_ ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (logx_ && s.x[i] <= 0.0) continue;
            if (logy_ && s.y[i] <= 0.0) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, tx(s.x[i]));
            xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax = xmin + 1.0; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax = ymin + 1.0; }
    double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    auto px = [&](double v) { return L + (tx(v) - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double v) { return H - B - (ty(v) - ymin) / (ymax - ymin) * (H - T - B); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">"
        << title_ << "</text>\n";

    // frame
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
        << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";

    // ticks: decades on log axes, 6 even ticks otherwise
    auto emit_xtick = [&](double v, const std::string& label) {
        double x = L + (v - xmin) / (xmax - xmin) * (W - L - R);
        out << "<line x1=\"" << x << "\" y1=\"" << H - B << "\" x2=\"" << x << "\" y2=\""
            << H - B + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << x << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << label << "</text>\n";
    };
    auto emit_ytick = [&](double v, const std::string& label) {
        double y = H - B - (v - ymin) / (ymax - ymin) * (H - T - B);
        out << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
            << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << L - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << label << "</text>\n";
    };
    if (logx_) {
        for (int d = static_cast<int>(std::ceil(xmin)); d <= std::floor(xmax); ++d) {
            emit_xtick(d, "1e" + std::to_string(d));
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            double v = xmin + (xmax - xmin) * i / 5.0;
            emit_xtick(v, num(v));
        }
    }
    if (logy_) {
        for (int d = static_cast<int>(std::ceil(ymin)); d <= std::floor(ymax); ++d) {
            emit_ytick(d, "1e" + std::to_string(d));
        }
    } else {
        for (int i = 0; i <= 5; ++i) {
            double v = ymin + (ymax - ymin) * i / 5.0;
            emit_ytick(v, num(v));
        }
    }

    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n"
        << "<text x=\"16\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">" << ylabel_ << "</text>\n";

    for (size_t si = 0; si < series_.size(); ++si) {
        const auto& s = series_[si];
        const char* color = kColors[si % 8];
        std::ostringstream pts;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (logx_ && s.x[i] <= 0.0) continue;
            if (logy_ && s.y[i] <= 0.0) continue;
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        double ly = T + 16 + 16.0 * si;
        out << "<line x1=\"" << L + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + 34
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << L + 40 << "\" y=\"" << ly << "\" font-size=\"12\">" << s.name
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace femcert::tools
