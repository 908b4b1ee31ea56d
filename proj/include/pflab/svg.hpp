#pragma once

#include <fstream>

#include "pflab/common.hpp"

namespace pflab {

// Minimal static line-plot writer (SVG). No display server, no dependencies;
// enough for gap-vs-p curves and barrier profiles.
class svg_plot {
public:
    svg_plot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
             bool logy = false)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)),
          logx_(logx), logy_(logy) {}

    void add_series(std::string label, std::vector<real> xs, std::vector<real> ys) {
        require(xs.size() == ys.size(), "svg_plot: series size mismatch");
        series_.push_back({std::move(label), std::move(xs), std::move(ys)});
    }

    void write(const std::string& path) const {
        const real w = 640, h = 440;
        const real ml = 70, mr = 130, mt = 40, mb = 50;
        real xmin = inf, xmax = -inf, ymin = inf, ymax = -inf;
        for (const auto& s : series_)
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                const real x = tx(s.xs[i]), y = ty(s.ys[i]);
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        if (!(xmin < xmax)) { xmin -= 1; xmax += 1; }
        if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }
        const real xpad = 0.05 * (xmax - xmin), ypad = 0.08 * (ymax - ymin);
        xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;
        auto px = [&](real x) { return ml + (tx(x) - xmin) / (xmax - xmin) * (w - ml - mr); };
        auto py = [&](real y) { return h - mb - (ty(y) - ymin) / (ymax - ymin) * (h - mt - mb); };

        std::ofstream out(path);
        require(out.good(), "svg_plot: cannot open " + path);
        char buf[256];
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
            << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">",
                      0.5 * w);
        out << buf << escape(title_) << "</text>\n";
        // axes
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      ml, h - mb, w - mr, h - mb);
        out << buf;
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                      ml, mt, ml, h - mb);
        out << buf;
        for (int t = 0; t <= 4; ++t) {
            const real fx = xmin + (xmax - xmin) * t / 4.0;
            const real fy = ymin + (ymax - ymin) * t / 4.0;
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%.4g</text>\n",
                          ml + (w - ml - mr) * t / 4.0, h - mb + 18, untx(fx));
            out << buf;
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%.4g</text>\n",
                          ml - 6, h - mb - (h - mt - mb) * t / 4.0 + 4, unty(fy));
            out << buf;
        }
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.1f\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\">",
                      ml + 0.5 * (w - ml - mr), h - 12);
        out << buf << escape(xlabel_) << "</text>\n";
        std::snprintf(buf, sizeof buf,
                      "<text x=\"16\" y=\"%.1f\" font-size=\"13\" text-anchor=\"middle\" "
                      "transform=\"rotate(-90 16 %.1f)\">",
                      mt + 0.5 * (h - mt - mb), mt + 0.5 * (h - mt - mb));
        out << buf << escape(ylabel_) << "</text>\n";

        static const char* colors[] = {"#1b6ca8", "#c23b22", "#2e8540", "#8031a7",
                                       "#b8860b", "#37808e"};
        for (std::size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            out << "<polyline fill=\"none\" stroke=\"" << colors[si % 6]
                << "\" stroke-width=\"1.6\" points=\"";
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                if (!std::isfinite(tx(s.xs[i])) || !std::isfinite(ty(s.ys[i]))) continue;
                std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.xs[i]), py(s.ys[i]));
                out << buf;
            }
            out << "\"/>\n";
            for (std::size_t i = 0; i < s.xs.size(); ++i) {
                if (!std::isfinite(tx(s.xs[i])) || !std::isfinite(ty(s.ys[i]))) continue;
                std::snprintf(buf, sizeof buf,
                              "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2.4\" fill=\"%s\"/>\n",
                              px(s.xs[i]), py(s.ys[i]), colors[si % 6]);
                out << buf;
            }
            std::snprintf(buf, sizeof buf,
                          "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" fill=\"%s\">",
                          w - mr + 10, mt + 16.0 * (si + 1), colors[si % 6]);
            out << buf << escape(s.label) << "</text>\n";
        }
        out << "</svg>\n";
    }

private:
    struct series {
        std::string label;
        std::vector<real> xs, ys;
    };

    real tx(real x) const { return logx_ ? std::log10(std::max(x, 1e-300)) : x; }
    real ty(real y) const { return logy_ ? std::log10(std::max(y, 1e-300)) : y; }
    real untx(real x) const { return logx_ ? std::pow(10.0, x) : x; }
    real unty(real y) const { return logy_ ? std::pow(10.0, y) : y; }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '<') out += "&lt;";
            else if (c == '>') out += "&gt;";
            else if (c == '&') out += "&amp;";
            else out += c;
        }
        return out;
    }

    std::string title_, xlabel_, ylabel_;
    bool logx_, logy_;
    std::vector<series> series_;
};

} // namespace pflab
