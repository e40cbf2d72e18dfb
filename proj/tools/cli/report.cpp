#include "report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "uiground/stats.hpp"

namespace uiground::cli {

namespace {

std::string pct(double v) { return fmt::format("{:.1f}", 100.0 * v); }

std::string leaderboard_row(const eval::EvalReport& r) {
    // One line in the usual leaderboard layout: cells, then the average.
    std::string head, row;
    for (const auto& [g, c] : r.groups) {
        for (auto cls : {ElementClass::Text, ElementClass::Icon}) {
            auto it = r.cells.find({g, cls});
            if (it == r.cells.end()) continue;
            auto label = fmt::format("{} {}", to_string(g), to_string(cls));
            head += fmt::format(" {:>13} |", label);
            row += fmt::format(" {:>13} |", pct(it->second.accuracy()));
        }
    }
    head += fmt::format(" {:>8} |", "average");
    row += fmt::format(" {:>8} |", pct(r.overall));
    return "|" + head + "\n|" + row + "\n";
}

}  // namespace

std::string render_summary(const eval::EvalReport& r, const std::optional<failure::FailureBreakdown>& f) {
    std::string out = "== Click accuracy ==\n\n";
    out += eval::to_text(r);
    if (!r.cells.empty()) out += "\n" + leaderboard_row(r);
    if (f) {
        out += "\n== Failure analysis ==\n\n";
        out += failure::to_text(*f);
    }
    return out;
}

std::string render_svg(const eval::EvalReport& r, const std::optional<failure::FailureBreakdown>& f) {
    constexpr int kBarW = 60, kGap = 30, kPlotH = 200, kTop = 40, kLeft = 50;
    const int groups = static_cast<int>(r.groups.size()) + 1;  // + average
    const int chart_w = kLeft + groups * (kBarW + kGap) + kGap;
    const bool heat = f && f->bias.has_value();
    const int heat_size = 200;
    const int width = chart_w + (heat ? heat_size + 80 : 0);
    const int height = kTop + kPlotH + 60;

    std::string s = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n",
        width, height, width, height);
    s += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, height);
    s += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">Click accuracy (bars) with 2-sigma threshold</text>\n",
                     kLeft);
    const int base = kTop + kPlotH;
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", kLeft, base, chart_w, base);
    for (int t = 0; t <= 100; t += 25) {
        const double y = base - kPlotH * t / 100.0;
        s += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}%</text>\n", kLeft - 6, y + 4, t);
        s += fmt::format("<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                         chart_w, y);
    }

    auto bar = [&](int i, const std::string& label, double acc, std::uint64_t n, const char* colour) {
        const double x = kLeft + kGap + i * (kBarW + kGap);
        const double h = kPlotH * acc;
        s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{}\" height=\"{:.1f}\" fill=\"{}\"/>\n", x, base - h,
                         kBarW, h, colour);
        if (n > 0) {
            const double th = kPlotH * stats::significance_threshold(n, acc);
            const double cx = x + kBarW / 2.0;
            s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n", cx,
                             std::max<double>(kTop, base - h - th), cx, std::min<double>(base, base - h + th));
        }
        s += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x + kBarW / 2.0, base + 16,
                         label);
        s += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}%</text>\n", x + kBarW / 2.0,
                         base + 32, pct(acc));
    };
    int i = 0;
    for (const auto& [g, c] : r.groups) bar(i++, std::string(to_string(g)), c.accuracy(), c.n, "#4a7ab5");
    bar(i, "average", r.overall, r.n, "#e08a2c");

    if (heat) {
        const auto& hist = f->bias->histogram;
        const int x0 = chart_w + 40;
        const double cell = static_cast<double>(heat_size) / hist.grid;
        std::uint64_t peak = 1;
        for (auto c : hist.counts) peak = std::max(peak, c);
        s += fmt::format("<text x=\"{}\" y=\"20\" font-size=\"14\">Failed clicks</text>\n", x0);
        for (int row = 0; row < hist.grid; ++row) {
            for (int col = 0; col < hist.grid; ++col) {
                const auto c = hist.at(row, col);
                const int shade = 255 - static_cast<int>(std::lround(200.0 * static_cast<double>(c) / peak));
                s += fmt::format(
                    "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"rgb(255,{},{})\" "
                    "stroke=\"#999\"/>\n",
                    x0 + col * cell, kTop + row * cell, cell, cell, shade, shade);
                s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                                 x0 + (col + 0.5) * cell, kTop + (row + 0.5) * cell + 4, c);
            }
        }
        const auto& m = f->bias->mean;
        s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"black\"/>\n", x0 + m.x * heat_size,
                         kTop + m.y * heat_size);
    }
    s += "</svg>\n";
    return s;
}

}  // namespace uiground::cli
