#include <algorithm>
#include <array>
#include <string>

#include <fmt/format.h>

#include "cerlens/report.hpp"

namespace cerlens {

namespace {

constexpr double kWidth = 900;
constexpr double kHeight = 420;
constexpr double kLeft = 64;
constexpr double kRight = 884;
constexpr double kTop = 52;
constexpr double kBottom = 352;

constexpr std::array<std::string_view, 10> kPalette = {
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
constexpr std::string_view kCorrect = "#3a9a48";
constexpr std::string_view kIncorrect = "#d1433f";
constexpr std::string_view kDot = "#1f5fbf";

std::string_view color(std::size_t model_index) { return kPalette[model_index % kPalette.size()]; }

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

class Canvas {
public:
    Canvas() {
        out_ = fmt::format(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
            "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
            "<rect x=\"0\" y=\"0\" width=\"{0:.0f}\" height=\"{1:.0f}\" fill=\"#ffffff\"/>\n",
            kWidth, kHeight);
    }

    void rect(double x, double y, double w, double h, std::string_view fill, double opacity = 1.0) {
        if (w <= 0 || h <= 0) return;
        out_ += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"", x, y,
                            w, h, fill);
        if (opacity < 1.0) out_ += fmt::format(" fill-opacity=\"{:.2f}\"", opacity);
        out_ += "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
        out_ += fmt::format(
            "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"{:.2f}\"/>\n",
            x1, y1, x2, y2, stroke, width);
    }

    void circle(double cx, double cy, double r, std::string_view fill) {
        out_ += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"{}\"/>\n", cx, cy, r, fill);
    }

    void text(double x, double y, std::string_view s, double size = 11, std::string_view anchor = "middle",
              std::string_view weight = "normal") {
        out_ += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"{:.0f}\" text-anchor=\"{}\"", x, y, size,
                            anchor);
        if (weight != "normal") out_ += fmt::format(" font-weight=\"{}\"", weight);
        out_ += ">" + escape(s) + "</text>\n";
    }

    std::string finish() {
        out_ += "</svg>\n";
        return std::move(out_);
    }

private:
    std::string out_;
};

double y_of(double fraction) { return kBottom - fraction * (kBottom - kTop); }

void fraction_axis(Canvas& c, double left, double right) {
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        c.line(left, y_of(f), right, y_of(f), i == 0 ? "#333333" : "#dddddd");
        c.text(left - 6, y_of(f) + 4, fmt::format("{:.0f}%", f * 100), 10, "end");
    }
}

void legend(Canvas& c, const std::vector<std::string>& models, std::string_view note = {}) {
    double x = kLeft;
    const double y = kHeight - 22;
    for (std::size_t i = 0; i < models.size(); ++i) {
        c.rect(x, y - 10, 12, 12, color(i));
        c.text(x + 16, y, models[i], 11, "start");
        x += 24 + 7.0 * static_cast<double>(models[i].size());
    }
    if (!note.empty()) c.text(kRight, y, note, 10, "end");
}

std::string title(const AnalysisReport& r) {
    switch (r.kind) {
        case ReportKind::Constructs: return "Correct output predictions per program construct";
        case ReportKind::Cyclomatic: return "Prediction success by cyclomatic complexity";
        case ReportKind::Cognitive: return "Prediction success by cognitive complexity";
        case ReportKind::Loc: return "Prediction success by lines of code";
        case ReportKind::LoopLength: return "Prediction success by loop length";
        case ReportKind::Types: return "Type match (TM) and value match (VM) per output type";
    }
    return {};
}

// One group per cluster, `series` bars per group.
template <typename BarFn>
void grouped_bars(Canvas& c, const std::vector<std::string>& clusters, std::size_t series, BarFn&& bar) {
    const double group = (kRight - kLeft) / static_cast<double>(std::max<std::size_t>(clusters.size(), 1));
    const double width = group * 0.8 / static_cast<double>(std::max<std::size_t>(series, 1));
    for (std::size_t g = 0; g < clusters.size(); ++g) {
        const double x0 = kLeft + group * static_cast<double>(g) + group * 0.1;
        for (std::size_t s = 0; s < series; ++s) bar(g, s, x0 + width * static_cast<double>(s), width);
        c.text(kLeft + group * (static_cast<double>(g) + 0.5), kBottom + 16, clusters[g], 11);
    }
}

std::string render_grouped(const AnalysisReport& r) {
    Canvas c;
    c.text(kWidth / 2, 26, title(r), 15, "middle", "bold");
    fraction_axis(c, kLeft, kRight);
    const bool types = r.kind == ReportKind::Types;
    const std::size_t per_model = types ? 2 : 1;
    grouped_bars(c, r.clusters, r.models.size() * per_model,
                 [&](std::size_t g, std::size_t s, double x, double w) {
                     const std::size_t m = s / per_model;
                     const std::string cluster =
                         types ? (s % 2 == 0 ? "TM:" : "VM:") + r.clusters[g] : r.clusters[g];
                     const ReportRow* row = r.find(r.models[m], cluster);
                     if (!row || !row->accuracy) return;
                     const double opacity = types && s % 2 == 1 ? 0.45 : 1.0;
                     c.rect(x, y_of(*row->accuracy), w * 0.92, kBottom - y_of(*row->accuracy), color(m), opacity);
                 });
    legend(c, r.models, types ? "solid = TM, light = VM" : "");
    return c.finish();
}

std::string render_bucketed(const AnalysisReport& r) {
    Canvas c;
    c.text(kWidth / 2, 22, title(r), 15, "middle", "bold");
    const std::size_t panels = std::max<std::size_t>(r.models.size(), 1);
    const double gap = 28;
    const double panel_w = (kRight - kLeft - gap * static_cast<double>(panels - 1)) / static_cast<double>(panels);

    std::size_t max_n = 1;
    for (const auto& row : r.rows) max_n = std::max(max_n, row.n);

    for (std::size_t m = 0; m < r.models.size(); ++m) {
        const double left = kLeft + static_cast<double>(m) * (panel_w + gap);
        const double right = left + panel_w;
        const auto rho = r.rho.find(r.models[m]);
        const std::string coefficient = rho != r.rho.end() && rho->second
                                            ? fmt::format("{:.2f}", *rho->second)
                                            : std::string("n/a");
        c.text((left + right) / 2, 42, r.models[m] + " (ρ = " + coefficient + ")", 12, "middle", "bold");
        c.line(left, kBottom, right, kBottom, "#333333");
        c.line(left, kTop, left, kBottom, "#333333");
        c.text(left - 4, kTop + 4, std::to_string(max_n), 9, "end");
        c.text(left - 4, kBottom, "0", 9, "end");

        const double slot = panel_w / static_cast<double>(std::max<std::size_t>(r.clusters.size(), 1));
        for (std::size_t b = 0; b < r.clusters.size(); ++b) {
            const ReportRow* row = r.find(r.models[m], r.clusters[b]);
            const double x = left + slot * static_cast<double>(b) + slot * 0.15;
            const double w = slot * 0.7;
            if (row && row->n > 0) {
                const double scale = (kBottom - kTop) / static_cast<double>(max_n);
                const double h_ok = scale * static_cast<double>(row->n_correct);
                const double h_bad = scale * static_cast<double>(row->n - row->n_correct);
                c.rect(x, kBottom - h_ok, w, h_ok, kCorrect);
                c.rect(x, kBottom - h_ok - h_bad, w, h_bad, kIncorrect);
                c.circle(x + w / 2, y_of(*row->accuracy), 3.5, kDot);
            }
            c.text(x + w / 2, kBottom + 14, r.clusters[b], 9);
        }
    }
    double x = kLeft;
    const double y = kHeight - 22;
    for (auto [label, fill] : {std::pair<std::string_view, std::string_view>{"correct", kCorrect},
                               {"incorrect", kIncorrect}}) {
        c.rect(x, y - 10, 12, 12, fill);
        c.text(x + 16, y, label, 11, "start");
        x += 90;
    }
    c.circle(x + 6, y - 4, 4, kDot);
    c.text(x + 16, y, "accuracy (0-100%)", 11, "start");
    return c.finish();
}

}  // namespace

std::string render_svg(const AnalysisReport& report) {
    return report.has_rho() ? render_bucketed(report) : render_grouped(report);
}

}  // namespace cerlens
