#include "robustad/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace robustad::report {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label_number(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string header(double width, double height) {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           fmt(width) + "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string text(double x, double y, const std::string& body, const std::string& anchor = "start") {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor + "\">" + xml_escape(body) +
           "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
    return "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) + "\" y2=\"" + fmt(y2) +
           "\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>\n";
}

// Plot frame mapping data ranges onto the drawing area.
struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.0) * (kWidth - kLeft - kRight); }
    double py(double y) const {
        return kHeight - kBottom - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.0) * (kHeight - kTop - kBottom);
    }
};

std::string axes(const Frame& f, const std::string& title, const std::string& xlabel, const std::string& ylabel,
                 int ticks) {
    std::string out;
    out += text(kWidth / 2.0, kTop / 2.0 + 4.0, title, "middle");
    out += line(f.px(f.x0), f.py(f.y0), f.px(f.x1), f.py(f.y0), "black");
    out += line(f.px(f.x0), f.py(f.y0), f.px(f.x0), f.py(f.y1), "black");
    for (int i = 0; i <= ticks; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / ticks;
        const double yv = f.y0 + (f.y1 - f.y0) * i / ticks;
        out += line(f.px(xv), f.py(f.y0), f.px(xv), f.py(f.y0) + 4.0, "black");
        out += text(f.px(xv), f.py(f.y0) + 16.0, label_number(xv, 2), "middle");
        out += line(f.px(f.x0) - 4.0, f.py(yv), f.px(f.x0), f.py(yv), "black");
        out += text(f.px(f.x0) - 6.0, f.py(yv) + 4.0, label_number(yv, 1), "end");
    }
    out += text(f.px((f.x0 + f.x1) / 2.0), kHeight - 12.0, xlabel, "middle");
    out += "<text x=\"14\" y=\"" + fmt(f.py((f.y0 + f.y1) / 2.0)) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
           fmt(f.py((f.y0 + f.y1) / 2.0)) + ")\">" + xml_escape(ylabel) + "</text>\n";
    return out;
}

std::string legend(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double y = kTop + 10.0 + 18.0 * static_cast<double>(i);
        const double x = kWidth - kRight + 15.0;
        out += line(x, y, x + 20.0, y, palette(i), 2.5);
        out += text(x + 26.0, y + 4.0, names[i]);
    }
    return out;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

const std::string& palette(std::size_t index) {
    static const std::array<std::string, 8> colors = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                      "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    return colors[index % colors.size()];
}

std::string xml_escape(const std::string& s) {
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

std::string f1_curve_svg(const std::vector<AggregateRow>& rows, const std::string& dataset_id) {
    std::vector<std::string> models;
    std::map<std::string, std::vector<const AggregateRow*>> by_model;
    double max_alpha = 0.0;
    for (const auto& r : rows) {
        if (r.dataset_id != dataset_id) continue;
        if (!by_model.count(r.model_id)) models.push_back(r.model_id);
        by_model[r.model_id].push_back(&r);
        max_alpha = std::max(max_alpha, r.alpha);
    }
    const Frame f{0.0, max_alpha, 0.0, 1.0};
    std::string out = header(kWidth, kHeight);
    out += axes(f, "F1 vs contamination: " + dataset_id, "contamination ratio alpha", "mean F1", 4);
    for (std::size_t m = 0; m < models.size(); ++m) {
        auto pts = by_model[models[m]];
        std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a->alpha < b->alpha; });
        std::string band;
        for (const auto* p : pts) band += fmt(f.px(p->alpha)) + "," + fmt(f.py(clip01(p->f1.mean + p->f1.std))) + " ";
        for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
            band += fmt(f.px((*it)->alpha)) + "," + fmt(f.py(clip01((*it)->f1.mean - (*it)->f1.std))) + " ";
        }
        out += "<polygon class=\"band\" points=\"" + band + "\" fill=\"" + palette(m) +
               "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        std::string poly;
        for (const auto* p : pts) poly += fmt(f.px(p->alpha)) + "," + fmt(f.py(clip01(p->f1.mean))) + " ";
        out += "<polyline class=\"mean\" data-model=\"" + xml_escape(models[m]) + "\" points=\"" + poly +
               "\" fill=\"none\" stroke=\"" + palette(m) + "\" stroke-width=\"2\"/>\n";
    }
    out += legend(models);
    out += "</svg>\n";
    return out;
}

std::string roc_svg(const std::vector<NamedRoc>& curves, const std::string& title) {
    const Frame f{0.0, 1.0, 0.0, 1.0};
    std::string out = header(kWidth, kHeight);
    out += axes(f, title, "false positive rate", "true positive rate", 5);
    out += "<line x1=\"" + fmt(f.px(0)) + "\" y1=\"" + fmt(f.py(0)) + "\" x2=\"" + fmt(f.px(1)) + "\" y2=\"" +
           fmt(f.py(1)) + "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n";
    std::vector<std::string> names;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        std::string poly;
        for (const auto& p : curves[i].roc.points) poly += fmt(f.px(p.fpr)) + "," + fmt(f.py(p.tpr)) + " ";
        out += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" + palette(i) + "\" stroke-width=\"2\"/>\n";
        names.push_back(curves[i].name + " (AUC " + label_number(curves[i].roc.auc, 3) + ")");
    }
    out += legend(names);
    out += "</svg>\n";
    return out;
}

std::string cd_diagram_svg(const ranking::RankReport& report) {
    const std::size_t k = report.models.size();
    const double width = 640.0;
    const double left = 80.0;
    const double right = 80.0;
    const double axis_y = 60.0;
    const double hi = static_cast<double>(std::max<std::size_t>(k, 2));
    auto px = [&](double rank) { return left + (rank - 1.0) / (hi - 1.0) * (width - left - right); };

    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return report.average_ranks[a] < report.average_ranks[b]; });

    const double label_top = axis_y + 30.0 + 14.0 * static_cast<double>(report.cliques.size());
    const double height = label_top + 22.0 * static_cast<double>(k) + 20.0;
    std::string out = header(width, height);
    out += text(width / 2.0, 20.0, "average rank (lower is better), level " + label_number(report.level, 2), "middle");
    out += line(px(1.0), axis_y, px(hi), axis_y, "black", 1.5);
    for (std::size_t r = 1; r <= static_cast<std::size_t>(hi); ++r) {
        out += line(px(static_cast<double>(r)), axis_y - 5.0, px(static_cast<double>(r)), axis_y, "black");
        out += text(px(static_cast<double>(r)), axis_y - 9.0, std::to_string(r), "middle");
    }
    std::size_t bar = 0;
    for (const auto& clique : report.cliques) {
        if (clique.size() < 2) continue;
        double lo = hi;
        double up = 1.0;
        for (const auto& name : clique) {
            const auto it = std::find(report.models.begin(), report.models.end(), name);
            const double r = report.average_ranks[static_cast<std::size_t>(it - report.models.begin())];
            lo = std::min(lo, r);
            up = std::max(up, r);
        }
        const double y = axis_y + 18.0 + 14.0 * static_cast<double>(bar++);
        out += "<line class=\"clique\" x1=\"" + fmt(px(lo) - 4.0) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(px(up) + 4.0) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"black\" stroke-width=\"5\"/>\n";
    }
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t m = order[j];
        const double r = report.average_ranks[m];
        const double y = label_top + 22.0 * static_cast<double>(j);
        const bool left_side = j < (k + 1) / 2;
        const double tx = left_side ? px(1.0) - 8.0 : px(hi) + 8.0;
        out += "<polyline points=\"" + fmt(px(r)) + "," + fmt(axis_y) + " " + fmt(px(r)) + "," + fmt(y) + " " + fmt(tx) +
               "," + fmt(y) + "\" fill=\"none\" stroke=\"" + palette(m) + "\"/>\n";
        out += "<text class=\"model\" x=\"" + fmt(tx + (left_side ? -2.0 : 2.0)) + "\" y=\"" + fmt(y + 4.0) +
               "\" text-anchor=\"" + (left_side ? "end" : "start") + "\">" +
               xml_escape(report.models[m] + " (" + label_number(r, 2) + ")") + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

std::string contour_svg(const ScoreGrid& grid, const std::vector<std::pair<double, double>>& normals,
                        const std::vector<std::pair<double, double>>& anomalies, const std::string& title) {
    const double size = 420.0;
    const double margin = 40.0;
    const double cell_w = (size - 2.0 * margin) / static_cast<double>(grid.nx);
    const double cell_h = (size - 2.0 * margin) / static_cast<double>(grid.ny);
    auto px = [&](double x) { return margin + (x - grid.x_min) / (grid.x_max - grid.x_min) * (size - 2.0 * margin); };
    auto py = [&](double y) {
        return size - margin - (y - grid.y_min) / (grid.y_max - grid.y_min) * (size - 2.0 * margin);
    };
    // Log-scaled color so the low-score region near the normals stays visible.
    double lo = 0.0;
    double up = 0.0;
    if (!grid.scores.empty()) {
        lo = *std::min_element(grid.scores.begin(), grid.scores.end());
        up = *std::max_element(grid.scores.begin(), grid.scores.end());
    }
    auto shade = [&](double s) {
        const double t = up > lo ? std::log1p(s - lo) / std::log1p(up - lo) : 0.0;
        const int v = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        char buf[16];
        std::snprintf(buf, sizeof buf, "#ff%02x%02x", v, v);
        return std::string(buf);
    };
    std::string out = header(size, size);
    out += text(size / 2.0, 24.0, title, "middle");
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            out += "<rect x=\"" + fmt(margin + cell_w * static_cast<double>(i)) + "\" y=\"" +
                   fmt(size - margin - cell_h * static_cast<double>(j + 1)) + "\" width=\"" + fmt(cell_w + 0.3) +
                   "\" height=\"" + fmt(cell_h + 0.3) + "\" fill=\"" + shade(grid.scores[j * grid.nx + i]) + "\"/>\n";
        }
    }
    for (const auto& [x, y] : normals) {
        out += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"1.5\" fill=\"#1f77b4\"/>\n";
    }
    for (const auto& [x, y] : anomalies) {
        out += "<circle cx=\"" + fmt(px(x)) + "\" cy=\"" + fmt(py(y)) + "\" r=\"1.8\" fill=\"black\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace robustad::report
