#include "evobench/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evobench/stats.hpp"

namespace evobench::plot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 72.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 48.0;
constexpr double kMarginBottom = 56.0;

const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors;
}

std::string num(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

double parse_cell(const csv::Table& table, std::size_t col, std::size_t row) {
    const std::string& cell = table.rows[row][col];
    try {
        std::size_t pos = 0;
        const double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("plot: non-numeric value '" + cell + "' in column '" +
                                    table.header[col] + "', row " + std::to_string(row + 1));
    }
}

void check_log(double v, const std::string& column, std::size_t row, const char* axis) {
    if (v <= 0.0) {
        throw std::invalid_argument(std::string("plot: non-positive value on log ") + axis +
                                    " axis in column '" + column + "', row " +
                                    std::to_string(row + 1));
    }
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double to_unit(double v) const {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double x = log ? std::log10(v) : v;
        if (b - a < 1e-300) return 0.5;
        return (x - a) / (b - a);
    }
    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int e0 = static_cast<int>(std::floor(std::log10(lo)));
            const int e1 = static_cast<int>(std::ceil(std::log10(hi)));
            for (int e = e0; e <= e1; ++e) out.push_back(std::pow(10.0, e));
        } else {
            const double span = hi - lo;
            const double raw = span / 6.0;
            const double mag = std::pow(10.0, std::floor(std::log10(raw > 0 ? raw : 1.0)));
            double step = mag;
            for (double m : {1.0, 2.0, 5.0, 10.0}) {
                if (mag * m >= raw) { step = mag * m; break; }
            }
            const double start = std::ceil(lo / step) * step;
            for (double t = start; t <= hi + step * 1e-9; t += step) out.push_back(t);
        }
        return out;
    }
};

void pad(Axis& axis) {
    if (axis.log) {
        if (axis.hi <= axis.lo) axis.hi = axis.lo * 10.0;
        return;
    }
    if (axis.hi <= axis.lo) {
        axis.lo -= 0.5;
        axis.hi += 0.5;
        return;
    }
    const double p = (axis.hi - axis.lo) * 0.05;
    axis.lo -= p;
    axis.hi += p;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

class Svg {
public:
    void open(const PlotSpec& spec) {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)kWidth
              << "\" height=\"" << (int)kHeight << "\" viewBox=\"0 0 " << (int)kWidth << " "
              << (int)kHeight << "\">\n";
        body_ << "<rect width=\"" << (int)kWidth << "\" height=\"" << (int)kHeight
              << "\" fill=\"white\"/>\n";
        if (!spec.title.empty()) {
            text(kWidth / 2, 26, escape_xml(spec.title), "middle", 16);
        }
        if (!spec.x_label.empty()) {
            text(kMarginLeft + plot_w() / 2, kHeight - 12, escape_xml(spec.x_label), "middle", 12);
        }
        if (!spec.y_label.empty()) {
            body_ << "<text x=\"18\" y=\"" << num(kMarginTop + plot_h() / 2)
                  << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\""
                  << " transform=\"rotate(-90 18 " << num(kMarginTop + plot_h() / 2) << ")\">"
                  << escape_xml(spec.y_label) << "</text>\n";
        }
        body_ << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(kMarginTop) << "\" width=\""
              << num(plot_w()) << "\" height=\"" << num(plot_h())
              << "\" fill=\"none\" stroke=\"#444\"/>\n";
    }

    static double plot_w() { return kWidth - kMarginLeft - kMarginRight; }
    static double plot_h() { return kHeight - kMarginTop - kMarginBottom; }

    double px(const Axis& ax, double v) const { return kMarginLeft + ax.to_unit(v) * plot_w(); }
    double py(const Axis& ay, double v) const { return kMarginTop + (1.0 - ay.to_unit(v)) * plot_h(); }

    void axes(const Axis& ax, const Axis& ay, bool draw_x = true) {
        if (draw_x) for (double t : ax.ticks()) {
            if (t < ax.lo - 1e-12 || t > ax.hi + 1e-12) continue;
            const double x = px(ax, t);
            line(x, kMarginTop + plot_h(), x, kMarginTop + plot_h() + 5, "#444");
            line(x, kMarginTop, x, kMarginTop + plot_h(), "#eee");
            text(x, kMarginTop + plot_h() + 18, tick_label(t), "middle", 10);
        }
        for (double t : ay.ticks()) {
            if (t < ay.lo - 1e-12 || t > ay.hi + 1e-12) continue;
            const double y = py(ay, t);
            line(kMarginLeft - 5, y, kMarginLeft, y, "#444");
            line(kMarginLeft, y, kMarginLeft + plot_w(), y, "#eee");
            body_ << "<text x=\"" << num(kMarginLeft - 8) << "\" y=\"" << num(y + 3)
                  << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">"
                  << tick_label(t) << "</text>\n";
        }
    }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke) {
        body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
              << "\" y2=\"" << num(y2) << "\" stroke=\"" << stroke << "\"/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill) {
        body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
              << "\" fill=\"" << fill << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& stroke) {
        body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
              << "\" height=\"" << num(h) << "\" fill=\"none\" stroke=\"" << stroke << "\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
        body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) body_ << ' ';
            body_ << num(pts[i].first) << ',' << num(pts[i].second);
        }
        body_ << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const char* anchor, int size) {
        body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y)
              << "\" font-family=\"sans-serif\" font-size=\"" << size << "\" text-anchor=\""
              << anchor << "\">" << s << "</text>\n";
    }
    void legend(const std::vector<std::string>& names) {
        double y = kMarginTop + 14;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::string& color = palette()[i % palette().size()];
            line(kMarginLeft + plot_w() - 110, y - 4, kMarginLeft + plot_w() - 92, y - 4, color);
            text(kMarginLeft + plot_w() - 88, y, escape_xml(names[i]), "start", 11);
            y += 16;
        }
    }
    std::string close() {
        body_ << "</svg>\n";
        return body_.str();
    }

private:
    std::ostringstream body_;
};

} // namespace

PlotKind plot_kind_from_string(const std::string& s) {
    if (s == "line") return PlotKind::line;
    if (s == "scatter") return PlotKind::scatter;
    if (s == "box") return PlotKind::box;
    throw std::invalid_argument("plot: unknown kind '" + s + "' (expected line, scatter, or box)");
}

std::string emit_plot(const csv::Table& table, const PlotSpec& spec) {
    if (spec.y_columns.empty()) throw std::invalid_argument("plot: no y columns given");
    if (table.rows.empty()) throw std::invalid_argument("plot: table has no data rows");

    std::vector<std::size_t> y_idx;
    for (const auto& name : spec.y_columns) y_idx.push_back(table.column(name));

    std::vector<std::vector<double>> ys(y_idx.size());
    for (std::size_t s = 0; s < y_idx.size(); ++s) {
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const double v = parse_cell(table, y_idx[s], r);
            if (spec.log_y) check_log(v, spec.y_columns[s], r, "y");
            ys[s].push_back(v);
        }
    }

    Axis ay;
    ay.log = spec.log_y;
    ay.lo = ys[0][0];
    ay.hi = ys[0][0];
    for (const auto& series : ys) {
        for (double v : series) {
            ay.lo = std::min(ay.lo, v);
            ay.hi = std::max(ay.hi, v);
        }
    }
    pad(ay);

    Svg svg;
    svg.open(spec);

    if (spec.kind == PlotKind::box) {
        // One box per y column, spaced evenly on a categorical x axis.
        Axis ax{0.0, static_cast<double>(ys.size()), false};
        svg.axes(ax, ay, /*draw_x=*/false); // x axis is categorical; labels drawn per box
        for (std::size_t s = 0; s < ys.size(); ++s) {
            const stats::Summary sum = stats::descriptive_summary(ys[s]);
            const double cx = svg.px(ax, static_cast<double>(s) + 0.5);
            const double half = Svg::plot_w() / (ys.size() * 4.0);
            const double yq1 = svg.py(ay, sum.q1);
            const double yq3 = svg.py(ay, sum.q3);
            const std::string& color = palette()[s % palette().size()];
            svg.rect(cx - half, yq3, 2 * half, yq1 - yq3, color);
            svg.line(cx - half, svg.py(ay, sum.median), cx + half, svg.py(ay, sum.median), color);
            svg.line(cx, yq3, cx, svg.py(ay, sum.max), color);
            svg.line(cx, yq1, cx, svg.py(ay, sum.min), color);
            svg.line(cx - half / 2, svg.py(ay, sum.max), cx + half / 2, svg.py(ay, sum.max), color);
            svg.line(cx - half / 2, svg.py(ay, sum.min), cx + half / 2, svg.py(ay, sum.min), color);
            svg.text(cx, kMarginTop + Svg::plot_h() + 18, escape_xml(spec.y_columns[s]), "middle", 10);
        }
        return svg.close();
    }

    if (spec.x_column.empty()) throw std::invalid_argument("plot: x column required for line/scatter");
    const std::size_t x_idx = table.column(spec.x_column);
    std::vector<double> xs;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const double v = parse_cell(table, x_idx, r);
        if (spec.log_x) check_log(v, spec.x_column, r, "x");
        xs.push_back(v);
    }
    Axis ax;
    ax.log = spec.log_x;
    ax.lo = *std::min_element(xs.begin(), xs.end());
    ax.hi = *std::max_element(xs.begin(), xs.end());
    pad(ax);

    svg.axes(ax, ay);
    for (std::size_t s = 0; s < ys.size(); ++s) {
        const std::string& color = palette()[s % palette().size()];
        // Sort by x for line plots so row order cannot tangle the path.
        std::vector<std::pair<double, double>> pts;
        for (std::size_t r = 0; r < xs.size(); ++r) pts.push_back({xs[r], ys[s][r]});
        if (spec.kind == PlotKind::line) {
            std::stable_sort(pts.begin(), pts.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        std::vector<std::pair<double, double>> device;
        for (const auto& [x, y] : pts) device.push_back({svg.px(ax, x), svg.py(ay, y)});
        if (spec.kind == PlotKind::line) {
            svg.polyline(device, color);
        }
        for (const auto& [dx, dy] : device) svg.circle(dx, dy, 2.5, color);
    }
    if (ys.size() > 1) svg.legend(spec.y_columns);
    return svg.close();
}

} // namespace evobench::plot
