#include "fdmlens/svg.hpp"

#include <algorithm>
#include <cmath>

#include "fdmlens/errors.hpp"
#include "fdmlens/text.hpp"

namespace fdmlens {

namespace {

constexpr const char* kBlue = "#2a6fbb";
constexpr const char* kRed = "#d64545";
constexpr const char* kText = "#222222";
constexpr const char* kMuted = "#777777";
constexpr const char* kGrid = "#dddddd";
constexpr const char* kFont = "DejaVu Sans, Helvetica, sans-serif";

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

std::string px(double v) { return format_fixed(v, 2); }

std::string signed_value(double v) {
    std::string s = format_shortest(v);
    if (v >= 0.0 && !s.empty() && s[0] != '+') s.insert(s.begin(), '+');
    return s;
}

struct Rgb {
    int r = 0, g = 0, b = 0;
};

Rgb lerp_rgb(Rgb a, Rgb b, double t) {
    auto mix = [&](int x, int y) {
        return static_cast<int>(std::lround(x + (y - x) * t));
    };
    return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

std::string hex_color(Rgb c) {
    static const char* digits = "0123456789abcdef";
    std::string s = "#......";
    const int comps[3] = {c.r, c.g, c.b};
    for (int i = 0; i < 3; ++i) {
        const int v = std::clamp(comps[i], 0, 255);
        s[1 + 2 * i] = digits[v / 16];
        s[2 + 2 * i] = digits[v % 16];
    }
    return s;
}

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlueRgb{42, 111, 187};
constexpr Rgb kRedRgb{214, 69, 69};

// Diverging scale anchored at 0: positive -> pos hue, negative -> neg hue,
// |v|/maxabs drives saturation.
std::string diverging_color(double v, double maxabs, Rgb pos, Rgb neg) {
    const double t = std::clamp(std::abs(v) / maxabs, 0.0, 1.0);
    return hex_color(lerp_rgb(kWhite, v >= 0.0 ? pos : neg, t));
}

std::string scalar_color(double t) {
    return hex_color(lerp_rgb(kBlueRgb, kRedRgb, std::clamp(t, 0.0, 1.0)));
}

// Maps a data interval onto a pixel interval.
struct Scale {
    double d0 = 0.0, d1 = 1.0;
    double p0 = 0.0, p1 = 1.0;
    double operator()(double v) const { return p0 + (v - d0) / (d1 - d0) * (p1 - p0); }
};

// Pads a collapsed extent by half a unit each side.
bool pad_if_degenerate(double& lo, double& hi) {
    if (lo < hi) return false;
    lo -= 0.5;
    hi += 0.5;
    return true;
}

SvgNode& svg_root(SvgDocument& doc, double width, double height) {
    doc.width = width;
    doc.height = height;
    doc.root.tag = "svg";
    doc.root.set("xmlns", "http://www.w3.org/2000/svg");
    doc.root.set("width", px(width));
    doc.root.set("height", px(height));
    doc.root.set("viewBox", "0 0 " + px(width) + " " + px(height));
    doc.root.set("font-family", kFont);
    SvgNode& bg = doc.root.add("rect");
    bg.set("width", px(width)).set("height", px(height)).set("fill", "#ffffff");
    return doc.root;
}

void finish(SvgDocument& doc) {
    if (doc.degenerate_extent) {
        doc.root.attrs.emplace_back("data-degenerate-extent", "true");
    }
}

SvgNode& text_at(SvgNode& parent, double x, double y, const std::string& content,
                 const std::string& fill = kText, int size = 12,
                 const std::string& anchor = "start") {
    SvgNode& t = parent.add("text");
    t.set("x", px(x)).set("y", px(y)).set("font-size", std::to_string(size));
    t.set("fill", fill);
    if (anchor != "start") t.set("text-anchor", anchor);
    t.text = xml_escape(content);
    return t;
}

SvgNode& line_at(SvgNode& parent, double x1, double y1, double x2, double y2,
                 const std::string& stroke, double width = 1.0,
                 const std::string& dash = "") {
    SvgNode& l = parent.add("line");
    l.set("x1", px(x1)).set("y1", px(y1)).set("x2", px(x2)).set("y2", px(y2));
    l.set("stroke", stroke).set("stroke-width", px(width));
    if (!dash.empty()) l.set("stroke-dasharray", dash);
    return l;
}

SvgNode& rect_at(SvgNode& parent, double x, double y, double w, double h,
                 const std::string& fill) {
    SvgNode& r = parent.add("rect");
    r.set("x", px(x)).set("y", px(y)).set("width", px(w)).set("height", px(h));
    r.set("fill", fill);
    return r;
}

void x_axis(SvgNode& parent, const Ticks& ticks, const Scale& sx, double y_top,
            double y_bottom, bool gridlines) {
    for (double v : ticks.values) {
        const double x = sx(v);
        if (gridlines) line_at(parent, x, y_top, x, y_bottom, kGrid, 1.0);
        line_at(parent, x, y_bottom, x, y_bottom + 4, kMuted, 1.0);
        text_at(parent, x, y_bottom + 17, format_fixed(v, ticks.decimals), kMuted, 11,
                "middle");
    }
    line_at(parent, sx.p0, y_bottom, sx.p1, y_bottom, kMuted, 1.0);
}

void y_axis(SvgNode& parent, const Ticks& ticks, const Scale& sy, double x_left,
            double x_right, bool gridlines) {
    for (double v : ticks.values) {
        const double y = sy(v);
        if (gridlines) line_at(parent, x_left, y, x_right, y, kGrid, 1.0);
        line_at(parent, x_left - 4, y, x_left, y, kMuted, 1.0);
        text_at(parent, x_left - 7, y + 4, format_fixed(v, ticks.decimals), kMuted, 11,
                "end");
    }
    line_at(parent, x_left, sy.p0, x_left, sy.p1, kMuted, 1.0);
}

void waterfall_colors(Palette palette, std::string& positive, std::string& negative) {
    if (palette == Palette::paper) {
        positive = kBlue;
        negative = kRed;
    } else {
        positive = kRed;
        negative = kBlue;
    }
}

} // namespace

SvgNode& SvgNode::set(const std::string& key, std::string value) {
    attrs.emplace_back(key, std::move(value));
    return *this;
}

SvgNode& SvgNode::add(const std::string& child_tag) {
    children.emplace_back();
    children.back().tag = child_tag;
    return children.back();
}

namespace {

void write_node(const SvgNode& node, std::string& out, int depth) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += '<';
    out += node.tag;
    for (const auto& [k, v] : node.attrs) {
        out += ' ';
        out += k;
        out += "=\"";
        out += xml_escape(v);
        out += '"';
    }
    if (node.children.empty() && node.text.empty()) {
        out += "/>\n";
        return;
    }
    out += '>';
    if (!node.text.empty()) {
        out += node.text;  // pre-escaped
        out += "</";
        out += node.tag;
        out += ">\n";
        return;
    }
    out += '\n';
    for (const auto& c : node.children) write_node(c, out, depth + 1);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += "</";
    out += node.tag;
    out += ">\n";
}

} // namespace

std::string SvgDocument::to_xml() const {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_node(root, out, 0);
    return out;
}

Ticks nice_ticks(double lo, double hi, int target) {
    if (!(lo < hi)) throw InvariantError("nice_ticks requires lo < hi");
    if (target < 2) target = 2;
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step;
    if (norm <= 1.0) {
        step = mag;
    } else if (norm <= 2.0) {
        step = 2.0 * mag;
    } else if (norm <= 5.0) {
        step = 5.0 * mag;
    } else {
        step = 10.0 * mag;
    }

    Ticks ticks;
    ticks.step = step;
    const double e = std::floor(std::log10(step) + 1e-9);
    ticks.decimals = e < 0 ? static_cast<int>(-e) : 0;
    const auto k0 = static_cast<long long>(std::floor(lo / step + 1e-9));
    const auto k1 = static_cast<long long>(std::ceil(hi / step - 1e-9));
    for (long long k = k0; k <= k1; ++k) {
        ticks.values.push_back(static_cast<double>(k) * step);
    }
    return ticks;
}

SvgDocument render_svg(const WaterfallSpec& spec, Palette palette) {
    constexpr double kWidth = 720;
    constexpr double kRowHeight = 48;
    constexpr double kTop = 56;
    constexpr double kBottom = 64;
    const double height = kTop + kRowHeight * static_cast<double>(spec.entries.size()) + kBottom;

    SvgDocument doc;
    SvgNode& root = svg_root(doc, kWidth, height);

    double lo = spec.base_value;
    double hi = spec.base_value;
    for (const auto& entry : spec.entries) {
        lo = std::min({lo, entry.start, entry.end});
        hi = std::max({hi, entry.start, entry.end});
    }
    doc.degenerate_extent = pad_if_degenerate(lo, hi);
    const Ticks ticks = nice_ticks(lo, hi);
    const double plot_bottom = height - kBottom;
    const Scale sx{ticks.values.front(), ticks.values.back(), 180, kWidth - 30};

    text_at(root, 20, 26, "Waterfall - sample " + std::to_string(spec.sample_index), kText,
            14);
    x_axis(root, ticks, sx, kTop, plot_bottom, true);
    text_at(root, (sx.p0 + sx.p1) / 2, height - 14, "prediction (MPa)", kMuted, 12,
            "middle");

    std::string positive, negative;
    waterfall_colors(palette, positive, negative);

    line_at(root, sx(spec.base_value), kTop - 8, sx(spec.base_value), plot_bottom, kMuted,
            1.0, "4 3");
    text_at(root, sx(spec.base_value), kTop - 14, "base " + format_shortest(spec.base_value),
            kMuted, 11, "middle");

    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        const auto& entry = spec.entries[i];
        const double y = kTop + kRowHeight * static_cast<double>(i) + 10;
        const double bar_h = kRowHeight - 20;
        const double x_start = sx(entry.start);
        const double x_end = sx(entry.end);
        const std::string color = entry.contribution >= 0.0 ? positive : negative;

        if (i > 0) {
            const double y_prev = kTop + kRowHeight * static_cast<double>(i - 1) + 10;
            line_at(root, x_start, y_prev + bar_h, x_start, y, kGrid, 1.0);
        }
        rect_at(root, std::min(x_start, x_end), y, std::abs(x_end - x_start), bar_h, color);
        text_at(root, 172, y + bar_h / 2 + 4, entry.name, kText, 12, "end");
        const bool rightward = x_end >= x_start;
        text_at(root, rightward ? x_end + 6 : x_end - 6, y + bar_h / 2 + 4,
                signed_value(entry.contribution), color, 11, rightward ? "start" : "end");
    }

    const double x_final = sx(spec.final_prediction);
    line_at(root, x_final, kTop - 8, x_final, plot_bottom, kText, 1.0, "2 2");
    text_at(root, x_final, plot_bottom + 30, "f(x) " + format_shortest(spec.final_prediction),
            kText, 11, "middle");

    finish(doc);
    return doc;
}

SvgDocument render_svg(const BeeswarmSpec& spec, Palette) {
    constexpr double kWidth = 720;
    constexpr double kLane = 70;
    constexpr double kTop = 52;
    constexpr double kBottom = 56;
    const double height = kTop + kLane * static_cast<double>(spec.rows.size()) + kBottom;

    SvgDocument doc;
    SvgNode& root = svg_root(doc, kWidth, height);

    double lo = 0.0;
    double hi = 0.0;
    bool first = true;
    for (const auto& row : spec.rows) {
        for (const auto& pt : row.points) {
            if (first) {
                lo = hi = pt.x;
                first = false;
            } else {
                lo = std::min(lo, pt.x);
                hi = std::max(hi, pt.x);
            }
        }
    }
    doc.degenerate_extent = pad_if_degenerate(lo, hi);
    const Ticks ticks = nice_ticks(lo, hi);
    const double plot_bottom = height - kBottom;
    const Scale sx{ticks.values.front(), ticks.values.back(), 170, kWidth - 70};

    text_at(root, 20, 26, "Beeswarm - features by mean |SHAP|", kText, 14);
    x_axis(root, ticks, sx, kTop, plot_bottom, true);
    text_at(root, (sx.p0 + sx.p1) / 2, height - 14, "SHAP value (MPa)", kMuted, 12,
            "middle");

    if (lo < 0.0 && hi > 0.0) line_at(root, sx(0), kTop, sx(0), plot_bottom, kMuted, 1.0);

    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        const auto& row = spec.rows[r];
        const double cy = kTop + kLane * (static_cast<double>(r) + 0.5);
        line_at(root, sx.p0, cy, sx.p1, cy, kGrid, 1.0, "2 3");
        text_at(root, 162, cy + 4, row.name, kText, 12, "end");
        for (const auto& pt : row.points) {
            const double dy = std::clamp(pt.offset * 5.0, -kLane / 2 + 6, kLane / 2 - 6);
            SvgNode& c = root.add("circle");
            c.set("cx", px(sx(pt.x))).set("cy", px(cy + dy)).set("r", "3.5");
            c.set("fill", scalar_color(pt.color)).set("fill-opacity", "0.9");
        }
    }

    SvgNode& defs = root.add("defs");
    SvgNode& grad = defs.add("linearGradient");
    grad.set("id", "bsw").set("x1", "0").set("y1", "1").set("x2", "0").set("y2", "0");
    grad.add("stop").set("offset", "0").set("stop-color", scalar_color(0.0));
    grad.add("stop").set("offset", "1").set("stop-color", scalar_color(1.0));
    const double legend_x = kWidth - 48;
    rect_at(root, legend_x, kTop, 12, plot_bottom - kTop, "url(#bsw)");
    text_at(root, legend_x + 18, kTop + 10, "high", kMuted, 10);
    text_at(root, legend_x + 18, plot_bottom, "low", kMuted, 10);

    finish(doc);
    return doc;
}

SvgDocument render_svg(const HeatmapSpec& spec, Palette) {
    constexpr double kLeft = 150;
    constexpr double kRight = 100;
    constexpr double kTop = 56;
    constexpr double kBottom = 48;
    constexpr double kRow = 38;
    constexpr double kWidth = 720;
    const std::size_t n = spec.matrix.size();
    const double height = kTop + kRow * kFeatureCount + kBottom;
    const double cell_w = (kWidth - kLeft - kRight) / static_cast<double>(n);

    SvgDocument doc;
    SvgNode& root = svg_root(doc, kWidth, height);

    double maxabs = 0.0;
    for (const auto& row : spec.matrix) {
        for (double v : row) maxabs = std::max(maxabs, std::abs(v));
    }
    if (maxabs == 0.0) {
        doc.degenerate_extent = true;
        maxabs = 0.5;
    }

    text_at(root, 20, 26,
            spec.ordering == HeatmapOrdering::by_prediction
                ? "Heatmap - samples by prediction (desc)"
                : "Heatmap - samples in corpus order",
            kText, 14);

    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const double y = kTop + kRow * static_cast<double>(j);
        text_at(root, kLeft - 8, y + kRow / 2 + 4, spec.feature_names[j], kText, 12, "end");
        for (std::size_t i = 0; i < n; ++i) {
            rect_at(root, kLeft + cell_w * static_cast<double>(i), y, cell_w, kRow,
                    diverging_color(spec.matrix[i][j], maxabs, kRedRgb, kBlueRgb));
        }
    }

    const double grid_bottom = kTop + kRow * kFeatureCount;
    const std::size_t label_stride = n > 10 ? (n + 9) / 10 : 1;
    for (std::size_t i = 0; i < n; i += label_stride) {
        const double x = kLeft + cell_w * (static_cast<double>(i) + 0.5);
        line_at(root, x, grid_bottom, x, grid_bottom + 4, kMuted, 1.0);
        text_at(root, x, grid_bottom + 16, std::to_string(spec.sample_order[i]), kMuted, 10,
                "middle");
    }
    text_at(root, kLeft + (kWidth - kLeft - kRight) / 2, height - 12, "sample", kMuted, 12,
            "middle");

    SvgNode& defs = root.add("defs");
    SvgNode& grad = defs.add("linearGradient");
    grad.set("id", "hm").set("x1", "0").set("y1", "1").set("x2", "0").set("y2", "0");
    grad.add("stop").set("offset", "0").set("stop-color", hex_color(kBlueRgb));
    grad.add("stop").set("offset", "0.5").set("stop-color", hex_color(kWhite));
    grad.add("stop").set("offset", "1").set("stop-color", hex_color(kRedRgb));
    const double legend_x = kWidth - kRight + 24;
    rect_at(root, legend_x, kTop, 12, grid_bottom - kTop, "url(#hm)");
    text_at(root, legend_x + 16, kTop + 10, signed_value(maxabs), kMuted, 10);
    text_at(root, legend_x + 16, (kTop + grid_bottom) / 2 + 4, "0", kMuted, 10);
    text_at(root, legend_x + 16, grid_bottom, signed_value(-maxabs), kMuted, 10);

    finish(doc);
    return doc;
}

namespace {

SvgDocument render_pdp(const PdpCurve& curve, const std::array<double, 2>* scatter,
                       std::size_t scatter_count, const FeatureSchema& schema,
                       const char* title_prefix) {
    constexpr double kWidth = 720;
    constexpr double kHeight = 440;
    constexpr double kLeft = 84;
    constexpr double kRight = 32;
    constexpr double kTop = 52;
    constexpr double kBottom = 64;

    SvgDocument doc;
    SvgNode& root = svg_root(doc, kWidth, kHeight);

    double xlo = curve.grid.front();
    double xhi = curve.grid.back();
    for (std::size_t i = 0; i < scatter_count; ++i) {
        xlo = std::min(xlo, scatter[i][0]);
        xhi = std::max(xhi, scatter[i][0]);
    }
    double ylo = curve.reference;
    double yhi = curve.reference;
    for (double v : curve.values) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    for (std::size_t i = 0; i < scatter_count; ++i) {
        ylo = std::min(ylo, scatter[i][1]);
        yhi = std::max(yhi, scatter[i][1]);
    }
    const bool deg_x = pad_if_degenerate(xlo, xhi);
    const bool deg_y = pad_if_degenerate(ylo, yhi);
    doc.degenerate_extent = deg_x || deg_y;

    const Ticks tx = nice_ticks(xlo, xhi, 6);
    const Ticks ty = nice_ticks(ylo, yhi, 5);
    const Scale sx{tx.values.front(), tx.values.back(), kLeft, kWidth - kRight};
    const Scale sy{ty.values.front(), ty.values.back(), kHeight - kBottom, kTop};

    const std::size_t j = curve.feature;
    const std::string mode_name = curve.mode == PdpMode::average ? "average" : "at_means";
    text_at(root, 20, 26,
            std::string(title_prefix) + " (" + mode_name + ") - " + schema.names[j], kText,
            14);

    x_axis(root, tx, sx, kTop, kHeight - kBottom, true);
    y_axis(root, ty, sy, kLeft, kWidth - kRight, true);
    text_at(root, (sx.p0 + sx.p1) / 2, kHeight - 16,
            schema.names[j] + " (" + schema.units[j] + ")", kMuted, 12, "middle");
    {
        SvgNode& t = text_at(root, 0, 0, "prediction (MPa)", kMuted, 12, "middle");
        t.set("transform", "translate(20 " + px((sy.p0 + sy.p1) / 2) + ") rotate(-90)");
    }

    line_at(root, sx.p0, sy(curve.reference), sx.p1, sy(curve.reference), kMuted, 1.0,
            "5 4");
    text_at(root, sx.p1, sy(curve.reference) - 6,
            "reference " + format_shortest(curve.reference), kMuted, 10, "end");

    for (std::size_t i = 0; i < scatter_count; ++i) {
        SvgNode& c = root.add("circle");
        c.set("cx", px(sx(scatter[i][0]))).set("cy", px(sy(scatter[i][1]))).set("r", "3");
        c.set("fill", kRed).set("fill-opacity", "0.8");
    }

    std::string pts;
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        if (k > 0) pts += ' ';
        pts += px(sx(curve.grid[k]));
        pts += ',';
        pts += px(sy(curve.values[k]));
    }
    SvgNode& poly = root.add("polyline");
    poly.set("points", pts).set("fill", "none").set("stroke", kBlue);
    poly.set("stroke-width", "2");
    for (std::size_t k = 0; k < curve.grid.size(); ++k) {
        SvgNode& c = root.add("circle");
        c.set("cx", px(sx(curve.grid[k]))).set("cy", px(sy(curve.values[k])));
        c.set("r", "2.5").set("fill", kBlue);
    }

    finish(doc);
    return doc;
}

} // namespace

SvgDocument render_svg(const PdpCurve& curve, const FeatureSchema& schema, Palette) {
    return render_pdp(curve, nullptr, 0, schema, "PDP");
}

SvgDocument render_svg(const PdpOverlay& overlay, const FeatureSchema& schema, Palette) {
    return render_pdp(overlay.curve, overlay.scatter.data(), overlay.scatter.size(), schema,
                      "PDP overlay");
}

} // namespace fdmlens
