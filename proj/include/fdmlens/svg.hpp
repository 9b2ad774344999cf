#ifndef FDMLENS_SVG_HPP
#define FDMLENS_SVG_HPP

#include <string>
#include <utility>
#include <vector>

#include "fdmlens/dataset.hpp"
#include "fdmlens/pdp.hpp"
#include "fdmlens/plots.hpp"

namespace fdmlens {

/// Figure color conventions. `paper` follows each figure's own caption
/// (waterfall: positive blue / negative red; heatmap: positive red / negative
/// blue); `unified` uses positive red / negative blue everywhere.
enum class Palette { paper, unified };

struct SvgNode {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<SvgNode> children;
    std::string text;

    SvgNode& set(const std::string& key, std::string value);
    SvgNode& add(const std::string& child_tag);
};

/// Deterministic, self-contained SVG 1.1 document: no timestamps, no
/// randomness, fixed attribute order, fixed-point coordinates. Identical
/// input renders to identical bytes.
struct SvgDocument {
    double width = 0.0;
    double height = 0.0;
    bool degenerate_extent = false;  // a data extent collapsed; unit padding used
    SvgNode root;

    std::string to_xml() const;
};

struct Ticks {
    double step = 1.0;
    int decimals = 0;
    std::vector<double> values;  // cover [lo, hi]: first <= lo, last >= hi
};

/// Round-number ticks ({1,2,5}x10^k step) covering [lo, hi]. Requires lo < hi.
Ticks nice_ticks(double lo, double hi, int target = 5);

SvgDocument render_svg(const WaterfallSpec& spec, Palette palette = Palette::paper);
SvgDocument render_svg(const BeeswarmSpec& spec, Palette palette = Palette::paper);
SvgDocument render_svg(const HeatmapSpec& spec, Palette palette = Palette::paper);
SvgDocument render_svg(const PdpCurve& curve, const FeatureSchema& schema,
                       Palette palette = Palette::paper);
SvgDocument render_svg(const PdpOverlay& overlay, const FeatureSchema& schema,
                       Palette palette = Palette::paper);

} // namespace fdmlens

#endif
