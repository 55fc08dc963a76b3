#include "safeset/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "safeset/error.hpp"

namespace safeset {

namespace {

constexpr double kPlotSize = 400.0;
constexpr double kMargin = 70.0;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

/// A plotted or sliced dimension: position in the CellKey plus how many cells it spans.
struct Axis {
    std::string name;
    std::size_t key_pos = 0;
    std::int64_t cells = 0;
    bool continuous = true;
    std::size_t index = 0;
    std::string low_label;
    std::string high_label;
};

Axis find_axis(const OssSpec& spec, const std::string& name) {
    for (std::size_t i = 0; i < spec.cont_dims.size(); ++i) {
        if (spec.cont_dims[i].name == name) {
            return Axis{name, i, spec.cell_count(i), true, i, num(spec.cont_dims[i].lower),
                        num(spec.cont_dims[i].upper)};
        }
    }
    for (std::size_t j = 0; j < spec.disc_dims.size(); ++j) {
        const auto& d = spec.disc_dims[j];
        if (d.name == name) {
            auto values = d.values;
            std::sort(values.begin(), values.end());
            return Axis{name,  spec.cont_dims.size() + j, static_cast<std::int64_t>(values.size()), false, j,
                        std::to_string(values.front()), std::to_string(values.back())};
        }
    }
    throw SpecError("unknown dimension '" + name + "'");
}

/// Cell coordinate along an axis, for the plot layout: the lattice index or the mode rank.
std::int64_t axis_cell(const OssSpec& spec, const Axis& axis, const CellKey& key) {
    return axis.continuous ? key[axis.key_pos] : spec.disc_dims[axis.index].rank(key[axis.key_pos]);
}

/// Red for p_hat = 1 through white to green for p_hat = 0.
std::string shade(double p) {
    const auto channel = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(0.2 + 0.8 * p), channel(0.7 - 0.5 * p),
                  channel(0.3 - 0.1 * p));
    return buf;
}

}  // namespace

std::map<std::string, double> parse_slice(const std::string& text) {
    std::map<std::string, double> slice;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        item = first == std::string::npos ? std::string{} : item.substr(first, last - first + 1);
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ParseError("slice entry '" + item + "' is not name=value");
        }
        const auto value = item.substr(eq + 1);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) {
            throw ParseError("slice value '" + value + "' is not a number");
        }
        if (!slice.emplace(item.substr(0, eq), x).second) {
            throw ParseError("slice fixes '" + item.substr(0, eq) + "' twice");
        }
    }
    return slice;
}

std::string plot_svg(const OssSpec& spec, const CentroidTable& table, const PlotRequest& request) {
    if (!(table.set.spec() == spec)) {
        throw GridMismatchError("plotted set was built over a different OSS");
    }
    const auto x = find_axis(spec, request.x_dim);
    const auto y = find_axis(spec, request.y_dim);
    if (x.key_pos == y.key_pos) {
        throw SpecError("plot needs two different dimensions");
    }

    // Cell coordinate each sliced dimension must match.
    std::vector<std::pair<std::size_t, std::int64_t>> fixed;
    for (const auto& name : spec.dim_names()) {
        if (name == x.name || name == y.name) {
            continue;
        }
        const auto it = request.slice.find(name);
        if (it == request.slice.end()) {
            throw SpecError("slice does not fix dimension '" + name + "'");
        }
        const auto axis = find_axis(spec, name);
        if (axis.continuous) {
            fixed.emplace_back(axis.key_pos, cell_index(spec, axis.index, it->second));
        } else {
            fixed.emplace_back(axis.key_pos, static_cast<std::int64_t>(std::llround(it->second)));
        }
    }
    for (const auto& [name, value] : request.slice) {
        find_axis(spec, name);
        if (name == x.name || name == y.name) {
            throw SpecError("slice fixes plotted dimension '" + name + "'");
        }
    }

    const double cw = kPlotSize / static_cast<double>(x.cells);
    const double ch = kPlotSize / static_cast<double>(y.cells);
    const double width = kPlotSize + 2 * kMargin;

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(width)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(width) << "\">\n"
        << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(width)
        << "\" fill=\"#ffffff\"/>\n"
        << "<g class=\"cells\">\n";
    for (const auto id : table.set.ids()) {
        const auto& key = table.set.cell(id);
        bool in_slice = true;
        for (const auto& [pos, value] : fixed) {
            in_slice = in_slice && key[pos] == value;
        }
        if (!in_slice) {
            continue;
        }
        const auto cx = axis_cell(spec, x, key);
        const auto cy = axis_cell(spec, y, key);
        const auto p = table.p_hat.find(id);
        svg << "<rect class=\"cell\" x=\"" << num(kMargin + cw * static_cast<double>(cx)) << "\" y=\""
            << num(kMargin + kPlotSize - ch * static_cast<double>(cy + 1)) << "\" width=\"" << num(cw)
            << "\" height=\"" << num(ch) << "\" fill=\""
            << (p == table.p_hat.end() ? std::string("#3b7dd8") : shade(p->second)) << "\"/>\n";
    }
    svg << "</g>\n"
        << "<rect class=\"frame\" x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
        << num(kPlotSize) << "\" height=\"" << num(kPlotSize) << "\" fill=\"none\" stroke=\"#000000\"/>\n";

    const auto text = [&](double tx, double ty, const std::string& anchor, const std::string& body,
                          const std::string& extra = "") {
        svg << "<text x=\"" << num(tx) << "\" y=\"" << num(ty) << "\" text-anchor=\"" << anchor
            << "\" font-family=\"sans-serif\" font-size=\"12\"" << extra << ">" << escape(body) << "</text>\n";
    };
    const double bottom = kMargin + kPlotSize;
    text(kMargin, bottom + 16, "start", x.low_label);
    text(bottom, bottom + 16, "end", x.high_label);
    text(kMargin + kPlotSize / 2, bottom + 40, "middle", x.name);
    text(kMargin - 6, bottom, "end", y.low_label);
    text(kMargin - 6, kMargin + 10, "end", y.high_label);
    const double ly = kMargin + kPlotSize / 2;
    text(kMargin - 40, ly, "middle", y.name, " transform=\"rotate(-90 " + num(kMargin - 40) + ' ' + num(ly) + ")\"");
    if (!request.slice.empty()) {
        std::string caption;
        for (const auto& [name, value] : request.slice) {
            caption += (caption.empty() ? "" : ", ") + name + " = " + num(value);
        }
        text(kMargin + kPlotSize / 2, kMargin - 20, "middle", caption);
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace safeset
