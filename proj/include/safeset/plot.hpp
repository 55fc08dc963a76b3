#pragma once

#include <map>
#include <string>

#include "safeset/io.hpp"
#include "safeset/oss.hpp"

namespace safeset {

struct PlotRequest {
    std::string x_dim;
    std::string y_dim;
    /// Values for every dimension not plotted. A centroid is drawn when it
    /// sits in the same cell (or mode) as the slice value on each of them.
    std::map<std::string, double> slice;
};

/// Parses `name=value,name=value`. Throws ParseError on malformed input.
std::map<std::string, double> parse_slice(const std::string& text);

/// SVG heatmap of one two-dimensional slice of a centroid set: one rectangle
/// per lattice cell in the slice, shaded by p_hat when the table carries it.
/// The axes span the whole grid, so an empty set yields just the frame.
/// Throws SpecError for unknown or repeated dims or an incomplete slice.
std::string plot_svg(const OssSpec& spec, const CentroidTable& table, const PlotRequest& request);

}  // namespace safeset
