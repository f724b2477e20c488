#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "robustad/metrics.hpp"
#include "robustad/ranking.hpp"
#include "robustad/results.hpp"

namespace robustad::report {

/// Fixed palette indexed by model order.
const std::string& palette(std::size_t index);

/// XML text escaping for attribute values and text nodes.
std::string xml_escape(const std::string& text);

/// Mean F1 against alpha for every model of `dataset_id`, with a shaded
/// +-1 std band. x spans [0, max alpha], y is clipped to [0, 1].
std::string f1_curve_svg(const std::vector<AggregateRow>& rows, const std::string& dataset_id);

struct NamedRoc {
    std::string name;
    protocol::RocCurve roc;
};

std::string roc_svg(const std::vector<NamedRoc>& curves, const std::string& title);

/// Rank axis from 1 to #models, each model labelled at its average rank, and
/// one thick bar per clique of two or more models.
std::string cd_diagram_svg(const ranking::RankReport& report);

/// Heatmap of a score grid (row-major, `ny` rows from y_min up) with the
/// training points overlaid.
struct ScoreGrid {
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    std::size_t nx = 0, ny = 0;
    std::vector<double> scores;
};

std::string contour_svg(const ScoreGrid& grid, const std::vector<std::pair<double, double>>& normals,
                        const std::vector<std::pair<double, double>>& anomalies, const std::string& title);

}  // namespace robustad::report
