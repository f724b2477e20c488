#include "robustad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "robustad/error.hpp"

namespace robustad::protocol {

namespace {

void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw DomainError("scores and labels differ in length");
    for (double s : scores) {
        if (!std::isfinite(s)) throw DomainError("non-finite score");
    }
}

// Indices sorted by ascending score.
std::vector<std::size_t> ascending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    return order;
}

}  // namespace

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    if (tp == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

Metrics compute_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold) {
    if (scores.size() != labels.size()) throw DomainError("scores and labels differ in length");
    Metrics m;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        const bool actual = labels[i] != 0;
        if (predicted && actual) ++m.tp;
        else if (predicted) ++m.fp;
        else if (actual) ++m.fn;
        else ++m.tn;
    }
    m.precision = (m.tp + m.fp) == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    m.recall = (m.tp + m.fn) == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1 = f1_from_counts(m.tp, m.fp, m.fn);
    return m;
}

ThresholdChoice estimate_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_inputs(scores, labels);
    const std::size_t positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                                                         [](auto l) { return l != 0; }));
    if (positives == 0) throw ThresholdError("threshold estimation needs at least one attack sample");
    const std::size_t negatives = labels.size() - positives;

    const auto order = ascending_order(scores);
    const double lo = scores[order.front()];
    const double hi = scores[order.back()];

    // Below-min sentinel: everything predicted attack.
    ThresholdChoice best{lo - 1.0, f1_from_counts(positives, negatives, 0)};

    std::size_t pos_below = 0;
    std::size_t neg_below = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double v = scores[order[k]];
        while (k < order.size() && scores[order[k]] == v) {
            (labels[order[k]] ? pos_below : neg_below) += 1;
            ++k;
        }
        const std::size_t tp = positives - pos_below;
        const std::size_t fp = negatives - neg_below;
        const double candidate = k < order.size() ? (v + scores[order[k]]) / 2.0 : hi + 1.0;
        const double f1 = f1_from_counts(tp, fp, pos_below);
        if (f1 > best.f1) best = {candidate, f1};
    }
    return best;
}

RocCurve roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_inputs(scores, labels);
    const std::size_t positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                                                         [](auto l) { return l != 0; }));
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0) throw DomainError("roc_auc needs both classes");

    auto order = ascending_order(scores);
    std::reverse(order.begin(), order.end());

    RocCurve roc;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    const double P = static_cast<double>(positives);
    const double N = static_cast<double>(negatives);
    std::size_t tp = 0;
    std::size_t fp = 0;
    double area = 0.0;
    for (std::size_t k = 0; k < order.size();) {
        const double v = scores[order[k]];
        const std::size_t tp0 = tp;
        const std::size_t fp0 = fp;
        while (k < order.size() && scores[order[k]] == v) {
            (labels[order[k]] ? tp : fp) += 1;
            ++k;
        }
        // Trapezoid over a tie block = pairwise count with ties weighted 1/2.
        area += static_cast<double>(fp - fp0) * (static_cast<double>(tp0) + static_cast<double>(tp)) / 2.0;
        roc.points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P, v});
    }
    roc.auc = area / (P * N);
    return roc;
}

}  // namespace robustad::protocol
