#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace robustad::protocol {

/// Confusion-matrix metrics with attacks as the positive class.
/// precision = 0 without positive predictions, recall = 0 without positives,
/// f1 = 2TP / (2TP + FP + FN) and 0 when TP = 0.
struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

/// Predicts attack when score >= threshold.
Metrics compute_metrics(std::span<const double> scores, std::span<const std::uint8_t> labels, double threshold);

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct ThresholdChoice {
    double threshold = 0.0;
    double f1 = 0.0;
};

/// F1-maximizing threshold over the candidates {min - 1} U {midpoints of
/// consecutive distinct scores} U {max + 1}; ties go to the smallest
/// threshold. ThresholdError without positives, DomainError on non-finite
/// scores or mismatched lengths.
ThresholdChoice estimate_threshold(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;  ///< predictions are score >= threshold
};

struct RocCurve {
    std::vector<RocPoint> points;  ///< from (0,0) to (1,1)
    double auc = 0.0;
};

/// ROC curve and the probability that a random attack outscores a random
/// normal (ties count one half). DomainError unless both classes are present.
RocCurve roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

}  // namespace robustad::protocol
