#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robustad::ranking {

/// Model-by-condition table of scores in [0, 1]; values[m][c] is model m on condition c.
struct ScoreTable {
    std::vector<std::string> models;
    std::vector<std::string> conditions;
    std::vector<std::vector<double>> values;

    /// DomainError on shape mismatch, empty table, or values outside [0, 1].
    void validate() const;
};

/// Per condition rank 1 goes to the highest value and ties share the mean
/// of their ranks; the result is the mean over conditions.
std::vector<double> average_ranks(const ScoreTable& table);

struct WilcoxonResult {
    double statistic = 0.0;  ///< min(W+, W-)
    double p = 1.0;          ///< two-sided
    std::size_t n_effective = 0;
    bool exact = true;
};

/// Largest non-zero-difference count handled by the exact null distribution.
inline constexpr std::size_t kExactWilcoxonLimit = 20;

/// Signed-rank test on paired values. Zero differences are dropped and tied
/// magnitudes get mean ranks. When every difference is zero the result is
/// statistic 0, p 1. ContractError on unequal lengths, or fewer than two
/// non-zero differences otherwise.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Holm step-down adjustment, returned in input order. ContractError for p outside [0, 1].
std::vector<double> holm_adjust(std::span<const double> raw);

/// Matched-pairs rank-biserial correlation (W+ - W-) / (W+ + W-); 0 when all differences are zero.
double effect_size(std::span<const double> a, std::span<const double> b);

/// Maximal cliques of the graph joining models i, j whenever adjusted[i][j] >= level.
/// Members are ordered by rank, cliques by their best member's rank.
std::vector<std::vector<std::size_t>> cd_groups(std::span<const double> avg_ranks,
                                                const std::vector<std::vector<double>>& adjusted,
                                                double level = 0.05);

struct PairwiseResult {
    std::string model_a;
    std::string model_b;
    double statistic = 0.0;
    double raw_p = 1.0;
    double adjusted_p = 1.0;
    double effect_size = 0.0;
    std::size_t n_effective = 0;
};

struct RankReport {
    std::vector<std::string> models;
    std::vector<double> average_ranks;
    std::vector<PairwiseResult> pairwise;
    std::vector<std::vector<std::string>> cliques;
    double level = 0.05;
    std::string pairing;    ///< "seed" or "mean"
    std::string weighting;  ///< how conditions enter the average rank
    std::vector<std::string> excluded_models;
};

/// Ranks on `means`, runs every pairwise test on `paired` (same model order,
/// possibly finer conditions), Holm-adjusts across all pairs and groups.
RankReport build_rank_report(const ScoreTable& means, const ScoreTable& paired, double level = 0.05);

std::string rank_report_to_json(const RankReport& report);
RankReport rank_report_from_json(std::string_view text);

}  // namespace robustad::ranking
