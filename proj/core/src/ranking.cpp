#include "robustad/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "robustad/error.hpp"

namespace robustad::ranking {

namespace {

// Ranks 1..n of `values` in descending order, ties get the mean rank.
std::vector<double> descending_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const double mean = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean;
        i = j;
    }
    return ranks;
}

struct SignedRanks {
    std::vector<unsigned> doubled;  // 2 * rank, integral even with ties
    std::vector<bool> positive;
    std::vector<std::size_t> tie_sizes;
    double w_plus = 0.0;
    double w_minus = 0.0;
};

SignedRanks signed_ranks(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("paired samples differ in length");
    std::vector<double> diffs;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (!std::isfinite(d)) throw DomainError("non-finite paired value");
        if (d != 0.0) diffs.push_back(d);
    }
    std::vector<std::size_t> order(diffs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });

    SignedRanks s;
    s.doubled.resize(diffs.size());
    s.positive.resize(diffs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j < order.size() && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]])) ++j;
        const auto twice = static_cast<unsigned>(i + 1 + j);  // (i+1) + j = 2 * mean rank
        for (std::size_t k = i; k < j; ++k) s.doubled[order[k]] = twice;
        s.tie_sizes.push_back(j - i);
        i = j;
    }
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        s.positive[i] = diffs[i] > 0.0;
        (s.positive[i] ? s.w_plus : s.w_minus) += s.doubled[i] / 2.0;
    }
    return s;
}

// P(W+ <= w) under the null, with W+ counted in doubled units.
double exact_lower_tail(const std::vector<unsigned>& doubled, unsigned w) {
    const unsigned total = std::accumulate(doubled.begin(), doubled.end(), 0u);
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    unsigned reach = 0;
    for (unsigned r : doubled) {
        reach += r;
        for (unsigned s = reach; s >= r; --s) ways[s] += ways[s - r];
    }
    double count = 0.0;
    for (unsigned s = 0; s <= std::min(w, total); ++s) count += ways[s];
    return std::ldexp(count, -static_cast<int>(doubled.size()));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

void ScoreTable::validate() const {
    if (models.empty() || conditions.empty()) throw DomainError("score table is empty");
    if (values.size() != models.size()) throw DomainError("score table rows do not match models");
    for (const auto& row : values) {
        if (row.size() != conditions.size()) throw DomainError("score table row does not cover every condition");
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0)) throw DomainError("score table value outside [0, 1]");
        }
    }
}

std::vector<double> average_ranks(const ScoreTable& table) {
    table.validate();
    std::vector<double> sums(table.models.size(), 0.0);
    std::vector<double> column(table.models.size());
    for (std::size_t c = 0; c < table.conditions.size(); ++c) {
        for (std::size_t m = 0; m < table.models.size(); ++m) column[m] = table.values[m][c];
        const auto ranks = descending_ranks(column);
        for (std::size_t m = 0; m < ranks.size(); ++m) sums[m] += ranks[m];
    }
    for (auto& s : sums) s /= static_cast<double>(table.conditions.size());
    return sums;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    const auto s = signed_ranks(a, b);
    WilcoxonResult r;
    r.n_effective = s.doubled.size();
    if (r.n_effective == 0) return r;
    if (r.n_effective < 2) throw ContractError("signed-rank test needs at least two non-zero differences");
    r.statistic = std::min(s.w_plus, s.w_minus);

    if (r.n_effective <= kExactWilcoxonLimit) {
        r.exact = true;
        const auto w = static_cast<unsigned>(std::lround(2.0 * r.statistic));
        r.p = std::min(1.0, 2.0 * exact_lower_tail(s.doubled, w));
        return r;
    }

    r.exact = false;
    const double n = static_cast<double>(r.n_effective);
    const double mean = n * (n + 1.0) / 4.0;
    double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    for (auto t : s.tie_sizes) {
        const double td = static_cast<double>(t);
        variance -= (td * td * td - td) / 48.0;
    }
    if (variance <= 0.0) {
        r.p = 1.0;
        return r;
    }
    const double z = std::min(0.0, r.statistic - mean + 0.5) / std::sqrt(variance);
    r.p = std::min(1.0, 2.0 * normal_cdf(z));
    return r;
}

std::vector<double> holm_adjust(std::span<const double> raw) {
    for (double p : raw) {
        if (!(p >= 0.0 && p <= 1.0)) throw ContractError("p-value outside [0, 1]");
    }
    const std::size_t m = raw.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return raw[x] < raw[y]; });
    std::vector<double> adjusted(m);
    double running = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        running = std::max(running, std::min(1.0, raw[order[i]] * static_cast<double>(m - i)));
        adjusted[order[i]] = running;
    }
    return adjusted;
}

double effect_size(std::span<const double> a, std::span<const double> b) {
    const auto s = signed_ranks(a, b);
    const double total = s.w_plus + s.w_minus;
    if (total == 0.0) return 0.0;
    return (s.w_plus - s.w_minus) / total;
}

std::vector<std::vector<std::size_t>> cd_groups(std::span<const double> avg_ranks,
                                                const std::vector<std::vector<double>>& adjusted, double level) {
    const std::size_t n = avg_ranks.size();
    if (adjusted.size() != n) throw ContractError("pairwise matrix does not match the model count");
    for (const auto& row : adjusted) {
        if (row.size() != n) throw ContractError("pairwise matrix is not square");
    }
    auto linked = [&](std::size_t i, std::size_t j) { return adjusted[i][j] >= level; };

    // Bron-Kerbosch with pivoting over index vectors.
    std::vector<std::vector<std::size_t>> cliques;
    auto expand = [&](auto& self, std::vector<std::size_t> r, std::vector<std::size_t> p,
                      std::vector<std::size_t> x) -> void {
        if (p.empty() && x.empty()) {
            cliques.push_back(std::move(r));
            return;
        }
        std::size_t pivot = p.empty() ? x.front() : p.front();
        std::size_t best = 0;
        for (auto u : p) {
            std::size_t deg = 0;
            for (auto v : p) deg += (v != u && linked(u, v)) ? 1 : 0;
            if (deg >= best) {
                best = deg;
                pivot = u;
            }
        }
        const auto candidates = p;
        for (auto v : candidates) {
            if (v != pivot && linked(pivot, v)) continue;
            std::vector<std::size_t> np;
            std::vector<std::size_t> nx;
            for (auto u : p) {
                if (u != v && linked(u, v)) np.push_back(u);
            }
            for (auto u : x) {
                if (u != v && linked(u, v)) nx.push_back(u);
            }
            auto nr = r;
            nr.push_back(v);
            self(self, std::move(nr), std::move(np), std::move(nx));
            p.erase(std::find(p.begin(), p.end(), v));
            x.push_back(v);
        }
    };
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (n > 0) expand(expand, {}, all, {});

    auto by_rank = [&](std::size_t x, std::size_t y) {
        return avg_ranks[x] != avg_ranks[y] ? avg_ranks[x] < avg_ranks[y] : x < y;
    };
    for (auto& c : cliques) std::sort(c.begin(), c.end(), by_rank);
    std::sort(cliques.begin(), cliques.end(), [&](const auto& x, const auto& y) {
        return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end(), by_rank);
    });
    return cliques;
}

RankReport build_rank_report(const ScoreTable& means, const ScoreTable& paired, double level) {
    means.validate();
    paired.validate();
    if (means.models != paired.models) throw ContractError("rank and pairing tables list different models");
    if (means.models.size() < 2) throw DomainError("ranking needs at least two models");
    if (!(level > 0.0 && level < 1.0)) throw ContractError("significance level must be in (0, 1)");

    RankReport report;
    report.models = means.models;
    report.average_ranks = average_ranks(means);
    report.level = level;

    const std::size_t n = means.models.size();
    std::vector<double> raw;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto w = wilcoxon_signed_rank(paired.values[i], paired.values[j]);
            PairwiseResult pr;
            pr.model_a = means.models[i];
            pr.model_b = means.models[j];
            pr.statistic = w.statistic;
            pr.raw_p = w.p;
            pr.effect_size = effect_size(paired.values[i], paired.values[j]);
            pr.n_effective = w.n_effective;
            report.pairwise.push_back(pr);
            raw.push_back(w.p);
        }
    }
    const auto adjusted = holm_adjust(raw);
    std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 1.0));
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            report.pairwise[k].adjusted_p = adjusted[k];
            matrix[i][j] = matrix[j][i] = adjusted[k];
        }
    }
    for (const auto& clique : cd_groups(report.average_ranks, matrix, level)) {
        std::vector<std::string> names;
        for (auto m : clique) names.push_back(report.models[m]);
        report.cliques.push_back(std::move(names));
    }
    return report;
}

std::string rank_report_to_json(const RankReport& report) {
    nlohmann::ordered_json j;
    j["models"] = report.models;
    j["average_ranks"] = report.average_ranks;
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& p : report.pairwise) {
        pairs.push_back({{"model_a", p.model_a},
                         {"model_b", p.model_b},
                         {"statistic", p.statistic},
                         {"raw_p", p.raw_p},
                         {"adjusted_p", p.adjusted_p},
                         {"effect_size", p.effect_size},
                         {"n_effective", p.n_effective}});
    }
    j["pairwise"] = pairs;
    j["cliques"] = report.cliques;
    j["level"] = report.level;
    j["pairing"] = report.pairing;
    j["weighting"] = report.weighting;
    j["excluded_models"] = report.excluded_models;
    return j.dump(2) + "\n";
}

RankReport rank_report_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RankReport r;
        r.models = j.at("models").get<std::vector<std::string>>();
        r.average_ranks = j.at("average_ranks").get<std::vector<double>>();
        for (const auto& p : j.at("pairwise")) {
            r.pairwise.push_back({p.at("model_a").get<std::string>(), p.at("model_b").get<std::string>(),
                                  p.at("statistic").get<double>(), p.at("raw_p").get<double>(),
                                  p.at("adjusted_p").get<double>(), p.at("effect_size").get<double>(),
                                  p.at("n_effective").get<std::size_t>()});
        }
        r.cliques = j.at("cliques").get<std::vector<std::vector<std::string>>>();
        r.level = j.at("level").get<double>();
        r.pairing = j.value("pairing", "");
        r.weighting = j.value("weighting", "");
        r.excluded_models = j.value("excluded_models", std::vector<std::string>{});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("rank report: ") + e.what(), 0);
    }
}

}  // namespace robustad::ranking
