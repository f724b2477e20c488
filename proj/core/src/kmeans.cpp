#include "robustad/kmeans.hpp"

#include <limits>
#include <string>

#include "robustad/error.hpp"

namespace robustad::num {

namespace {

Matrix seed_plus_plus(const Matrix& points, std::size_t k, SeededRng& rng) {
    const std::size_t n = points.rows();
    Matrix centroids(k, points.cols());
    std::vector<bool> chosen(n, false);
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());

    std::size_t pick = rng.uniform_index(n);
    for (std::size_t c = 0; c < k; ++c) {
        chosen[pick] = true;
        auto src = points.row(pick);
        std::copy(src.begin(), src.end(), centroids.row(c).begin());
        if (c + 1 == k) break;

        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = std::min(dist[i], squared_distance(points.row(i), centroids.row(c)));
            total += dist[i];
        }
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (dist[i] <= 0.0) continue;
                acc += dist[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                // Rounding left the target past the last positive weight.
                for (std::size_t i = n; i-- > 0;) {
                    if (dist[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // Every remaining point coincides with a centroid.
            pick = 0;
            while (chosen[pick]) ++pick;
        }
    }
    return centroids;
}

std::size_t nearest(const Matrix& centroids, std::span<const double> x, double& best_dist) {
    std::size_t best = 0;
    best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
        const double d = squared_distance(x, centroids.row(c));
        if (d < best_dist) {
            best_dist = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, std::size_t k, SeededRng& rng, std::size_t max_iter) {
    const std::size_t n = points.rows();
    if (n == 0) throw DomainError("kmeans: no points");
    if (k == 0 || k > n) {
        throw DomainError("kmeans: k=" + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
    }
    if (!points.all_finite()) throw DomainError("kmeans: non-finite coordinates");
    if (max_iter == 0) max_iter = 1;

    KMeansResult result;
    result.centroids = seed_plus_plus(points, k, rng);
    result.assignments.assign(n, k);
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> counts(k, 0);

    bool converged = false;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        ++result.iterations;
        bool changed = false;
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t c = nearest(result.centroids, points.row(i), dist[i]);
            if (c != result.assignments[i]) changed = true;
            result.assignments[i] = c;
            ++counts[c];
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[result.assignments[i]] < 2) continue;
                if (far == n || dist[i] > dist[far]) far = i;
            }
            --counts[result.assignments[far]];
            result.assignments[far] = c;
            counts[c] = 1;
            dist[far] = 0.0;
            auto src = points.row(far);
            std::copy(src.begin(), src.end(), result.centroids.row(c).begin());
            changed = true;
        }

        double inertia = 0.0;
        for (double d : dist) inertia += d;
        result.inertia_history.push_back(inertia);
        result.inertia = inertia;

        if (!changed) {
            converged = true;
            break;
        }

        Matrix sums(k, points.cols());
        for (std::size_t i = 0; i < n; ++i) {
            auto dst = sums.row(result.assignments[i]);
            auto src = points.row(i);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            auto dst = result.centroids.row(c);
            auto src = sums.row(c);
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] / static_cast<double>(counts[c]);
        }
    }

    if (!converged) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(points.row(i), result.centroids.row(result.assignments[i]));
        }
        result.inertia = inertia;
        result.inertia_history.push_back(result.inertia);
    }
    return result;
}

}  // namespace robustad::num
