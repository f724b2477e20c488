#pragma once

#include <cstddef>
#include <vector>

#include "robustad/matrix.hpp"
#include "robustad/rng.hpp"

namespace robustad::num {

struct KMeansResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    double inertia = 0.0;
    /// Inertia after every assignment step; non-increasing.
    std::vector<double> inertia_history;
    std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding.
///
/// Seeding draws from `rng`; every later step is deterministic. A cluster that
/// empties during an iteration is re-seeded at the point farthest from its
/// current centroid (lowest row index on ties), which is then moved into it.
/// Stops when assignments stop changing or after `max_iter` iterations.
KMeansResult kmeans(const Matrix& points, std::size_t k, SeededRng& rng, std::size_t max_iter = 100);

}  // namespace robustad::num
