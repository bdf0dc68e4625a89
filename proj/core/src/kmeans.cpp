#include "eipe/kmeans.hpp"

#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>

#include "eipe/error.hpp"

namespace eipe {

double squared_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("vectors of dimension {} and {}", a.size(), b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double cosine_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                fmt::format("vectors of dimension {} and {}", a.size(), b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Vector l2_normalized(Vector v) {
  double n = 0.0;
  for (const double x : v) n += x * x;
  n = std::sqrt(n);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::InvalidEmbedding, "cannot normalize a zero or non-finite vector");
  }
  for (double& x : v) x /= n;
  return v;
}

namespace {

double assign_all(const std::vector<Vector>& vectors, const std::vector<Vector>& centroids,
                  std::vector<std::size_t>& assignments) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = squared_distance(vectors[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignments[i] = best;
    inertia += best_d;
  }
  return inertia;
}

std::vector<Vector> seed_centroids(const std::vector<Vector>& vectors, std::size_t k,
                                   std::uint64_t seed) {
  const std::size_t n = vectors.size();
  std::mt19937_64 rng(seed);
  std::vector<bool> chosen(n, false);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::vector<Vector> centroids;
  std::size_t next = static_cast<std::size_t>(rng() % n);
  while (true) {
    chosen[next] = true;
    centroids.push_back(vectors[next]);
    if (centroids.size() == k) break;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(vectors[i], centroids.back()));
    }
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i] && nearest[i] > far) {
        far = nearest[i];
        next = i;
      }
    }
  }
  return centroids;
}

}  // namespace

ClusterModel kmeans(const std::vector<Vector>& vectors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const std::size_t n = vectors.size();
  if (k == 0 || n < k) {
    throw Error(ErrorCode::TooFewVectors, fmt::format("k={} with {} vectors", k, n));
  }
  const std::size_t dim = vectors.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (vectors[i].size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  fmt::format("vector {} has dimension {}, expected {}", i, vectors[i].size(), dim));
    }
  }

  ClusterModel model;
  model.centroids = seed_centroids(vectors, k, seed);
  model.assignments.assign(n, 0);
  model.inertia = assign_all(vectors, model.centroids, model.assignments);
  model.inertia_history.push_back(model.inertia);

  std::vector<std::size_t> next_assignments(n, 0);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<Vector> sums(k, Vector(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = model.assignments[i];
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += vectors[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        model.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
      }
    }
    std::vector<bool> reseeded(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far_i = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (reseeded[i]) continue;
        const double d = squared_distance(vectors[i], model.centroids[model.assignments[i]]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      reseeded[far_i] = true;
      model.centroids[c] = vectors[far_i];
    }

    model.inertia = assign_all(vectors, model.centroids, next_assignments);
    model.inertia_history.push_back(model.inertia);
    ++model.iterations;
    if (next_assignments == model.assignments) break;
    model.assignments.swap(next_assignments);
  }
  return model;
}

}  // namespace eipe
