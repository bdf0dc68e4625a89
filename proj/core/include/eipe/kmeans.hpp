#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace eipe {

using Vector = std::vector<double>;

struct ClusterModel {
  std::vector<Vector> centroids;
  std::vector<std::size_t> assignments;  // record index -> cluster
  double inertia = 0.0;                  // sum of squared distances to assigned centroid
  // Inertia after each assignment step, first entry from the seeded centroids.
  std::vector<double> inertia_history;
  std::size_t iterations = 0;  // Lloyd update steps performed
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
};

// Lloyd's algorithm from farthest-point seeding: the first centre is
// vectors[rng() % n] for a mt19937_64 seeded with `seed`, each further centre
// is the point farthest from the centres chosen so far (lowest index on
// ties). Points go to the nearest centroid, lowest cluster index on ties.
// An empty cluster is moved onto the point farthest from its own centroid.
// Stops at an assignment fixpoint or after max_iterations updates.
// Throws Error(TooFewVectors) when k == 0 or k > n, Error(DimensionMismatch)
// on ragged input.
ClusterModel kmeans(const std::vector<Vector>& vectors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

double squared_distance(const Vector& a, const Vector& b);
double cosine_similarity(const Vector& a, const Vector& b);
// Returns v / |v|. Throws Error(InvalidEmbedding) for a zero vector.
Vector l2_normalized(Vector v);

}  // namespace eipe
