#pragma once

#include "catbary/solver.hpp"
#include "catbary/stability.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace catbary {

/// Space families of the seeded verification corpus.
enum class CorpusSpace { e1, e2, e3, s2, h2, star_tree, path_tree, binary_tree };

std::string_view to_string(CorpusSpace space);
const std::vector<CorpusSpace>& corpus_spaces();

/// Star with five unit legs, path with lengths (1, 2, 2, 1), and a binary
/// tree of depth two (inner edges 1, leaf edges 0.5).
SpacePtr corpus_space(CorpusSpace space);

struct CorpusInstance {
    std::string id;
    WeightedPointSet set;
};

/// 3 to 12 points with weights in [0.2, 3]. Model-space points lie within
/// 0.35 (S^2) or 1 (H^2, E^n) of the base point; tree points are uniform
/// along the edges. Deterministic in (space, count, seed).
std::vector<CorpusInstance> make_corpus(CorpusSpace space, std::size_t count, std::uint64_t seed);

/// Moves every point by less than delta (seeded).
DeltaFunction jitter(const GeodesicSpace& space, const std::vector<SpacePoint>& points, double delta, Rng& rng);

/// Random isometry of the corpus space; trees get a random automorphism.
IsometryDescription random_isometry(CorpusSpace space, Rng& rng);

/// Uniform cloud of `size` points in the unit cube of E^dim.
std::vector<Eigen::VectorXd> random_cloud(int dim, std::size_t size, Rng& rng);

/// Vertices of the regular simplex with unit side in E^n.
std::vector<Eigen::VectorXd> regular_simplex(int n);

} // namespace catbary
