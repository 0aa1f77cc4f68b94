#include "catbary/corpus.hpp"

#include "catbary/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace catbary {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view to_string(CorpusSpace space) {
    switch (space) {
    case CorpusSpace::e1:
        return "E1";
    case CorpusSpace::e2:
        return "E2";
    case CorpusSpace::e3:
        return "E3";
    case CorpusSpace::s2:
        return "S2";
    case CorpusSpace::h2:
        return "H2";
    case CorpusSpace::star_tree:
        return "star-tree";
    case CorpusSpace::path_tree:
        return "path-tree";
    case CorpusSpace::binary_tree:
        return "binary-tree";
    }
    return "unknown";
}

const std::vector<CorpusSpace>& corpus_spaces() {
    static const std::vector<CorpusSpace> all = {CorpusSpace::e1,        CorpusSpace::e2,        CorpusSpace::e3,
                                                 CorpusSpace::s2,        CorpusSpace::h2,        CorpusSpace::star_tree,
                                                 CorpusSpace::path_tree, CorpusSpace::binary_tree};
    return all;
}

SpacePtr corpus_space(CorpusSpace space) {
    switch (space) {
    case CorpusSpace::e1:
        return ModelSpace::euclidean(1);
    case CorpusSpace::e2:
        return ModelSpace::euclidean(2);
    case CorpusSpace::e3:
        return ModelSpace::euclidean(3);
    case CorpusSpace::s2:
        return ModelSpace::sphere(2, 1.0);
    case CorpusSpace::h2:
        return ModelSpace::hyperbolic(2, -1.0);
    case CorpusSpace::star_tree: {
        std::vector<RTree::Edge> edges;
        for (std::size_t i = 1; i <= 5; ++i) edges.push_back({0, i, 1.0});
        return std::make_shared<const TreeSpace>(RTree(6, edges, {"c", "l1", "l2", "l3", "l4", "l5"}), "star-tree");
    }
    case CorpusSpace::path_tree:
        return std::make_shared<const TreeSpace>(
            RTree(5, {{0, 1, 1.0}, {1, 2, 2.0}, {2, 3, 2.0}, {3, 4, 1.0}}, {"v0", "v1", "v2", "v3", "v4"}), "path-tree");
    case CorpusSpace::binary_tree:
        return std::make_shared<const TreeSpace>(
            RTree(7, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 3, 0.5}, {1, 4, 0.5}, {2, 5, 0.5}, {2, 6, 0.5}},
                  {"r", "a", "b", "a1", "a2", "b1", "b2"}),
            "binary-tree");
    }
    fail(ErrorCode::invalid_input, "unknown corpus space");
}

namespace {

SpacePoint uniform_tree_point(const RTree& tree, Rng& rng) {
    double total = 0.0;
    for (const auto& e : tree.edges()) total += e.length;
    double t = rng.uniform() * total;
    for (std::size_t i = 0; i < tree.edges().size(); ++i) {
        const double len = tree.edge(i).length;
        if (t < len || i + 1 == tree.edges().size()) return tree.point(i, std::min(t, len));
        t -= len;
    }
    return tree.vertex_point(0);
}

} // namespace

std::vector<CorpusInstance> make_corpus(CorpusSpace kind, std::size_t count, std::uint64_t seed) {
    const SpacePtr space = corpus_space(kind);
    // Distinct streams per family, so adding a family never shifts another.
    Rng rng(seed * 1000003u + static_cast<std::uint64_t>(kind));
    std::vector<CorpusInstance> out;
    for (std::size_t i = 0; i < count; ++i) {
        CorpusInstance inst;
        inst.id = std::string(to_string(kind)) + "-" + std::to_string(i);
        inst.set.space = space;
        const std::size_t size = 3 + rng.index(10);
        for (std::size_t j = 0; j < size; ++j) {
            if (const TreeSpace* tree = space->tree_structure()) {
                inst.set.points.push_back(uniform_tree_point(tree->tree(), rng));
            } else {
                const ModelSpace& model = *space->model_structure();
                const double radius = kind == CorpusSpace::s2 ? 0.35 : 1.0;
                inst.set.points.push_back(
                    space->sample_near(base_point(model.curvature(), model.dim()), radius, rng));
            }
            inst.set.weights.push_back(rng.uniform(0.2, 3.0));
        }
        out.push_back(std::move(inst));
    }
    return out;
}

DeltaFunction jitter(const GeodesicSpace& space, const std::vector<SpacePoint>& points, double delta, Rng& rng) {
    require(delta > 0.0, ErrorCode::invalid_input, "jitter needs delta > 0");
    DeltaFunction f{points, {}, delta};
    for (const SpacePoint& p : points) {
        if (const TreeSpace* tree = space.tree_structure()) {
            const TreePoint& t = as_tree(p);
            const double len = tree->tree().edge(t.edge).length;
            const double offset = std::clamp(t.offset + rng.uniform(-1.0, 1.0) * 0.999 * delta, 0.0, len);
            f.images.push_back(tree->tree().point(t.edge, offset));
        } else {
            f.images.push_back(space.sample_near(p, 0.999 * delta, rng));
        }
    }
    return f;
}

namespace {

MatrixXd random_orthogonal(int n, Rng& rng) {
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    }
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    // Fix signs so the distribution does not depend on the QR convention.
    for (int j = 0; j < n; ++j) {
        if (qr.matrixQR()(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

std::vector<std::size_t> permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.index(i)]);
    return p;
}

} // namespace

IsometryDescription random_isometry(CorpusSpace space, Rng& rng) {
    switch (space) {
    case CorpusSpace::e1:
    case CorpusSpace::e2:
    case CorpusSpace::e3: {
        const int n = space == CorpusSpace::e1 ? 1 : space == CorpusSpace::e2 ? 2 : 3;
        VectorXd t(n);
        for (int i = 0; i < n; ++i) t[i] = rng.normal();
        return EuclideanMotion{random_orthogonal(n, rng), t};
    }
    case CorpusSpace::s2:
        return SphereRotation{random_orthogonal(3, rng)};
    case CorpusSpace::h2: {
        const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double eta = rng.uniform(-1.0, 1.0);
        MatrixXd rot = MatrixXd::Identity(3, 3);
        rot.topLeftCorner(2, 2) << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        MatrixXd boost = MatrixXd::Identity(3, 3);
        boost(0, 0) = boost(2, 2) = std::cosh(eta);
        boost(0, 2) = boost(2, 0) = std::sinh(eta);
        return HyperbolicIsometry{boost * rot};
    }
    case CorpusSpace::star_tree: {
        const auto leaves = permutation(5, rng);
        std::vector<std::size_t> map(6, 0);
        for (std::size_t i = 0; i < 5; ++i) map[i + 1] = leaves[i] + 1;
        return TreeAutomorphism{map};
    }
    case CorpusSpace::path_tree:
        if (rng.uniform() < 0.5) return TreeAutomorphism{{0, 1, 2, 3, 4}};
        return TreeAutomorphism{{4, 3, 2, 1, 0}};
    case CorpusSpace::binary_tree: {
        std::vector<std::size_t> map = {0, 1, 2, 3, 4, 5, 6};
        if (rng.uniform() < 0.5) std::swap(map[3], map[4]);
        if (rng.uniform() < 0.5) std::swap(map[5], map[6]);
        if (rng.uniform() < 0.5) {
            map = {0, 2, 1, map[5], map[6], map[3], map[4]};
        }
        return TreeAutomorphism{map};
    }
    }
    fail(ErrorCode::invalid_input, "unknown corpus space");
}

std::vector<VectorXd> random_cloud(int dim, std::size_t size, Rng& rng) {
    std::vector<VectorXd> out;
    for (std::size_t i = 0; i < size; ++i) {
        VectorXd p(dim);
        for (int d = 0; d < dim; ++d) p[d] = rng.uniform();
        out.push_back(p);
    }
    return out;
}

std::vector<VectorXd> regular_simplex(int n) {
    require(n >= 1, ErrorCode::invalid_input, "simplex dimension must be positive");
    std::vector<VectorXd> v = {VectorXd::Zero(n)};
    // Each new vertex sits above the centroid of the previous face.
    for (int k = 0; k < n; ++k) {
        VectorXd centroid = VectorXd::Zero(n);
        for (const auto& p : v) centroid += p;
        centroid /= static_cast<double>(v.size());
        const double r2 = (v.front() - centroid).squaredNorm();
        VectorXd p = centroid;
        p[k] += std::sqrt(1.0 - r2);
        v.push_back(p);
    }
    return v;
}

} // namespace catbary
