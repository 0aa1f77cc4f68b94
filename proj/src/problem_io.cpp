#include "catbary/problem_io.hpp"

#include "catbary/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>

namespace catbary {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Maps JSON pointers ("/points/2/1") to the line where each value starts.
// Runs on text that nlohmann has already accepted.
class LineIndex {
public:
    explicit LineIndex(std::string_view text) : text_(text) {
        skip_ws();
        value("");
    }

    std::size_t line(const std::string& pointer) const {
        // Fall back to the nearest recorded ancestor.
        std::string p = pointer;
        while (true) {
            if (const auto it = lines_.find(p); it != lines_.end()) return it->second;
            if (p.empty()) return 1;
            p.erase(p.rfind('/'));
        }
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') ++line_;
            ++pos_;
        }
    }

    std::string string_token() {
        std::string out;
        ++pos_;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') ++pos_;
            if (pos_ < text_.size()) out += text_[pos_++];
        }
        ++pos_;
        return out;
    }

    void value(const std::string& pointer) {
        lines_[pointer] = line_;
        if (pos_ >= text_.size()) return;
        const char c = text_[pos_];
        if (c == '{') {
            ++pos_;
            skip_ws();
            while (pos_ < text_.size() && text_[pos_] != '}') {
                const std::string key = string_token();
                skip_ws();
                ++pos_;  // ':'
                skip_ws();
                value(pointer + "/" + key);
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '[') {
            ++pos_;
            skip_ws();
            for (std::size_t i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
                value(pointer + "/" + std::to_string(i));
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ',') {
                    ++pos_;
                    skip_ws();
                }
            }
            ++pos_;
        } else if (c == '"') {
            string_token();
        } else {
            while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) == std::string_view::npos) ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::map<std::string, std::size_t> lines_;
};

class Reader {
public:
    Reader(std::string_view text, std::string_view source) : source_(source), index_(text) {}

    [[noreturn]] void fail_at(const std::string& pointer, const std::string& message) const {
        fail(ErrorCode::invalid_input, source_ + ":" + std::to_string(index_.line(pointer)) + ": " +
                                           (pointer.empty() ? std::string("/") : pointer) + ": " + message);
    }

    const json& member(const json& obj, const std::string& pointer, const char* key) const {
        if (!obj.contains(key)) fail_at(pointer, std::string("missing field '") + key + "'");
        return obj.at(key);
    }

    double number(const json& v, const std::string& pointer) const {
        if (!v.is_number()) fail_at(pointer, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail_at(pointer, "expected a finite number");
        return x;
    }

    std::size_t index(const json& v, const std::string& pointer) const {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            fail_at(pointer, "expected a non-negative integer");
        }
        return v.get<std::size_t>();
    }

    void only_keys(const json& obj, const std::string& pointer, std::initializer_list<const char*> keys) const {
        for (const auto& [k, v] : obj.items()) {
            bool known = false;
            for (const char* key : keys) known = known || k == key;
            if (!known) fail_at(pointer + "/" + k, "unknown field");
        }
    }

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    LineIndex index_;
};

std::size_t vertex_ref(const Reader& r, const RTree* tree, const std::vector<std::string>& names, const json& v,
                       const std::string& pointer) {
    if (v.is_string()) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == v.get<std::string>()) return i;
        }
        r.fail_at(pointer, "unknown vertex '" + v.get<std::string>() + "'");
    }
    const std::size_t i = r.index(v, pointer);
    const std::size_t count = tree ? tree->vertex_count() : names.size();
    if (i >= count) r.fail_at(pointer, "vertex index out of range");
    return i;
}

SpacePtr read_space(const Reader& r, const json& spec) {
    const std::string p = "/space";
    if (!spec.is_object()) r.fail_at(p, "expected an object");
    const json& type = r.member(spec, p, "type");
    if (!type.is_string()) r.fail_at(p + "/type", "expected a string");
    const std::string t = type.get<std::string>();
    try {
        if (t == "euclidean" || t == "sphere" || t == "hyperbolic") {
            r.only_keys(spec, p, {"type", "dim", "k"});
            const std::size_t dim = r.index(r.member(spec, p, "dim"), p + "/dim");
            if (dim < 1 || dim > 64) r.fail_at(p + "/dim", "dimension must be between 1 and 64");
            const int n = static_cast<int>(dim);
            if (t == "euclidean") {
                if (spec.contains("k") && r.number(spec["k"], p + "/k") != 0.0) r.fail_at(p + "/k", "euclidean space has k = 0");
                return ModelSpace::euclidean(n);
            }
            const double k = spec.contains("k") ? r.number(spec["k"], p + "/k") : (t == "sphere" ? 1.0 : -1.0);
            if (t == "sphere") {
                if (!(k > 0.0)) r.fail_at(p + "/k", "sphere needs k > 0");
                return ModelSpace::sphere(n, k);
            }
            if (!(k < 0.0)) r.fail_at(p + "/k", "hyperbolic space needs k < 0");
            return ModelSpace::hyperbolic(n, k);
        }
        if (t == "tree") {
            r.only_keys(spec, p, {"type", "vertices", "edges"});
            const json& vs = r.member(spec, p, "vertices");
            std::vector<std::string> names;
            if (!vs.is_array()) r.fail_at(p + "/vertices", "expected an array of names");
            for (std::size_t i = 0; i < vs.size(); ++i) {
                if (!vs[i].is_string()) r.fail_at(p + "/vertices/" + std::to_string(i), "expected a string");
                names.push_back(vs[i].get<std::string>());
            }
            const json& es = r.member(spec, p, "edges");
            if (!es.is_array()) r.fail_at(p + "/edges", "expected an array of edges");
            std::vector<RTree::Edge> edges;
            for (std::size_t i = 0; i < es.size(); ++i) {
                const std::string ep = p + "/edges/" + std::to_string(i);
                if (!es[i].is_object()) r.fail_at(ep, "expected an object with u, v, length");
                r.only_keys(es[i], ep, {"u", "v", "length"});
                RTree::Edge e;
                e.u = vertex_ref(r, nullptr, names, r.member(es[i], ep, "u"), ep + "/u");
                e.v = vertex_ref(r, nullptr, names, r.member(es[i], ep, "v"), ep + "/v");
                e.length = r.number(r.member(es[i], ep, "length"), ep + "/length");
                edges.push_back(e);
            }
            return std::make_shared<const TreeSpace>(RTree(names.size(), std::move(edges), names));
        }
    } catch (const Error& e) {
        if (std::string_view(e.what()).starts_with(r.source() + ":")) throw;
        r.fail_at(p, e.what());
    }
    r.fail_at(p + "/type", "unknown space type '" + t + "' (euclidean, sphere, hyperbolic, tree)");
}

SpacePoint read_point(const Reader& r, const GeodesicSpace& space, const json& v, const std::string& pointer) {
    try {
        if (const TreeSpace* ts = space.tree_structure()) {
            const RTree& tree = ts->tree();
            if (!v.is_object()) r.fail_at(pointer, "expected {\"edge\", \"offset\"} or {\"vertex\"}");
            if (v.contains("vertex")) {
                r.only_keys(v, pointer, {"vertex"});
                return tree.vertex_point(vertex_ref(r, &tree, tree.names(), v["vertex"], pointer + "/vertex"));
            }
            r.only_keys(v, pointer, {"edge", "offset"});
            const std::size_t e = r.index(r.member(v, pointer, "edge"), pointer + "/edge");
            if (e >= tree.edges().size()) r.fail_at(pointer + "/edge", "edge index out of range");
            return tree.point(e, r.number(r.member(v, pointer, "offset"), pointer + "/offset"));
        }
        const ModelSpace& m = *space.model_structure();
        if (!v.is_array()) r.fail_at(pointer, "expected an array of coordinates");
        Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            x[static_cast<Eigen::Index>(i)] = r.number(v[i], pointer + "/" + std::to_string(i));
        }
        const auto n = static_cast<Eigen::Index>(m.dim());
        if (m.kind() == ModelKind::hyperboloid && x.size() == n) return hyperboloid_lift(x);
        const Eigen::Index want = m.kind() == ModelKind::euclidean ? n : n + 1;
        if (x.size() != want) {
            r.fail_at(pointer, "expected " + std::to_string(want) + " coordinates, got " + std::to_string(x.size()));
        }
        return m.point(x);
    } catch (const Error& e) {
        if (std::string_view(e.what()).starts_with(r.source() + ":")) throw;
        r.fail_at(pointer, e.what());
    }
}

} // namespace

Problem parse_problem(std::string_view text, std::string_view source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
        fail(ErrorCode::invalid_input, std::string(source) + ":" + std::to_string(line) + ": syntax error: " + e.what());
    }
    const Reader r(text, source);
    if (!doc.is_object()) r.fail_at("", "expected an object with space and points");
    r.only_keys(doc, "", {"space", "points", "weights", "exponent"});

    Problem problem;
    problem.set.space = read_space(r, r.member(doc, "", "space"));
    const json& pts = r.member(doc, "", "points");
    if (!pts.is_array() || pts.empty()) r.fail_at("/points", "expected a non-empty array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        problem.set.points.push_back(read_point(r, *problem.set.space, pts[i], "/points/" + std::to_string(i)));
    }
    if (doc.contains("weights")) {
        const json& ws = doc["weights"];
        if (!ws.is_array()) r.fail_at("/weights", "expected an array");
        if (ws.size() != pts.size()) {
            r.fail_at("/weights", "expected " + std::to_string(pts.size()) + " weights, got " + std::to_string(ws.size()));
        }
        bool positive = false;
        for (std::size_t i = 0; i < ws.size(); ++i) {
            const double u = r.number(ws[i], "/weights/" + std::to_string(i));
            if (u < 0.0) r.fail_at("/weights/" + std::to_string(i), "weights must be non-negative");
            positive = positive || u > 0.0;
            problem.set.weights.push_back(u);
        }
        if (!positive) r.fail_at("/weights", "at least one weight must be positive");
    } else {
        problem.set.weights.assign(pts.size(), 1.0);
    }
    if (doc.contains("exponent")) {
        problem.exponent = r.number(doc["exponent"], "/exponent");
        if (!(problem.exponent > 0.0)) r.fail_at("/exponent", "exponent must be positive");
    }
    try {
        validate_weighted_set(problem.set);
    } catch (const Error& e) {
        fail(e.code(), std::string(source) + ": " + e.what());
    }
    return problem;
}

Problem load_problem(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(path, std::ios::binary);
        require(in.good(), ErrorCode::invalid_input, path + ": cannot open file");
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    return parse_problem(text, path == "-" ? "<stdin>" : path);
}

ordered_json space_to_json(const GeodesicSpace& space) {
    ordered_json out;
    if (const TreeSpace* ts = space.tree_structure()) {
        const RTree& tree = ts->tree();
        std::vector<std::string> names = tree.names();
        if (names.empty()) {
            for (std::size_t i = 0; i < tree.vertex_count(); ++i) names.push_back("v" + std::to_string(i));
        }
        out["type"] = "tree";
        out["vertices"] = names;
        out["edges"] = ordered_json::array();
        for (const auto& e : tree.edges()) {
            out["edges"].push_back(ordered_json{{"u", names[e.u]}, {"v", names[e.v]}, {"length", e.length}});
        }
        return out;
    }
    const ModelSpace* m = space.model_structure();
    require(m != nullptr, ErrorCode::unsupported, "space has no file representation");
    switch (m->kind()) {
    case ModelKind::euclidean:
        out["type"] = "euclidean";
        break;
    case ModelKind::sphere:
        out["type"] = "sphere";
        break;
    case ModelKind::hyperboloid:
        out["type"] = "hyperbolic";
        break;
    }
    out["dim"] = m->dim();
    if (m->kind() != ModelKind::euclidean) out["k"] = m->curvature().k();
    return out;
}

ordered_json point_to_json(const GeodesicSpace& space, const SpacePoint& x) {
    if (space.tree_structure() != nullptr) {
        const TreePoint& t = as_tree(x);
        return ordered_json{{"edge", t.edge}, {"offset", t.offset}};
    }
    const Eigen::VectorXd& c = as_model(x).coords();
    return ordered_json(std::vector<double>(c.data(), c.data() + c.size()));
}

SpacePoint point_from_json(const GeodesicSpace& space, const json& value) {
    const std::string text = value.dump();
    const Reader r(text, "<point>");
    return read_point(r, space, value, "");
}

ordered_json problem_to_json(const Problem& problem) {
    ordered_json out;
    out["space"] = space_to_json(*problem.set.space);
    out["points"] = ordered_json::array();
    for (const SpacePoint& p : problem.set.points) out["points"].push_back(point_to_json(*problem.set.space, p));
    out["weights"] = problem.set.weights;
    if (problem.exponent != 1.0) out["exponent"] = problem.exponent;
    return out;
}

ordered_json result_to_json(const Problem& problem, const BarycenterResult& result) {
    ordered_json out;
    out["barycenter"] = point_to_json(*problem.set.space, result.barycenter);
    out["baryradius"] = result.baryradius;
    out["active_indices"] = result.active_indices;
    out["iterations"] = result.iterations;
    out["residual"] = result.residual;
    out["certified"] = result.certified;
    return out;
}

double problem_objective(const Problem& problem, const SpacePoint& x) {
    double best = 0.0;
    for (std::size_t i = 0; i < problem.set.points.size(); ++i) {
        const double d = problem.set.space->distance(x, problem.set.points[i]);
        best = std::max(best, problem.set.weights[i] * (problem.exponent == 1.0 ? d : std::pow(d, problem.exponent)));
    }
    return best;
}

double recheck_result(const Problem& problem, const json& result) {
    require(result.is_object() && result.contains("barycenter") && result.contains("baryradius") &&
                result["baryradius"].is_number(),
            ErrorCode::invalid_input, "result record needs barycenter and baryradius");
    const SpacePoint q = point_from_json(*problem.set.space, result["barycenter"]);
    return std::abs(problem_objective(problem, q) - result["baryradius"].get<double>());
}

} // namespace catbary
