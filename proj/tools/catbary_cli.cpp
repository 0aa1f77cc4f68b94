#include "catbary/error.hpp"
#include "catbary/gh_limits.hpp"
#include "catbary/problem_io.hpp"
#include "catbary/report.hpp"
#include "catbary/retraction.hpp"
#include "catbary/solver.hpp"
#include "catbary/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace catbary;
using nlohmann::ordered_json;

enum Exit { ok = 0, verification_failure = 1, input_error = 2, no_convergence = 3 };

// Writes to --output when given, otherwise to stdout.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            require(file_->good(), ErrorCode::invalid_input, path + ": cannot open for writing");
        }
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

struct SolveOptions {
    std::string file;
    double tol = kDefaultTol;
    std::size_t max_iter = kDefaultMaxIter;
    bool oracle = false;
    std::string output;
};

int emit_solution(const Problem& problem, const SolveOptions& o, bool circum) {
    Sink sink(o.output);
    auto solve = [&] {
        if (circum) return circumcenter(problem.set.space, problem.set.points, o.tol, o.max_iter);
        if (problem.exponent == 1.0) return barycenter(problem.set, o.tol, o.max_iter);
        return barycenter_pow(problem.set, problem.exponent, o.tol, o.max_iter);
    };
    std::optional<BarycenterResult> solved;
    try {
        solved = solve();
    } catch (const NonConvergence& e) {
        ordered_json out = result_to_json(problem, e.best());
        out["converged"] = false;
        sink.out() << out.dump(2) << '\n';
        std::cerr << "catbary: " << e.what() << '\n';
        return no_convergence;
    }
    const BarycenterResult& result = *solved;
    ordered_json out = result_to_json(problem, result);
    if (o.oracle) {
        Problem target = problem;
        if (circum) {
            target.set.weights.assign(problem.set.points.size(), 1.0);
            target.exponent = 1.0;
        }
        WeightedPointSet scaled = target.set;
        for (double& u : scaled.weights) u = std::pow(u, 1.0 / target.exponent);
        const BarycenterResult g = oracle_grid(scaled);
        out["oracle"] = {{"barycenter", point_to_json(*problem.set.space, g.barycenter)},
                         {"baryradius", problem_objective(target, g.barycenter)},
                         {"discrepancy", std::abs(problem_objective(target, result.barycenter) -
                                                  problem_objective(target, g.barycenter))}};
    }
    sink.out() << out.dump(2) << '\n';
    return ok;
}

int emit_records(const std::vector<CheckRecord>& records, const std::string& output) {
    Sink sink(output);
    for (const CheckRecord& r : records) sink.out() << to_json(r).dump() << '\n';
    const Summary s = summarize(records);
    std::cerr << s.passed << "/" << s.total << " checks passed\n";
    return s.all_pass() ? ok : verification_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Barycenters of weighted point sets in CAT(k) spaces"};
    app.require_subcommand(1);

    SolveOptions solve;
    auto add_solve = [&](CLI::App* cmd) {
        cmd->add_option("file", solve.file, "problem file (JSON, '-' for stdin)")->required();
        cmd->add_option("--tol", solve.tol, "point tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--max-iter", solve.max_iter, "iteration budget")->check(CLI::PositiveNumber);
        cmd->add_flag("--oracle", solve.oracle, "also run the brute-force oracle and report the discrepancy");
        cmd->add_option("--output,-o", solve.output, "write the result here instead of stdout");
    };
    auto* bary = app.add_subcommand("barycenter", "minimize sup u(p) d(x, p)^t");
    add_solve(bary);
    auto* circ = app.add_subcommand("circumcenter", "smallest enclosing ball (unit weights)");
    add_solve(circ);

    VerifyOptions verify;
    std::string suite;
    std::string verify_output;
    auto* ver = app.add_subcommand("verify", "run a seeded verification suite");
    ver->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(verify_suites()));
    ver->add_option("--seed", verify.seed, "corpus seed");
    ver->add_option("--count", verify.count, "corpus size (0 = suite default)");
    ver->add_option("--tol", verify.tol, "solver tolerance")->check(CLI::PositiveNumber);
    ver->add_option("--output,-o", verify_output, "write records here instead of stdout");

    int first = 1;
    int last = 12;
    int limit = 14;
    std::string gh_output;
    auto* gh = app.add_subcommand("gh-demo", "barycenters of grid refinements of [0, 1] with u = x^2");
    gh->add_option("--first", first, "first grid level")->check(CLI::Range(0, 23));
    gh->add_option("--last", last, "last grid level")->check(CLI::Range(0, 23));
    gh->add_option("--limit", limit, "level of the limit grid")->check(CLI::Range(1, 24));
    gh->add_option("--output,-o", gh_output, "write the report here instead of stdout");

    double packing = 1e-3;
    std::size_t samples = 200;
    std::size_t resolution = 51;
    std::string field;
    std::uint64_t seed = 1;
    std::string ret_output;
    auto* ret = app.add_subcommand("retraction-demo", "retract [-2, 2]^2 onto the unit disk");
    ret->add_option("--packing", packing, "cover resolution (collar width bound)")->check(CLI::PositiveNumber);
    ret->add_option("--samples", samples, "boundary samples")->check(CLI::PositiveNumber);
    ret->add_option("--resolution", resolution, "grid points per axis for checks and the field file")
        ->check(CLI::Range(2, 2001));
    ret->add_option("--field", field, "write grid point -> retracted point as CSV");
    ret->add_option("--seed", seed, "probe seed");
    ret->add_option("--output,-o", ret_output, "write records here instead of stdout");

    std::string problem_file;
    std::string result_file;
    double recheck_tol = 1e-12;
    auto* re = app.add_subcommand("recheck", "re-evaluate a result record against its problem file");
    re->add_option("problem", problem_file, "problem file")->required();
    re->add_option("result", result_file, "result record from 'barycenter'")->required();
    re->add_option("--tol", recheck_tol, "allowed |objective - baryradius| relative to max(1, r)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int status = app.exit(e);
        return status == 0 ? ok : input_error;
    }

    try {
        if (*bary || *circ) return emit_solution(load_problem(solve.file), solve, static_cast<bool>(*circ));
        if (*ver) return emit_records(run_suite(suite, verify), verify_output);
        if (*gh) {
            require(first <= last && last < limit, ErrorCode::invalid_input, "levels must satisfy first <= last < limit");
            const ConvergingSequence seq = interval_grid_sequence([](double x) { return x * x; }, first, last, limit);
            const LimitReport r = barycenter_limit(seq);
            ordered_json out;
            out["limit_barycenter"] = as_model(*r.limit_barycenter).coords()[0];
            out["stages"] = ordered_json::array();
            for (std::size_t i = 0; i < r.distances.size(); ++i) {
                out["stages"].push_back({{"level", first + static_cast<int>(i)},
                                         {"points", seq.stages[i].points.size()},
                                         {"delta", seq.stages[i].delta},
                                         {"distance", r.distances[i]},
                                         {"hausdorff", r.hausdorff[i]}});
            }
            out["ladder"] = ordered_json::array();
            for (const CheckRecord& c : r.ladder) out["ladder"].push_back(to_json(c));
            Summary pointed = summarize(r.pointed);
            out["pointed"] = {{"total", pointed.total}, {"passed", pointed.passed}};
            out["pass"] = r.all_pass();
            Sink sink(gh_output);
            sink.out() << out.dump(2) << '\n';
            return r.all_pass() ? ok : verification_failure;
        }
        if (*ret) {
            const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
            const BallCover cover = build_cover(disk_target(origin, 1.0),
                                                {Eigen::VectorXd::Constant(2, -2.0), Eigen::VectorXd::Constant(2, 2.0)},
                                                packing);
            std::vector<CheckRecord> records;
            records.push_back(retraction_identity_check(cover, resolution));
            records.push_back(image_containment_check(cover, resolution));
            const auto boundary = circle_samples(origin, 1.0, samples);
            for (double eps : {0.1, 0.01}) {
                ProbeReport p = continuity_probe(cover, boundary, eps, seed);
                p.modulus.instance = p.anchor_distance.instance = eps == 0.1 ? "eps=0.1" : "eps=0.01";
                records.push_back(p.modulus);
                records.push_back(p.anchor_distance);
            }
            records.push_back(local_continuity_check(cover, 1e-2, 100, seed));
            for (CheckRecord& r : records) {
                r.with("members", static_cast<double>(cover.size())).with("collar_width", cover.collar_width());
            }
            if (!field.empty()) {
                std::ofstream f(field);
                require(f.good(), ErrorCode::invalid_input, field + ": cannot open for writing");
                write_field_csv(f, cover, resolution);
            }
            return emit_records(records, ret_output);
        }
        if (*re) {
            const Problem problem = load_problem(problem_file);
            std::ifstream in(result_file);
            require(in.good(), ErrorCode::invalid_input, result_file + ": cannot open file");
            nlohmann::json result;
            try {
                result = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                fail(ErrorCode::invalid_input, result_file + ": " + e.what());
            }
            const double gap = recheck_result(problem, result);
            const double bound = recheck_tol * std::max(1.0, std::abs(result["baryradius"].get<double>()));
            std::cout << ordered_json{{"gap", gap}, {"bound", bound}, {"pass", gap <= bound}}.dump() << '\n';
            return gap <= bound ? ok : verification_failure;
        }
    } catch (const Error& e) {
        std::cerr << "catbary: " << to_string(e.code()) << ": " << e.what() << '\n';
        return e.code() == ErrorCode::non_convergence ? no_convergence : input_error;
    }
    return input_error;
}
