#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "gradbench/bench.hpp"
#include "gradbench/objectives.hpp"
#include "gradbench/report.hpp"
#include "support/testing.hpp"

using namespace gradbench;
using gradbench::testing::TempDir;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    Result r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::set<std::string> files_in(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
    return names;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("run: BFGS on Rosenbrock converges and writes its trace") {
    TempDir dir;
    const auto r = invoke({"run", "--function", "rosenbrock", "--method", "bfgs", "--x0", "-2,2", "--out", dir.path.string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("termination=") != std::string::npos);
    const Trace t = read_trace_json(dir.path / "rosenbrock_bfgs.json");
    CHECK(norm(t.final_record().point - Vec2{1.0, 1.0}) <= 1e-2);
    CHECK(t.x0 == Vec2{-2.0, 2.0});
}

TEST_CASE("run: exit codes") {
    TempDir dir;
    const std::string out = dir.path.string();
    CHECK(invoke({"run", "--function", "rosenbrock", "--method", "bfgs", "--x0", "nope", "--out", out}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--function", "rosenbrock", "--method", "bfgs", "--x0", "1,2,3", "--out", out}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--function", "nope", "--method", "bfgs", "--x0", "1,2", "--out", out}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--function", "ackley", "--method", "simplex", "--x0", "1,2", "--out", out}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--method", "bfgs", "--x0", "1,2", "--out", out}).code == cli::kExitUsage);
    CHECK(invoke({"run", "--function", "ackley", "--method", "lm", "--x0", "1,2", "--format", "xml", "--out", out}).code ==
          cli::kExitUsage);
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);

    const auto lm = invoke({"run", "--function", "ackley", "--method", "lm", "--x0", "-0.1,-0.45", "--out", out});
    CHECK(lm.code == cli::kExitOk);
    CHECK(norm(read_trace_json(dir.path / "ackley_lm.json").final_record().point) <= 1e-3);

    const auto capped = invoke({"run", "--function", "rosenbrock", "--method", "sd", "--x0", "-2,2", "--max-iter", "5", "--out", out});
    CHECK(capped.code == cli::kExitNotConverged);
    CHECK(read_trace_json(dir.path / "rosenbrock_sd.json").iterations() == 5);
}

TEST_CASE("run: formats and options") {
    TempDir dir;
    const std::string out = dir.path.string();
    CHECK(invoke({"run", "--function", "spring", "--method", "cg-pr", "--x0", "-1,1", "--format", "both", "--line-search",
               "armijo", "--tol", "1e-8", "--out", out})
              .code != cli::kExitUsage);
    CHECK(files_in(dir.path) == std::set<std::string>{"spring_cg-pr.json", "spring_cg-pr.csv"});
    const Trace t = read_trace_json(dir.path / "spring_cg-pr.json");
    CHECK(line_count(read_text_file(dir.path / "spring_cg-pr.csv")) == t.records.size() + 1);

    TempDir csv_only;
    CHECK(invoke({"run", "--function", "himmelblau", "--method", "newton", "--x0", "0,6", "--format", "csv", "--out",
               csv_only.path.string()})
              .code == cli::kExitOk);
    CHECK(files_in(csv_only.path) == std::set<std::string>{"himmelblau_newton.csv"});
}

TEST_CASE("run: GRADBENCH_OUT is the default output directory") {
    TempDir dir;
    ::setenv("GRADBENCH_OUT", dir.path.string().c_str(), 1);
    const auto r = invoke({"run", "--function", "himmelblau", "--method", "bfgs", "--x0", "0,6"});
    ::unsetenv("GRADBENCH_OUT");
    CHECK(r.code == cli::kExitOk);
    CHECK(fs::exists(dir.path / "himmelblau_bfgs.json"));
}

TEST_CASE("matrix: all functions and methods") {
    TempDir dir;
    const auto r = invoke({"matrix", "--function", "all", "--methods", "all", "--out", dir.path.string()});
    CHECK(r.code == cli::kExitOk);
    const auto names = files_in(dir.path);
    CHECK(names.size() == 25);
    CHECK(names.count("summary.csv") == 1);
    std::size_t traces = 0;
    for (const auto& n : names)
        if (n.size() > 5 && n.substr(n.size() - 5) == ".json") ++traces;
    CHECK(traces == 24);
    CHECK(line_count(read_text_file(dir.path / "summary.csv")) == 25);
    CHECK(line_count(r.out) == 24);
    CHECK(names.count("rosenbrock_dfp.json") == 0);
}

TEST_CASE("matrix: single case and unknown names") {
    TempDir dir;
    CHECK(invoke({"matrix", "--function", "rosenbrock", "--methods", "sd", "--out", dir.path.string()}).code == cli::kExitOk);
    CHECK(files_in(dir.path) == std::set<std::string>{"rosenbrock_sd.json", "summary.csv"});
    CHECK(invoke({"matrix", "--function", "bogus", "--out", dir.path.string()}).code == cli::kExitUsage);
    CHECK(invoke({"matrix", "--methods", "bfgs,bogus", "--out", dir.path.string()}).code == cli::kExitUsage);

    TempDir two;
    CHECK(invoke({"matrix", "--function", "ackley", "--methods", "dfp,bfgs", "--out", two.path.string()}).code == cli::kExitOk);
    CHECK(files_in(two.path) == std::set<std::string>{"ackley_dfp.json", "ackley_bfgs.json", "summary.csv"});
}

TEST_CASE("sweep: CG-FR on Rosenbrock has a single basin among converged rows") {
    TempDir dir;
    const auto r = invoke({"sweep", "--function", "rosenbrock", "--method", "cg-fr", "--out", dir.path.string()});
    CHECK(r.code == cli::kExitOk);
    const fs::path csv = dir.path / "sweep_rosenbrock_cg-fr.csv";
    CHECK(line_count(read_text_file(csv)) == 101);
    const SweepResult s = read_sweep_csv(csv);
    std::set<int> labels(s.basin_labels.begin(), s.basin_labels.end());
    labels.erase(-1);
    CHECK(labels == std::set<int>{0});
}

TEST_CASE("sweep: one start at a minimum, Newton scatter, svg output") {
    TempDir dir;
    const std::string out = dir.path.string();
    CHECK(invoke({"sweep", "--function", "rosenbrock", "--method", "bfgs", "--n", "1", "--center", "1,1", "--out", out}).code ==
          cli::kExitOk);
    const SweepResult one = read_sweep_csv(dir.path / "sweep_rosenbrock_bfgs.csv");
    REQUIRE(one.size() == 1);
    CHECK(one.iterations[0] <= 1);
    CHECK(one.basin_labels[0] == 0);

    CHECK(invoke({"sweep", "--function", "himmelblau", "--method", "newton", "--svg", "--out", out}).code == cli::kExitOk);
    const SweepResult h = read_sweep_csv(dir.path / "sweep_himmelblau_newton.csv");
    std::set<int> labels(h.basin_labels.begin(), h.basin_labels.end());
    labels.erase(-1);
    CHECK(labels.size() >= 2);
    CHECK(fs::exists(dir.path / "sweep_himmelblau_newton.svg"));

    CHECK(invoke({"sweep", "--function", "ackley", "--method", "bfgs", "--n", "9", "--sampling", "uniform", "--seed", "4",
               "--size", "2,3", "--out", out})
              .code == cli::kExitOk);
    const SweepResult u = read_sweep_csv(dir.path / "sweep_ackley_bfgs.csv");
    REQUIRE(u.size() == 9);
    for (const auto& p : u.starts) CHECK(Rect{-1, 1, -1.5, 1.5}.contains(p));

    CHECK(invoke({"sweep", "--function", "ackley", "--method", "bfgs", "--sampling", "sobol", "--out", out}).code ==
          cli::kExitUsage);
    CHECK(invoke({"sweep", "--function", "ackley", "--method", "bfgs", "--n", "0", "--out", out}).code == cli::kExitUsage);
}

TEST_CASE("plot: errors, contour and scatter from persisted files") {
    TempDir dir;
    const std::string out = dir.path.string();
    REQUIRE(invoke({"matrix", "--function", "rosenbrock", "--out", out}).code == cli::kExitOk);
    std::vector<std::string> args{"plot", "--kind", "errors", "--out", (dir.path / "errors.svg").string()};
    for (const char* m : {"sd", "cg-fr", "cg-pr", "newton", "bfgs", "lm"}) {
        args.push_back("--trace");
        args.push_back((dir.path / (std::string("rosenbrock_") + m + ".json")).string());
    }
    CHECK(invoke(args).code == cli::kExitOk);
    const std::string svg = read_text_file(dir.path / "errors.svg");
    std::size_t series = 0;
    for (auto pos = svg.find("class=\"error-series\""); pos != std::string::npos; pos = svg.find("class=\"error-series\"", pos + 1))
        ++series;
    CHECK(series == 6);

    args[2] = "contour";
    args[4] = (dir.path / "contour.svg").string();
    CHECK(invoke(args).code == cli::kExitOk);
    CHECK(read_text_file(dir.path / "contour.svg").find("class=\"trajectory\"") != std::string::npos);

    REQUIRE(invoke({"sweep", "--function", "himmelblau", "--method", "bfgs", "--n", "9", "--out", out}).code == cli::kExitOk);
    CHECK(invoke({"plot", "--kind", "scatter", "--sweep", (dir.path / "sweep_himmelblau_bfgs.csv").string(), "--out",
               (dir.path / "scatter.svg").string()})
              .code == cli::kExitOk);
    CHECK(fs::exists(dir.path / "scatter.svg"));
}

TEST_CASE("plot: usage and file errors") {
    TempDir dir;
    const std::string svg = (dir.path / "x.svg").string();
    const auto empty = invoke({"plot", "--kind", "errors", "--out", svg});
    CHECK(empty.code == cli::kExitUsage);
    CHECK(empty.err.find("EmptyPayload") != std::string::npos);
    CHECK(invoke({"plot", "--kind", "errors", "--trace", (dir.path / "missing.json").string(), "--out", svg}).code ==
          cli::kExitUsage);
    write_text_file(dir.path / "bad.json", "{\"schema\":\"other\"}");
    CHECK(invoke({"plot", "--kind", "errors", "--trace", (dir.path / "bad.json").string(), "--out", svg}).code ==
          cli::kExitUsage);
    CHECK(invoke({"plot", "--kind", "pie", "--trace", (dir.path / "bad.json").string(), "--out", svg}).code == cli::kExitUsage);
    CHECK_FALSE(fs::exists(svg));
}

TEST_CASE("oracle: Himmelblau has four minima") {
    const auto r = invoke({"oracle", "--function", "himmelblau"});
    CHECK(r.code == cli::kExitOk);
    std::istringstream in(r.out);
    std::string line;
    int minima = 0;
    while (std::getline(in, line)) {
        if (line.rfind("minimum", 0) != 0) continue;
        ++minima;
        const auto fpos = line.find("f=");
        REQUIRE(fpos != std::string::npos);
        CHECK(std::stod(line.substr(fpos + 2)) < 1e-6);
    }
    CHECK(minima == 4);
    CHECK(invoke({"oracle", "--function", "nope"}).code == cli::kExitUsage);
}

TEST_CASE("identical invocations give byte-identical files") {
    TempDir a, b;
    for (const auto* dir : {&a, &b}) {
        const std::string out = dir->path.string();
        REQUIRE(invoke({"matrix", "--function", "spring", "--out", out}).code == cli::kExitOk);
        REQUIRE(invoke({"sweep", "--function", "ackley", "--method", "cg-pr", "--n", "16", "--sampling", "uniform", "--seed",
                     "11", "--svg", "--out", out})
                    .code == cli::kExitOk);
        REQUIRE(invoke({"plot", "--kind", "contour", "--trace", out + "/spring_bfgs.json", "--trace", out + "/spring_lm.json",
                     "--out", out + "/c.svg"})
                    .code == cli::kExitOk);
    }
    const auto names = files_in(a.path);
    CHECK(names == files_in(b.path));
    for (const auto& n : names) {
        CAPTURE(n);
        CHECK(read_text_file(a.path / n) == read_text_file(b.path / n));
    }
}

TEST_CASE("every subcommand's help lists all of its flags") {
    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"run", {"--function", "--method", "--x0", "--tol", "--max-iter", "--line-search", "--out", "--format"}},
        {"matrix", {"--function", "--methods", "--out"}},
        {"sweep", {"--function", "--method", "--center", "--size", "--n", "--sampling", "--seed", "--out", "--svg"}},
        {"plot", {"--trace", "--sweep", "--kind", "--out", "--metric", "--resolution", "--title"}},
        {"oracle", {"--function", "--resolution", "--rounds"}},
    };
    for (const auto& [sub, flags] : expected) {
        CAPTURE(sub);
        const auto r = invoke({sub, "--help"});
        CHECK(r.code == cli::kExitOk);
        for (const auto& f : flags) {
            CAPTURE(f);
            CHECK(r.out.find(f) != std::string::npos);
        }
        const auto bad = invoke({sub, "--definitely-not-a-flag"});
        CHECK(bad.code == cli::kExitUsage);
        CHECK_FALSE(bad.err.empty());
    }
    const auto top = invoke({"--help"});
    CHECK(top.code == cli::kExitOk);
    for (const char* sub : {"run", "matrix", "sweep", "plot", "oracle"}) CHECK(top.out.find(sub) != std::string::npos);
}
