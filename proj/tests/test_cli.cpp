// End-to-end CLI tests: run the sdcalc binary (path from SDCALC_BIN) against
// golden help texts, the documented exit-code contract, and the determinism
// guarantee. GOLDEN_DIR points at tests/golden.

#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string bin() {
    const char* b = std::getenv("SDCALC_BIN");
    REQUIRE_MESSAGE(b != nullptr, "SDCALC_BIN must point at the sdcalc binary");
    return b;
}

std::string golden_dir() {
    const char* g = std::getenv("GOLDEN_DIR");
    REQUIRE_MESSAGE(g != nullptr, "GOLDEN_DIR must point at tests/golden");
    return g;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = bin() + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

struct TmpDir {
    std::string path = "cli_test_tmp";
    TmpDir() { (void)std::system(("mkdir -p " + path).c_str()); }
};

}  // namespace

TEST_CASE("every subcommand ships the documented help text") {
    const char* subs[] = {"project", "frames", "op",     "evolve",
                          "tube-frames", "tube-op", "expand", "verify"};
    RunResult main_help = run("--help");
    CHECK(main_help.exit_code == 0);
    CHECK(main_help.out == slurp(golden_dir() + "/help_main.txt"));
    for (const char* s : subs) {
        RunResult r = run(std::string(s) + " --help");
        CAPTURE(s);
        CHECK(r.exit_code == 0);
        CHECK(r.out == slurp(golden_dir() + "/help_" + s + ".txt"));
    }
}

TEST_CASE("exit codes follow the contract") {
    TmpDir tmp;
    CHECK(run("nonsense").exit_code == 1);
    CHECK(run("project --geom does_not_exist.json --points x.csv --out y.csv").exit_code == 1);
    write_file(tmp.path + "/bad.json", "{\"kind\": 42}");
    CHECK(run("project --geom " + tmp.path + "/bad.json --points x.csv --out y.csv").exit_code ==
          1);
}

TEST_CASE("plane projection reproduces sigma = z") {
    TmpDir tmp;
    write_file(tmp.path + "/plane.json", R"json({"kind":"surface","builtin":"plane"})json");
    write_file(tmp.path + "/pt.csv", "x,y,z\n3,4,-0.5\n");
    RunResult r = run("project --geom " + tmp.path + "/plane.json --points " + tmp.path +
                      "/pt.csv --out " + tmp.path + "/out.csv");
    CHECK(r.exit_code == 0);
    std::string csv = slurp(tmp.path + "/out.csv");
    CHECK(csv.find("3,4,-0.5,3,4,0,0,0,1,0") != std::string::npos);
}

TEST_CASE("verify runs are byte-identical for equal seeds and differ across seeds") {
    TmpDir tmp;
    write_file(tmp.path + "/sphere.json",
               R"json({"kind":"surface","builtin":"sphere","params":[1.0]})json");
    std::string base = "verify --geom " + tmp.path + "/sphere.json --suite surface --points 30";
    RunResult a = run(base + " --seed 7 --out " + tmp.path + "/a.json");
    RunResult b = run(base + " --seed 7 --out " + tmp.path + "/b.json");
    RunResult c = run(base + " --seed 8 --out " + tmp.path + "/c.json");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(c.exit_code == 0);
    std::string ja = slurp(tmp.path + "/a.json");
    CHECK(!ja.empty());
    CHECK(ja == slurp(tmp.path + "/b.json"));
    CHECK(ja != slurp(tmp.path + "/c.json"));

    // tolerance failures exit 2
    RunResult t = run(base + " --seed 7 --tol 1e-20 --out " + tmp.path + "/d.json");
    CHECK(t.exit_code == 2);
}

TEST_CASE("tube-op evaluates fields supplied as JSON specs") {
    TmpDir tmp;
    write_file(tmp.path + "/helix.json",
               R"json({"kind":"curve","builtin":"helix","params":[1.0,0.5]})json");
    write_file(tmp.path + "/f.json",
               R"json({"kind":"scalar","pullback":true,"components":["x*x+y*y+z*z"]})json");
    write_file(tmp.path + "/pts.csv", "s,theta,sigma\n0.4,1.0,0.2\n");
    RunResult r = run("tube-op --geom " + tmp.path + "/helix.json --op lap --field " + tmp.path +
                      "/f.json --points " + tmp.path + "/pts.csv --out " + tmp.path + "/out.csv");
    CHECK(r.exit_code == 0);
    std::string csv = slurp(tmp.path + "/out.csv");
    // Laplacian of |x|^2 is 6 everywhere
    CHECK(csv.find(",6\n") != std::string::npos);
}
