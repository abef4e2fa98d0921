#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "substrat/cli_lib.hpp"
#include "substrat/io.hpp"
#include "test_support.hpp"

using namespace substrat;

namespace {

int run_cfg(JobConfig cfg, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    int rc = run(cfg, out, err);
    if (out_text) *out_text = out.str() + err.str();
    return rc;
}

std::string fixture_path(const std::string& id) { return "fixtures/" + id + ".json"; }

}  // namespace

TEST_CASE("the shipped fixture files match the built-in definitions") {
    for (const Fixture& f : all_fixtures()) {
        SubstitutionDef parsed = parse_substitution_file(fixture_path(f.id));
        CHECK(substitution_to_json(parsed) == substitution_to_json(f.def));
    }
}

TEST_CASE("validate succeeds on every shipped fixture") {
    for (const Fixture& f : all_fixtures()) {
        JobConfig cfg;
        cfg.command = "validate";
        cfg.subject = fixture_path(f.id);
        std::string text;
        CHECK(run_cfg(cfg, &text) == 0);
        CHECK(text.find("validation: ok") != std::string::npos);
    }
}

TEST_CASE("decompose below the cut bound exits 2 naming the bound") {
    JobConfig cfg;
    cfg.command = "decompose";
    cfg.subject = fixture_path("drunken_man");
    cfg.word = Word{0, 2};
    std::string text;
    CHECK(run_cfg(cfg, &text) == 2);
    CHECK(text.find("N_sigma") != std::string::npos);
}

TEST_CASE("decompose of the worked example prints head and tail") {
    JobConfig cfg;
    cfg.command = "decompose";
    cfg.subject = fixture_path("drunken_man");
    cfg.word = Word{0, 2, 0, 2, 2};
    std::string text;
    CHECK(run_cfg(cfg, &text) == 0);
    CHECK(text.find("head: (0,2)") != std::string::npos);
    CHECK(text.find("tail: (0,2,2)") != std::string::npos);
}

TEST_CASE("a non-left-determined substitution refutes with exit 3") {
    std::filesystem::create_directories("build/test_tmp");
    SubstitutionDef def;
    def.name = "doubling";
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {0, 0}}};
    write_file("build/test_tmp/doubling.json", substitution_to_json(def));
    JobConfig cfg;
    cfg.command = "nsigma";
    cfg.subject = "build/test_tmp/doubling.json";
    cfg.window = 10;
    cfg.max_len = 6;
    std::string text;
    CHECK(run_cfg(cfg, &text) == 3);
    CHECK(text.find("refuted") != std::string::npos);
    CHECK(text.find("counterexample") != std::string::npos);
}

TEST_CASE("schema violations exit 2; missing files exit 5") {
    std::filesystem::create_directories("build/test_tmp");
    write_file("build/test_tmp/bad_key.json",
               R"({"alphabet":{"stride":1,"residue":0},"surprise":[]})");
    JobConfig cfg;
    cfg.command = "validate";
    cfg.subject = "build/test_tmp/bad_key.json";
    CHECK(run_cfg(cfg) == 2);

    write_file("build/test_tmp/overlap.json", R"({
      "alphabet": {"stride": 1, "residue": 0},
      "rules": [
        {"region": {"kind": "le", "bound": 0}, "template": [-1, 1]},
        {"region": {"kind": "le", "bound": -2}, "template": [-1, 1, 1]},
        {"region": {"kind": "ge", "bound": 1}, "template": [-1, 1]}
      ]})");
    cfg.subject = "build/test_tmp/overlap.json";
    std::string text;
    CHECK(run_cfg(cfg, &text) == 2);
    CHECK(text.find("OverlappingRegions") != std::string::npos);

    cfg.subject = "no/such/file.json";
    CHECK(run_cfg(cfg) == 5);
}

TEST_CASE("a reducible matrix fails spectral with exit 2") {
    std::filesystem::create_directories("build/test_tmp");
    SubstitutionDef def;
    def.name = "one_way";
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {1, 1}}};
    write_file("build/test_tmp/one_way.json", substitution_to_json(def));
    JobConfig cfg;
    cfg.command = "spectral";
    cfg.subject = "build/test_tmp/one_way.json";
    cfg.mode = "float";
    std::string text;
    CHECK(run_cfg(cfg, &text) == 2);
    CHECK(text.find("NotIrreducibleOnWindow") != std::string::npos);
}

TEST_CASE("rational mode requires a recognized fixture") {
    std::filesystem::create_directories("build/test_tmp");
    SubstitutionDef def;
    def.name = "custom";
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {-1, 0, 1}}};
    write_file("build/test_tmp/custom.json", substitution_to_json(def));
    JobConfig cfg;
    cfg.command = "measure";
    cfg.subject = "build/test_tmp/custom.json";
    cfg.word = Word{0};
    cfg.mode = "rational";
    CHECK(run_cfg(cfg) == 2);
}

TEST_CASE("SUBSTRAT_FIXTURES resolves bare fixture ids") {
    setenv("SUBSTRAT_FIXTURES", "fixtures", 1);
    JobConfig cfg;
    cfg.command = "validate";
    cfg.subject = "drunken_man";
    CHECK(run_cfg(cfg) == 0);
    unsetenv("SUBSTRAT_FIXTURES");
}

TEST_CASE("report runs on every fixture and repeated CSV output is byte-identical") {
    for (const Fixture& f : all_fixtures()) {
        std::string dir1 = "build/test_tmp/rep1_" + f.id;
        std::string dir2 = "build/test_tmp/rep2_" + f.id;
        std::filesystem::create_directories(dir1);
        std::filesystem::create_directories(dir2);
        JobConfig cfg;
        cfg.command = "report";
        cfg.subject = fixture_path(f.id);
        if (f.id == "squared_one_step_forward_two_back") {
            cfg.window = 36;
            cfg.max_len = 10;
        }
        cfg.out_dir = dir1;
        std::string t1, t2;
        REQUIRE(run_cfg(cfg, &t1) == 0);
        cfg.out_dir = dir2;
        REQUIRE(run_cfg(cfg, &t2) == 0);
        CHECK(t1 == t2);
        for (const char* name : {"/eigenvector.csv", "/towers.csv", "/measure.csv"})
            CHECK(read_file(dir1 + name) == read_file(dir2 + name));
        CHECK(t1.find("lambda") != std::string::npos);
        CHECK(t1.find("N_sigma") != std::string::npos);
    }
}

TEST_CASE("diagram writes valid DOT") {
    std::filesystem::create_directories("build/test_tmp");
    JobConfig cfg;
    cfg.command = "diagram";
    cfg.subject = fixture_path("random_walk");
    cfg.dot_file = "build/test_tmp/rw.dot";
    CHECK(run_cfg(cfg) == 0);
    std::string dot = read_file("build/test_tmp/rw.dot");
    CHECK(dot.find("digraph") == 0);
}

TEST_CASE("spectral report quotes the paper value for the fixture") {
    JobConfig cfg;
    cfg.command = "spectral";
    cfg.subject = fixture_path("one_step_forward_two_back");
    std::string text;
    REQUIRE(run_cfg(cfg, &text) == 0);
    CHECK(text.find("lambda: 2.99999") != std::string::npos);
    CHECK(text.find("residual (exact): left 0, right 0") != std::string::npos);
}
