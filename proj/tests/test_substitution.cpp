#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "substrat/io.hpp"
#include "test_support.hpp"

using namespace substrat;
using namespace testsup;

TEST_CASE("drunken man validates with its derived constants") {
    Substitution s = drunken();
    CHECK(s.size() == 2);
    CHECK(s.max_length() == 4);
    CHECK(s.constant_length());
    CHECK(s.band() == 1);
}

TEST_CASE("one-step-forward-two-back validates; derived constants") {
    Substitution s = one_step();
    // size computed per definition: every image letter is within distance 1
    CHECK(s.size() == 1);
    CHECK(s.max_length() == 3);
    CHECK(s.constant_length());
}

TEST_CASE("image shorter than two letters is rejected") {
    SubstitutionDef def;
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {0}}};
    CHECK_THROWS_WITH_AS(Substitution::validate(def), doctest::Contains("template length < 2"),
                         Error);
}

TEST_CASE("region gaps and overlaps are rejected") {
    SubstitutionDef def;
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::le, -2, {}}, {-1, 1}},
                 RegionRule{Region{Region::Kind::ge, 2, {}}, {-1, 1}}};
    CHECK_THROWS_AS(Substitution::validate(def), Error);  // -1, 0, 1 uncovered
    def.exceptions[-1] = Word{-2, 0};
    def.exceptions[0] = Word{-1, 1};
    def.exceptions[1] = Word{0, 2};
    CHECK_NOTHROW(Substitution::validate(def));

    SubstitutionDef overlap;
    overlap.alphabet = Alphabet{1, 0};
    overlap.rules = {RegionRule{Region{Region::Kind::le, 0, {}}, {-1, 1}},
                     RegionRule{Region{Region::Kind::le, -2, {}}, {-1, 1, 1}}};
    CHECK_THROWS_AS(Substitution::validate(overlap), Error);
}

TEST_CASE("cross-rule injectivity collisions are caught exactly") {
    // sigma(n) = (n, n+2) for n <= 0 and (n-2, n) for n >= 1: sigma(0) = (0,2) = sigma(2)
    SubstitutionDef def;
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::le, 0, {}}, {0, 2}},
                 RegionRule{Region{Region::Kind::ge, 1, {}}, {-2, 0}}};
    CHECK_THROWS_WITH_AS(Substitution::validate(def), doctest::Contains("InjectivityViolation"),
                         Error);
}

TEST_CASE("exception collisions are caught on the window") {
    SubstitutionDef def;
    def.alphabet = Alphabet{1, 0};
    def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {-1, 1}}};
    def.exceptions[5] = Word{3, 5};  // equals the rule image of 4
    CHECK_THROWS_WITH_AS(Substitution::validate(def),
                         doctest::Contains("InjectivityViolation"), Error);
}

TEST_CASE("apply: drunken man images and concatenation") {
    Substitution s = drunken();
    CHECK(s.image(0) == Word{-2, 0, 0, 2});
    CHECK(s.apply(Word{}) == Word{});
    CHECK(s.apply(Word{0, 2}) == Word{-2, 0, 0, 2, 0, 2, 2, 4});
    CHECK_THROWS_AS(s.image(1), Error);  // off the 2Z lattice
}

TEST_CASE("apply: example with exceptions concatenates exception rows") {
    Substitution s = one_step();
    CHECK(s.apply(Word{-1, 0}) == Word{-2, -1, 0, -1, 0, 1});
}

TEST_CASE("iterate: identity, depth two, and cap") {
    Substitution rw = random_walk();
    CHECK(rw.iterate(7, 0) == Word{7});
    CHECK(rw.iterate(0, 2) == Word{-2, 0, 0, 2});
    Substitution dm = drunken();
    CHECK(dm.iterate(0, 3).size() == 64);
    CHECK_THROWS_WITH_AS(dm.iterate(0, 20, 1000), doctest::Contains("LengthCapExceeded"), Error);
}

TEST_CASE("abelianize rows match the paper rules") {
    Substitution rw = random_walk();
    auto r = rw.abelianize_row(0);
    CHECK(r == std::map<Letter, std::int64_t>{{-1, 1}, {1, 1}});
    Substitution dm = drunken();
    CHECK(dm.abelianize_row(0) == std::map<Letter, std::int64_t>{{-2, 1}, {0, 2}, {2, 1}});
    Substitution os = one_step();
    CHECK(os.abelianize_row(1) == std::map<Letter, std::int64_t>{{0, 2}, {2, 1}});
}

TEST_CASE("band property and length law for iterates") {
    for (const Substitution& s : {drunken(), one_step(), random_walk()}) {
        for (Letter a = -2; a <= 2; ++a) {
            if (!s.alphabet().contains(a)) continue;
            for (int n = 0; n <= 5; ++n) {
                Word w = s.iterate(a, n);
                CHECK(static_cast<std::int64_t>(w.size()) == s.iterate_length(a, n));
                for (Letter x : w) CHECK(std::abs(x - a) <= s.size() * n);
                if (n >= 1) {
                    std::int64_t total = 0;
                    for (const auto& [b, m] : s.abelianize_row(a))
                        total += m * s.iterate_length(b, n - 1);
                    CHECK(total == s.iterate_length(a, n));
                }
            }
        }
    }
}

TEST_CASE("constant length substitutions have |sigma^n(a)| = L^n") {
    Substitution dm = drunken();
    for (int n = 0; n <= 6; ++n) CHECK(dm.iterate_length(2, n) == std::int64_t(std::pow(4, n)));
}

TEST_CASE("segment extraction agrees with full materialization") {
    Substitution s = one_step();
    Word full = s.iterate(0, 6);
    Word seg = s.segment_of_iterate(0, 6, 100, 200);
    CHECK(seg == Word(full.begin() + 100, full.begin() + 200));
}

TEST_CASE("language: single letters, closure, and the empty-word case") {
    Substitution dm = drunken();
    auto lang1 = generate_language(dm, 1, LetterInterval{-8, 8});
    for (Letter a = -8; a <= 8; a += 2) CHECK(lang1.count(Word{a}));
    CHECK(lang1.count(Word{}));

    auto lang0 = generate_language(dm, 0, LetterInterval{-4, 4});
    CHECK(lang0 == std::set<Word>{Word{}});
}

TEST_CASE("language: random walk pairs against the direct oracle") {
    Substitution rw = random_walk();
    auto lang = generate_language(rw, 2, LetterInterval{-3, 3});
    CHECK(lang.count(Word{0, 2}));
    CHECK(lang.count(Word{-1, 1}));
    // parity: adjacent letters always have even difference
    CHECK(!lang.count(Word{0, 1}));
    // (0,0) straddles sigma(-1)|sigma(1) inside sigma^2(0) = (-2,0,0,2)
    CHECK(lang.count(Word{0, 0}));

    auto oracle = oracle_language(rw, -9, 9, 6, 2);
    for (const Word& w : lang)
        if (std::all_of(w.begin(), w.end(), [](Letter x) { return -3 <= x && x <= 3; }))
            CHECK(oracle.count(w));
    for (const Word& w : oracle)
        if (std::all_of(w.begin(), w.end(), [](Letter x) { return -3 <= x && x <= 3; }))
            CHECK(lang.count(w));
}

TEST_CASE("language output is factor-closed") {
    Substitution s = one_step();
    auto lang = generate_language(s, 4, LetterInterval{-6, 6});
    for (const Word& w : lang) {
        for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i + 1; j <= w.size(); ++j)
                CHECK(lang.count(Word(w.begin() + i, w.begin() + j)));
    }
}

TEST_CASE("definition round-trip: apply of a single letter is the rule image") {
    for (const Substitution& s : {drunken(), one_step(), squared_one_step()}) {
        for (Letter a = -20; a <= 20; ++a) {
            if (!s.alphabet().contains(a)) continue;
            CHECK(s.apply(Word{a}) == s.image(a));
        }
    }
}

TEST_CASE("json schema round-trips the shipped fixtures") {
    for (const Fixture& f : all_fixtures()) {
        SubstitutionDef parsed = parse_substitution_text(substitution_to_json(f.def));
        CHECK(substitution_to_json(parsed) == substitution_to_json(f.def));
        CHECK_NOTHROW(Substitution::validate(parsed));
    }
}

TEST_CASE("json schema rejections") {
    CHECK_THROWS_AS(parse_substitution_text("{"), Error);
    CHECK_THROWS_AS(parse_substitution_text(R"({"alphabet":{"stride":1,"residue":0},"junk":1})"),
                    Error);
    CHECK_THROWS_AS(
        parse_substitution_text(
            R"({"alphabet":{"stride":1,"residue":0},"rules":[{"region":{"kind":"weird"},"template":[1,2]}]})"),
        Error);
    CHECK_THROWS_AS(parse_substitution_text(R"({"rules":[]})"), Error);  // missing alphabet
}

TEST_CASE("nine-letter templates parse and validate") {
    Fixture f = fixture_squared_one_step_forward_two_back();
    Substitution s = Substitution::validate(parse_substitution_text(substitution_to_json(f.def)));
    CHECK(s.max_length() == 9);
    CHECK(s.size() == 2);
    CHECK(s.image(4) == Word{2, 2, 4, 2, 2, 4, 4, 4, 6});
    CHECK(s.image(-6) == Word{-8, -6, -6, -6, -4, -4, -6, -4, -4});
}
