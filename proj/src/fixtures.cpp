#include "substrat/fixtures.hpp"

namespace substrat {

namespace {

Rational pow2(std::int64_t k) {  // 2^k for k >= 0
    Rational r = 1;
    for (std::int64_t i = 0; i < k; ++i) r *= 2;
    return r;
}

}  // namespace

Fixture fixture_one_step_forward_two_back() {
    Fixture f;
    f.id = "one_step_forward_two_back";
    f.def.name = "one_step_forward_two_back";
    f.def.alphabet = Alphabet{1, 0};
    f.def.rules = {
        RegionRule{Region{Region::Kind::le, -2, {}}, {-1, +1, +1}},
        RegionRule{Region{Region::Kind::ge, 1, {}}, {-1, -1, +1}},
    };
    f.def.exceptions[-1] = Word{-2, -1, 0};
    f.def.exceptions[0] = Word{-1, 0, 1};

    ClosedFormSpectral cf;
    cf.lambda = 3;
    cf.ell = [](Letter b) -> Rational {
        return b >= 0 ? Rational(1) / pow2(b) : Rational(1) / pow2(-b - 1);
    };
    cf.right = [](Letter) -> Rational { return 1; };
    cf.ell_total = 4;  // two geometric halves summing to 2 each
    f.closed_form = cf;
    return f;
}

Fixture fixture_squared_one_step_forward_two_back() {
    Fixture f;
    f.id = "squared_one_step_forward_two_back";
    f.def.name = "squared_one_step_forward_two_back";
    f.def.alphabet = Alphabet{2, 0};
    f.def.rules = {
        RegionRule{Region{Region::Kind::ge, 2, {}}, {-2, -2, 0, -2, -2, 0, 0, 0, +2}},
        RegionRule{Region{Region::Kind::le, -4, {}}, {-2, 0, 0, 0, +2, +2, 0, +2, +2}},
    };
    f.def.exceptions[-2] = Word{-4, -4, -2, -2, -2, -4, -2, -2, 0};
    f.def.exceptions[0] = Word{-2, 0, 0, 0, 2, 2, 0, 0, 2};

    ClosedFormSpectral cf;
    cf.lambda = 9;
    cf.ell = [](Letter b) -> Rational {
        std::int64_t k = b / 2;  // normalized index
        if (k == 0 || k == -1) return Rational(1, 3);
        std::int64_t steps = k >= 1 ? k : (-k - 1);
        return Rational(1) / pow2(2 * steps);  // quarter powers outward
    };
    cf.right = [](Letter) -> Rational { return 1; };
    // 2 * (1/3) + 2 * (1/4 + 1/16 + ...) = 2/3 + 2/3
    cf.ell_total = Rational(4, 3);
    f.closed_form = cf;
    return f;
}

Fixture fixture_random_walk() {
    Fixture f;
    f.id = "random_walk";
    f.def.name = "random_walk";
    f.def.alphabet = Alphabet{1, 0};
    f.def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {-1, +1}}};

    ClosedFormSpectral cf;
    cf.lambda = 2;
    cf.ell = [](Letter) -> Rational { return Rational(1, 2); };
    cf.right = [](Letter) -> Rational { return Rational(1, 2); };
    f.closed_form = cf;
    return f;
}

Fixture fixture_drunken_man() {
    Fixture f;
    f.id = "drunken_man";
    f.def.name = "drunken_man";
    f.def.alphabet = Alphabet{2, 0};
    f.def.rules = {RegionRule{Region{Region::Kind::all, 0, {}}, {-2, 0, 0, +2}}};

    ClosedFormSpectral cf;
    cf.lambda = 4;
    cf.ell = [](Letter) -> Rational { return 1; };
    cf.right = [](Letter) -> Rational { return 1; };
    f.closed_form = cf;
    return f;
}

const std::vector<Fixture>& all_fixtures() {
    static const std::vector<Fixture> fx = {
        fixture_one_step_forward_two_back(),
        fixture_squared_one_step_forward_two_back(),
        fixture_random_walk(),
        fixture_drunken_man(),
    };
    return fx;
}

const Fixture* find_fixture(const std::string& id) {
    for (const Fixture& f : all_fixtures())
        if (f.id == id) return &f;
    return nullptr;
}

}  // namespace substrat
