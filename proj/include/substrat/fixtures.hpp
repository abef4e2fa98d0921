// fixtures.hpp -- the four built-in substitutions shipped with the toolkit,
// together with their closed-form Perron-Frobenius data where known.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "substrat/rational.hpp"
#include "substrat/substitution.hpp"

namespace substrat {

struct Fixture {
    std::string id;  // file stem under fixtures/
    SubstitutionDef def;
    std::optional<ClosedFormSpectral> closed_form;
};

/// one_step_forward_two_back: -1 -> (-2,-1,0); 0 -> (-1,0,1);
/// n -> (n-1)(n+1)(n+1) for n <= -2; n -> (n-1)(n-1)(n+1) for n >= 1.
/// lambda = 3, ell halves away from the two unit entries at -1, 0.
Fixture fixture_one_step_forward_two_back();

/// squared_one_step_forward_two_back on 2Z: exceptions at -2 and 0, the
/// printed nine-letter template for n >= 2 and its mirror for n <= -4.
/// lambda = 9, ell has central entries 1/3 and quarter powers outward.
Fixture fixture_squared_one_step_forward_two_back();

/// random_walk: n -> (n-1)(n+1). lambda = 2, constant eigenvectors,
/// period 2.
Fixture fixture_random_walk();

/// drunken_man on 2Z: n -> (n-2) n n (n+2). lambda = 4, constant
/// eigenvectors.
Fixture fixture_drunken_man();

const std::vector<Fixture>& all_fixtures();
const Fixture* find_fixture(const std::string& id);

}  // namespace substrat
