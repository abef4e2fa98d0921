// rational.hpp -- exact arithmetic mode for closed-form spectral fixtures.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <optional>

#include "substrat/core.hpp"

namespace substrat {

using Rational = boost::multiprecision::cpp_rational;

/// Closed-form Perron-Frobenius data (exact), indexed by raw letters.
struct ClosedFormSpectral {
    Rational lambda;
    std::function<Rational(Letter)> ell;    // left eigenvector entry
    std::function<Rational(Letter)> right;  // right eigenvector entry
    std::optional<Rational> ell_total;      // exact total mass when summable
};

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace substrat
