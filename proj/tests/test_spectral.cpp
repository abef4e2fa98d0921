#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "substrat/spectral.hpp"
#include "test_support.hpp"

using namespace substrat;
using namespace testsup;

namespace {

SpectralData eigen_of(const Substitution& s) {
    return pf_eigen(BandedMatrix::from_substitution(s));
}

}  // namespace

TEST_CASE("lambda regression against the paper values") {
    CHECK(std::abs(eigen_of(one_step()).lambda - 3.0) < 1e-6);
    CHECK(std::abs(eigen_of(squared_one_step()).lambda - 9.0) < 1e-6);
    CHECK(std::abs(eigen_of(random_walk()).lambda - 2.0) < 1e-6);
    CHECK(std::abs(eigen_of(drunken()).lambda - 4.0) < 1e-6);
}

TEST_CASE("lambda_K is nondecreasing along the schedule") {
    for (const Substitution& s : {one_step(), random_walk(), drunken()}) {
        SpectralData sd = eigen_of(s);
        for (std::size_t i = 1; i < sd.lambda_history.size(); ++i)
            CHECK(sd.lambda_history[i].second >= sd.lambda_history[i - 1].second - 1e-9);
    }
}

TEST_CASE("gapped fixtures converge by window-Cauchy, flat ones by the fit") {
    CHECK(eigen_of(one_step()).converged_by_cauchy);
    CHECK(eigen_of(squared_one_step()).converged_by_cauchy);
    CHECK(!eigen_of(random_walk()).converged_by_cauchy);
    CHECK(!eigen_of(drunken()).converged_by_cauchy);
}

TEST_CASE("random walk has period 2; the others are aperiodic on the window") {
    CHECK(eigen_of(random_walk()).period == 2);
    CHECK(eigen_of(drunken()).period == 1);
    CHECK(eigen_of(one_step()).period == 1);
}

TEST_CASE("eigenvector shapes: halves, quarter powers, constants") {
    SpectralData os = eigen_of(one_step());
    for (std::int64_t b = 0; b + 1 <= os.interior_hi; ++b)
        CHECK(std::abs(os.left_at(b + 1) / os.left_at(b) - 0.5) < 1e-6);
    for (std::int64_t b = -1; b - 1 >= os.interior_lo; --b)
        CHECK(std::abs(os.left_at(b - 1) / os.left_at(b) - 0.5) < 1e-6);
    CHECK(std::abs(os.left_at(0) / os.left_at(-1) - 1.0) < 1e-6);
    CHECK(os.left_normalization == "sum=1");
    // probability normalization: ell_0 = 1/4 of the paper's display total
    CHECK(std::abs(os.left_at(0) - 0.25) < 1e-6);

    SpectralData sq = eigen_of(squared_one_step());
    // central entries 1/3, 1/3; first step outward is 1/4: ratio 4/3
    CHECK(std::abs(sq.left_at(0) / sq.left_at(1) - (1.0 / 3) / (1.0 / 4)) < 1e-6);
    CHECK(std::abs(sq.left_at(0) / sq.left_at(-1) - 1.0) < 1e-6);
    for (std::int64_t b = 1; b + 1 <= sq.interior_hi; ++b)
        CHECK(std::abs(sq.left_at(b + 1) / sq.left_at(b) - 0.25) < 1e-6);

    for (const Substitution& s : {random_walk(), drunken()}) {
        SpectralData sd = eigen_of(s);
        for (std::int64_t b = sd.interior_lo; b <= sd.interior_hi; ++b) {
            CHECK(std::abs(sd.left_at(b) - sd.left_at(0)) < 1e-6);
            CHECK(std::abs(sd.right_at(b) - 1.0) < 1e-6);  // r_0 = 1 normalization
        }
        CHECK(sd.left_normalization == "max=1");
    }
}

TEST_CASE("letter-negation symmetry transfers to the eigenvector") {
    for (const Substitution& s : {random_walk(), drunken()}) {
        SpectralData sd = eigen_of(s);
        std::int64_t r = std::min(std::abs(sd.interior_lo), std::abs(sd.interior_hi));
        for (std::int64_t b = 0; b <= r; ++b)
            CHECK(std::abs(sd.left_at(b) - sd.left_at(-b)) < 1e-6);
    }
}

TEST_CASE("positivity of every reported entry") {
    for (const Substitution& s : {one_step(), squared_one_step(), random_walk(), drunken()}) {
        SpectralData sd = eigen_of(s);
        for (std::int64_t b = sd.interior_lo; b <= sd.interior_hi; ++b) {
            CHECK(sd.left_at(b) > 0.0);
            CHECK(sd.right_at(b) > 0.0);
        }
    }
}

TEST_CASE("verify_eigen_exact: closed forms have residual exactly zero") {
    for (const Fixture& f :
         {fixture_one_step_forward_two_back(), fixture_squared_one_step_forward_two_back(),
          fixture_random_walk(), fixture_drunken_man()}) {
        Substitution s = make(f);
        ResidualReport rep = verify_eigen_exact(s, *f.closed_form,
                                                LetterInterval{-64 * s.alphabet().stride,
                                                               64 * s.alphabet().stride});
        CHECK(*rep.exact_left_max == 0);
        CHECK(*rep.exact_right_max == 0);
    }
}

TEST_CASE("residual is invariant under rescaling the closed form by 7") {
    Fixture f = fixture_one_step_forward_two_back();
    Substitution s = make(f);
    ClosedFormSpectral scaled = *f.closed_form;
    auto base = scaled.ell;
    scaled.ell = [base](Letter a) { return base(a) * 7; };
    ResidualReport r1 = verify_eigen_exact(s, *f.closed_form, LetterInterval{-32, 32});
    ResidualReport r2 = verify_eigen_exact(s, scaled, LetterInterval{-32, 32});
    CHECK(*r1.exact_left_max == *r2.exact_left_max);
    CHECK(*r2.exact_left_max == 0);
}

TEST_CASE("constant row sums make the all-ones right vector exact") {
    Fixture f = fixture_drunken_man();
    Substitution s = make(f);
    ClosedFormSpectral cf = *f.closed_form;
    cf.right = [](Letter) { return Rational(1); };
    cf.lambda = 4;
    ResidualReport rep = verify_eigen_exact(s, cf, LetterInterval{-40, 40});
    CHECK(*rep.exact_right_max == 0);
}

TEST_CASE("computed spectral data verifies against its own matrix") {
    for (const Substitution& s : {one_step(), drunken()}) {
        SpectralData sd = eigen_of(s);
        ResidualReport rep = verify_eigen(BandedMatrix::from_substitution(s), sd);
        CHECK(rep.float_left_max < 1e-6);
        CHECK(rep.float_right_max < 1e-6);
    }
}

TEST_CASE("a one-way banded matrix is rejected as reducible") {
    BandedMatrix m;
    m.bandwidth = 1;
    m.row = [](std::int64_t i) {
        return std::vector<std::pair<std::int64_t, std::int64_t>>{{i + 1, 2}};
    };
    CHECK_THROWS_WITH_AS(pf_eigen(m), doctest::Contains("NotIrreducibleOnWindow"), Error);
}

TEST_CASE("matvec kernels: serial and parallel agree bitwise") {
    BandedMatrix m = BandedMatrix::from_substitution(one_step());
    BandWindow w(m, 64);
    std::vector<double> x(static_cast<std::size_t>(w.dim()));
    std::uint64_t rng = 17;
    for (auto& v : x) v = double(splitmix64(rng) % 1000) / 999.0 + 0.5;
    std::vector<double> y1, y2, z1, z2;
    w.apply_right(x, y1, ExecMode::serial);
    w.apply_right(x, y2, ExecMode::parallel);
    w.apply_left(x, z1, ExecMode::serial);
    w.apply_left(x, z2, ExecMode::parallel);
    CHECK(y1 == y2);
    CHECK(z1 == z2);
}

TEST_CASE("classify_series on synthetic partial sums") {
    // geometric increments: transient evidence
    std::vector<double> geo;
    double s = 0;
    for (int n = 1; n <= 60; ++n) {
        s += std::pow(0.5, n);
        geo.push_back(s);
    }
    CHECK(classify_series(geo, 20) == RecurrenceClass::transient_evidence);

    // 1/sqrt(n) increments: recurrent evidence
    std::vector<double> root;
    s = 0;
    for (int n = 1; n <= 60; ++n) {
        s += 1.0 / std::sqrt(double(n));
        root.push_back(s);
    }
    CHECK(classify_series(root, 20) == RecurrenceClass::recurrent_evidence);

    CHECK(classify_series({1.0, 2.0}, 20) == RecurrenceClass::inconclusive);
}

TEST_CASE("recurrence classification of the fixtures") {
    {
        SpectralData sd = eigen_of(random_walk());
        RecurrenceVerdict v =
            classify_recurrence(BandedMatrix::from_substitution(random_walk()), sd);
        CHECK(v.period == 2);
        CHECK(v.klass == RecurrenceClass::recurrent_evidence);
        CHECK(v.positive_vs_null == MassClass::null_evidence);
    }
    {
        SpectralData sd = eigen_of(one_step());
        RecurrenceVerdict v = classify_recurrence(BandedMatrix::from_substitution(one_step()), sd);
        CHECK(v.klass == RecurrenceClass::recurrent_evidence);
        CHECK(v.positive_vs_null == MassClass::positive);
    }
    {
        SpectralData sd = eigen_of(drunken());
        RecurrenceVerdict v = classify_recurrence(BandedMatrix::from_substitution(drunken()), sd);
        CHECK(v.klass == RecurrenceClass::recurrent_evidence);
        CHECK(v.positive_vs_null == MassClass::null_evidence);
        // taboo diagnostics are reported alongside
        CHECK(v.taboo_series_partial_sums.size() >= 30);
        CHECK(v.f_series_partial_sums.back() > v.f_series_partial_sums.front());
    }
}
