// measure.hpp -- the tail-invariant measure on path cylinders and the
// induced shift-invariant measure on the subshift, evaluated through
// occurrence counts against the left Perron-Frobenius data.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "substrat/rational.hpp"
#include "substrat/spectral.hpp"
#include "substrat/substitution.hpp"

namespace substrat {

struct TotalMassResult {
    enum class Verdict { finite, divergent_evidence, inconclusive };
    Verdict verdict = Verdict::inconclusive;
    double value = 0.0;                    // finite: extrapolated total
    std::optional<Rational> exact_value;   // rational mode with exact tails
    std::vector<std::pair<std::int64_t, double>> partials;  // (K, sum over [-K, K])
};

struct ShiftMeasureEstimate {
    Word word;
    double estimate = 0.0;
    std::optional<Rational> exact_estimate;
    std::vector<double> history;            // per-depth estimates nu_n([w]), n = 1..depth
    std::vector<Rational> exact_history;    // rational mode only
    double achieved_tol = 0.0;
    int depth = 0;
    bool converged = false;
    double boundary_error_bound = 0.0;  // (|w|-1) * sum_a ell_a / lambda^depth
    std::optional<TotalMassResult> mass;  // when called on the empty word
};

struct BirkhoffResult {
    double frequency = 0.0;
    double predicted = 0.0;  // probability-normalized cylinder measure
    std::int64_t orbit_len = 0;
    std::int64_t occurrences = 0;
};

struct MeasureOptions {
    int n_max = 24;
    int min_depth = 1;  // do not stop earlier, even if already settled
    double tol = 1e-8;
    std::vector<std::int64_t> mass_schedule{16, 32, 64, 128};
    ExecMode exec = ExecMode::parallel;
};

/// Binds a substitution to spectral data; in rational mode (closed-form
/// fixtures) every banded sum is exact and the measure identities hold with
/// residual exactly zero.
class MeasureContext {
  public:
    MeasureContext(Substitution s, ClosedFormSpectral cf);
    MeasureContext(Substitution s, SpectralData sd);

    bool exact() const { return cf_.has_value(); }
    const Substitution& substitution() const { return s_; }
    double lambda() const;
    double ell(Letter a) const;
    Rational ell_exact(Letter a) const;
    Rational lambda_exact() const;
    /// Raw letters on which ell is available (whole lattice in rational mode).
    LetterInterval support() const;

    /// mu([e(w, v)]) = ell_v / lambda^n; independent of the start vertex.
    double cylinder_measure_path(Letter v, int n) const;
    Rational cylinder_measure_path_exact(Letter v, int n) const;

    /// sum_u f_uv ell_u / lambda^(n+1) - ell_v / lambda^n (a finite sum).
    double consistency_residual(Letter v, int n) const;
    Rational consistency_residual_exact(Letter v, int n) const;

    TotalMassResult total_mass(const std::vector<std::int64_t>& schedule = {16, 32, 64, 128}) const;

    /// nu_n([w]) = sum_a occ(w, sigma^n(a)) ell_a / lambda^n over the letter
    /// window, via the spanning-gram transfer (no word materialization).
    ShiftMeasureEstimate cylinder_measure_shift(const Word& w, const LetterInterval& window,
                                                const MeasureOptions& opts = {}) const;

    /// | nu([w]) - sum_b nu([b w]) | over admissible one-letter extensions.
    double shift_invariance_residual(const Word& w, const LetterInterval& window,
                                     const MeasureOptions& opts = {}) const;

    /// Empirical frequency of w along orbit positions [0, orbit_len) of the
    /// seed window, against the probability-normalized prediction.
    BirkhoffResult birkhoff_check(const Word& w, std::int64_t orbit_len,
                                  const WindowedSequence& seed,
                                  const LetterInterval& window,
                                  const MeasureOptions& opts = {}) const;

  private:
    Substitution s_;
    std::optional<ClosedFormSpectral> cf_;
    std::optional<SpectralData> sd_;
};

/// Seed for birkhoff_check: the centered stretch of sigma^depth(a) long
/// enough for `need` orbit steps, anchored so position 0 is its left end.
WindowedSequence birkhoff_seed(const Substitution& s, Letter a, int depth, std::int64_t need);

}  // namespace substrat
