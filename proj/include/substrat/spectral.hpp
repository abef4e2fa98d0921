// spectral.hpp -- generalized Perron-Frobenius data for banded infinite
// nonnegative matrices via window truncation, and the recurrence
// classification diagnostics.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "substrat/banded.hpp"
#include "substrat/rational.hpp"

namespace substrat {

struct SpectralOptions {
    std::vector<std::int64_t> schedule{16, 32, 64, 128};
    double tol = 1e-8;
    std::int64_t max_power_iters = 2'000'000;
    std::int64_t uniform_iters = 64;  // exact-interior iterations from the uniform start
    ExecMode exec = ExecMode::parallel;
};

enum class EigenSource { window_power_iteration, uniform_exact_interior };

struct SpectralData {
    double lambda = 0.0;
    bool converged_by_cauchy = false;  // else accepted through the window fit
    std::vector<std::pair<std::int64_t, double>> lambda_history;  // (K, lambda_K)
    std::int64_t period = 1;
    bool irreducible_on_window = false;

    // eigenvector windows on the interior, indexed by normalized index
    std::int64_t interior_lo = 0, interior_hi = 0;
    std::vector<double> left;   // size interior_hi - interior_lo + 1
    std::vector<double> right;
    EigenSource left_source = EigenSource::window_power_iteration;
    EigenSource right_source = EigenSource::window_power_iteration;
    double residual_left = 0.0;   // max relative |(lF)_b - lambda l_b| on the interior
    double residual_right = 0.0;
    std::string left_normalization;  // "sum=1" or "max=1"

    double left_at(std::int64_t idx) const {
        if (idx < interior_lo || idx > interior_hi)
            fail(Errc::boundary_vertex, "index " + std::to_string(idx) + " outside the interior");
        return left[static_cast<std::size_t>(idx - interior_lo)];
    }
    double right_at(std::int64_t idx) const {
        if (idx < interior_lo || idx > interior_hi)
            fail(Errc::boundary_vertex, "index " + std::to_string(idx) + " outside the interior");
        return right[static_cast<std::size_t>(idx - interior_lo)];
    }
};

/// Power iteration over the Dirichlet-truncated window schedule. lambda is
/// accepted once consecutive windows agree below tol; if the schedule is
/// exhausted the vanishing-boundary law lambda_K = L - A/(K+s)^2 is fitted
/// to the last three windows (reported via converged_by_cauchy = false).
/// Eigenvectors come from the better of two candidates per side: the deep
/// interior of the largest window, and the exact-interior iterate of the
/// uniform start (exact for constant row/column sums).
SpectralData pf_eigen(const BandedMatrix& m, const SpectralOptions& opts = {});

struct ResidualReport {
    std::optional<Rational> exact_left_max;   // rational mode
    std::optional<Rational> exact_right_max;
    double float_left_max = 0.0;
    double float_right_max = 0.0;
    LetterInterval window{0, 0};
};

/// Exact check of (lF)_b = lambda l_b and (Fr)_a = lambda r_a on the interior
/// of the window; the band makes every equation a finite sum.
ResidualReport verify_eigen_exact(const Substitution& s, const ClosedFormSpectral& cf,
                                  const LetterInterval& window);

/// Floating residual of computed spectral data over its own interior.
ResidualReport verify_eigen(const BandedMatrix& m, const SpectralData& sd);

enum class RecurrenceClass { recurrent_evidence, transient_evidence, inconclusive };
enum class MassClass { positive, null_evidence, inconclusive };

struct RecurrenceOptions {
    int n_max = 40;
    int slope_window = 20;
    std::vector<std::int64_t> lr_schedule{16, 32, 64, 128};
    ExecMode exec = ExecMode::parallel;
};

struct RecurrenceVerdict {
    bool irreducible_on_window = false;
    std::int64_t period = 1;
    RecurrenceClass klass = RecurrenceClass::inconclusive;
    MassClass positive_vs_null = MassClass::inconclusive;
    std::vector<double> f_series_partial_sums;      // s_N = sum_{n<=N} f^(n)_00 lambda^-n
    std::vector<double> taboo_series_partial_sums;  // sum_{n<=N} n t_00(n) lambda^-n
    std::vector<std::pair<std::int64_t, double>> lr_partial;  // (K, sum_{|i|<=K} l_i r_i)
    std::optional<double> lr_extrapolated;          // geometric-tail extrapolation when found
};

/// Heuristic classification from partial sums; decision thresholds are
/// configuration and are reported verbatim by the CLI.
RecurrenceVerdict classify_recurrence(const BandedMatrix& m, const SpectralData& sd,
                                      const RecurrenceOptions& opts = {});

/// The series decision rule alone (exposed for tests): looks at the tail of
/// the increments of a partial-sum sequence.
RecurrenceClass classify_series(const std::vector<double>& partial_sums, int slope_window);

}  // namespace substrat
