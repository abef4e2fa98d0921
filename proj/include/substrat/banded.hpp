// banded.hpp -- infinite banded nonnegative matrices given by a row
// generator, window materialization, and the matvec kernels. Each kernel
// has a serial reference implementation and an OpenMP variant; both write
// every output entry from exactly one task, so results are identical and
// schedule-independent.

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "substrat/core.hpp"
#include "substrat/substitution.hpp"

namespace substrat {

enum class ExecMode { serial, parallel };

/// Row generator over normalized indices: index i -> [(j, f_ij)], with
/// |j - i| <= bandwidth.
struct BandedMatrix {
    std::int64_t bandwidth = 1;
    std::function<std::vector<std::pair<std::int64_t, std::int64_t>>(std::int64_t)> row;

    static BandedMatrix from_substitution(const Substitution& s);
};

/// Dense band storage of the window [-K, K] (indices): entry(i, d) is
/// f_{i, i+d} for |d| <= bw; columns outside the window are dropped
/// (Dirichlet truncation).
class BandWindow {
  public:
    BandWindow(const BandedMatrix& m, std::int64_t K);

    std::int64_t K() const { return K_; }
    std::int64_t bw() const { return bw_; }
    std::int64_t dim() const { return 2 * K_ + 1; }

    double entry(std::int64_t i, std::int64_t d) const {  // i in [-K, K], d in [-bw, bw]
        return a_[static_cast<std::size_t>((i + K_) * (2 * bw_ + 1) + (d + bw_))];
    }

    /// y = A x (right action). x, y sized dim().
    void apply_right(const std::vector<double>& x, std::vector<double>& y, ExecMode mode) const;
    /// y = x^T A (left action).
    void apply_left(const std::vector<double>& x, std::vector<double>& y, ExecMode mode) const;

    bool strongly_connected() const;
    /// gcd of cycle lengths through the window digraph (requires SCC).
    std::int64_t period() const;

  private:
    std::int64_t K_;
    std::int64_t bw_;
    std::vector<double> a_;
};

}  // namespace substrat
