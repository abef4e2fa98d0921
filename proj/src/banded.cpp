#include "substrat/banded.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace substrat {

BandedMatrix BandedMatrix::from_substitution(const Substitution& s) {
    BandedMatrix m;
    m.bandwidth = s.band();
    const Alphabet al = s.alphabet();
    m.row = [s = &s, al](std::int64_t i) {
        std::vector<std::pair<std::int64_t, std::int64_t>> out;
        for (const auto& [b, cnt] : s->abelianize_row(al.letter_at(i)))
            out.emplace_back(al.index_of(b), cnt);
        return out;
    };
    return m;
}

BandWindow::BandWindow(const BandedMatrix& m, std::int64_t K) : K_(K), bw_(m.bandwidth) {
    if (K < 1) fail(Errc::invalid_argument, "window K must be >= 1");
    a_.assign(static_cast<std::size_t>((2 * K_ + 1) * (2 * bw_ + 1)), 0.0);
    for (std::int64_t i = -K_; i <= K_; ++i) {
        for (const auto& [j, v] : m.row(i)) {
            if (j < -K_ || j > K_) continue;  // Dirichlet: dropped at the edge
            std::int64_t d = j - i;
            if (d < -bw_ || d > bw_)
                fail(Errc::invalid_argument, "row entry outside the declared band");
            a_[static_cast<std::size_t>((i + K_) * (2 * bw_ + 1) + (d + bw_))] +=
                static_cast<double>(v);
        }
    }
}

void BandWindow::apply_right(const std::vector<double>& x, std::vector<double>& y,
                             ExecMode mode) const {
    const std::int64_t n = dim();
    y.assign(static_cast<std::size_t>(n), 0.0);
    auto row_dot = [&](std::int64_t i) {
        double acc = 0.0;
        for (std::int64_t d = -bw_; d <= bw_; ++d) {
            std::int64_t j = i + d;
            if (j < -K_ || j > K_) continue;
            acc += entry(i, d) * x[static_cast<std::size_t>(j + K_)];
        }
        y[static_cast<std::size_t>(i + K_)] = acc;
    };
    if (mode == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::int64_t i = -K_; i <= K_; ++i) row_dot(i);
        return;
#endif
    }
    for (std::int64_t i = -K_; i <= K_; ++i) row_dot(i);
}

void BandWindow::apply_left(const std::vector<double>& x, std::vector<double>& y,
                            ExecMode mode) const {
    const std::int64_t n = dim();
    y.assign(static_cast<std::size_t>(n), 0.0);
    // column j gathers from rows j-d; each output entry is written once.
    auto col_dot = [&](std::int64_t j) {
        double acc = 0.0;
        for (std::int64_t d = -bw_; d <= bw_; ++d) {
            std::int64_t i = j - d;
            if (i < -K_ || i > K_) continue;
            acc += entry(i, d) * x[static_cast<std::size_t>(i + K_)];
        }
        y[static_cast<std::size_t>(j + K_)] = acc;
    };
    if (mode == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (std::int64_t j = -K_; j <= K_; ++j) col_dot(j);
        return;
#endif
    }
    for (std::int64_t j = -K_; j <= K_; ++j) col_dot(j);
}

bool BandWindow::strongly_connected() const {
    const std::int64_t n = dim();
    auto reach = [&](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::deque<std::int64_t> dq{0};  // index 0 == letter index -K_.. use center
        seen[static_cast<std::size_t>(K_)] = 1;
        dq.front() = K_;
        while (!dq.empty()) {
            std::int64_t u = dq.front();
            dq.pop_front();
            std::int64_t i = u - K_;
            for (std::int64_t d = -bw_; d <= bw_; ++d) {
                std::int64_t j = i + d;
                if (j < -K_ || j > K_) continue;
                double v = transpose ? entry(j, -d) : entry(i, d);
                if (v <= 0.0) continue;
                std::int64_t w = j + K_;
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = 1;
                    dq.push_back(w);
                }
            }
        }
        return seen;
    };
    auto fwd = reach(false), bwd = reach(true);
    for (std::int64_t u = 0; u < n; ++u)
        if (!fwd[static_cast<std::size_t>(u)] || !bwd[static_cast<std::size_t>(u)]) return false;
    return true;
}

std::int64_t BandWindow::period() const {
    // BFS levels from the center; gcd of (level(u) + 1 - level(v)) over edges.
    const std::int64_t n = dim();
    std::vector<std::int64_t> level(static_cast<std::size_t>(n), -1);
    std::deque<std::int64_t> dq{K_};
    level[static_cast<std::size_t>(K_)] = 0;
    std::int64_t g = 0;
    while (!dq.empty()) {
        std::int64_t u = dq.front();
        dq.pop_front();
        std::int64_t i = u - K_;
        for (std::int64_t d = -bw_; d <= bw_; ++d) {
            std::int64_t j = i + d;
            if (j < -K_ || j > K_) continue;
            if (entry(i, d) <= 0.0) continue;
            std::int64_t w = j + K_;
            if (level[static_cast<std::size_t>(w)] < 0) {
                level[static_cast<std::size_t>(w)] = level[static_cast<std::size_t>(u)] + 1;
                dq.push_back(w);
            } else {
                std::int64_t diff = level[static_cast<std::size_t>(u)] + 1 -
                                    level[static_cast<std::size_t>(w)];
                g = std::gcd(g, std::abs(diff));
            }
        }
    }
    return g == 0 ? 1 : g;
}

}  // namespace substrat
