#include "substrat/diagram.hpp"

#include <algorithm>
#include <sstream>

namespace substrat {

HeightTable::HeightTable(const Substitution& s, int n_max, LetterInterval window)
    : n_max_(n_max), window_(window) {
    if (n_max < 0) fail(Errc::invalid_argument, "n_max must be >= 0");
    const std::int64_t stride = s.alphabet().stride;
    // level l values are needed on the window inflated by (n_max - l) bands
    for (int l = 0; l <= n_max; ++l) {
        std::int64_t inflate = s.size() * (n_max - l);
        Letter lo = window.lo - inflate, hi = window.hi + inflate;
        while (!s.alphabet().contains(lo)) ++lo;
        for (Letter a = lo; a <= hi; a += stride) {
            if (l == 0) {
                h_[{0, a}] = 1;
                continue;
            }
            std::int64_t total = 0;
            for (const auto& [b, m] : s.abelianize_row(a)) {
                auto it = h_.find({l - 1, b});
                if (it == h_.end()) fail(Errc::window_too_narrow, "height recursion left the window");
                total = checked_add(total, checked_mul(m, it->second));
            }
            h_[{l, a}] = total;
        }
    }
}

std::int64_t HeightTable::at(int n, Letter a) const {
    auto it = h_.find({n, a});
    if (it == h_.end())
        fail(Errc::invalid_argument, "height h(" + std::to_string(n) + "," + std::to_string(a) +
                                         ") not materialized on this window");
    return it->second;
}

HeightTable heights(const Substitution& s, int n_max, const LetterInterval& window) {
    return HeightTable(s, n_max, window);
}

std::vector<Letter> vertex_chain(const StationaryDiagram& d, const PathPrefix& p) {
    std::vector<Letter> chain(p.positions.size() + 1);
    int N = p.depth();
    chain[N] = p.top;
    for (int m = N; m >= 1; --m) {
        Word src = d.ordered_sources(chain[m]);
        std::int64_t j = p.positions[m - 1];
        if (j < 0 || j >= static_cast<std::int64_t>(src.size()))
            fail(Errc::invalid_argument, "edge position out of range at level " + std::to_string(m));
        chain[m - 1] = src[static_cast<std::size_t>(j)];
    }
    return chain;  // chain[m] = a_m
}

std::vector<std::pair<std::int64_t, Letter>> path_index(const StationaryDiagram& d,
                                                        const PathPrefix& p,
                                                        const HeightTable& h) {
    std::vector<Letter> chain = vertex_chain(d, p);
    std::vector<std::pair<std::int64_t, Letter>> out;
    std::int64_t i = 0;
    for (int m = 1; m <= p.depth(); ++m) {
        Word src = d.ordered_sources(chain[m]);
        std::int64_t j = p.positions[m - 1];
        std::int64_t below = 0;
        for (std::int64_t q = 0; q < j; ++q)
            below = checked_add(below, h.at(m - 1, src[static_cast<std::size_t>(q)]));
        i = checked_add(below, i);
        out.emplace_back(i, chain[m]);
    }
    return out;
}

std::optional<PathPrefix> prefix_from_ranks(
    const StationaryDiagram& d, const std::vector<std::pair<std::int64_t, Letter>>& ranks,
    const HeightTable& h) {
    PathPrefix p;
    if (ranks.empty()) return p;
    int N = static_cast<int>(ranks.size());
    p.top = ranks.back().second;
    p.positions.assign(N, 0);
    for (int m = N; m >= 1; --m) {
        Letter vm = ranks[m - 1].second;
        std::int64_t im = ranks[m - 1].first;
        std::int64_t below_target = m >= 2 ? ranks[m - 2].first : 0;
        Letter below_vertex = 0;
        Word src = d.ordered_sources(vm);
        std::int64_t acc = 0;
        bool placed = false;
        for (std::int64_t j = 0; j < static_cast<std::int64_t>(src.size()); ++j) {
            std::int64_t hj = h.at(m - 1, src[static_cast<std::size_t>(j)]);
            if (im < acc + hj) {
                if (im - acc != below_target) return std::nullopt;
                below_vertex = src[static_cast<std::size_t>(j)];
                p.positions[m - 1] = j;
                placed = true;
                break;
            }
            acc += hj;
        }
        if (!placed) return std::nullopt;
        if (m >= 2 && below_vertex != ranks[m - 2].second) return std::nullopt;
    }
    return p;
}

std::optional<PathPrefix> vershik_successor(const StationaryDiagram& d, const PathPrefix& p) {
    std::vector<Letter> chain = vertex_chain(d, p);
    for (int m = 1; m <= p.depth(); ++m) {
        Word src = d.ordered_sources(chain[m]);
        std::int64_t j = p.positions[m - 1];
        if (j + 1 < static_cast<std::int64_t>(src.size())) {
            PathPrefix out = p;
            out.positions[m - 1] = j + 1;
            // minimal fill below the changed level
            Letter v = src[static_cast<std::size_t>(j + 1)];
            for (int k = m - 1; k >= 1; --k) {
                out.positions[k - 1] = 0;
                v = d.ordered_sources(v)[0];
            }
            return out;
        }
    }
    return std::nullopt;  // MaxPrefixSignal
}

std::vector<std::map<Letter, std::int64_t>> telescope_rows(const StationaryDiagram& d, int stride,
                                                           const LetterInterval& window) {
    if (stride < 1) fail(Errc::invalid_argument, "telescoping stride must be >= 1");
    const Substitution& s = d.substitution();
    const std::int64_t step = s.alphabet().stride;
    std::vector<std::map<Letter, std::int64_t>> rows;
    Letter lo = window.lo;
    while (!s.alphabet().contains(lo)) ++lo;
    for (Letter a = lo; a <= window.hi; a += step) {
        // row of F^stride at a: composed walk counts, kept exact in int64
        std::map<Letter, std::int64_t> row{{a, 1}};
        for (int k = 0; k < stride; ++k) {
            std::map<Letter, std::int64_t> next;
            for (const auto& [b, m] : row)
                for (const auto& [c, f] : s.abelianize_row(b))
                    next[c] = checked_add(next[c], checked_mul(m, f));
            row = std::move(next);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

TelescopeResult telescope(const StationaryDiagram& d, const std::vector<int>& levels,
                          const LetterInterval& window) {
    if (levels.size() < 2) fail(Errc::invalid_argument, "need at least two levels to telescope");
    for (std::size_t i = 1; i < levels.size(); ++i)
        if (levels[i] <= levels[i - 1])
            fail(Errc::invalid_argument, "telescoping levels must be strictly increasing");
    TelescopeResult out;
    out.window = window;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        int gap = levels[i] - levels[i - 1];
        out.gaps.push_back(gap);
        out.rows_per_gap.push_back(telescope_rows(d, gap, window));
    }
    return out;
}

std::string export_dot(const StationaryDiagram& d, int levels, const LetterInterval& window) {
    if (levels < 0) fail(Errc::invalid_argument, "levels must be >= 0");
    const Substitution& s = d.substitution();
    const std::int64_t step = s.alphabet().stride;
    std::ostringstream os;
    os << "digraph bratteli {\n";
    os << "  rankdir=BT;\n  node [shape=circle, fontsize=10];\n";
    Letter lo = window.lo;
    while (lo <= window.hi && !s.alphabet().contains(lo)) ++lo;
    for (int l = 0; l < levels; ++l) {
        os << "  { rank=same;";
        for (Letter a = lo; a <= window.hi; a += step)
            os << " \"v" << l << "_" << a << "\" [label=\"" << a << "\"];";
        os << " }\n";
    }
    for (int l = 0; l + 1 < levels; ++l) {
        for (Letter a = lo; a <= window.hi; a += step) {
            Word src = d.ordered_sources(a);
            for (std::size_t j = 0; j < src.size(); ++j) {
                Letter b = src[j];
                if (b < window.lo || b > window.hi) continue;
                os << "  \"v" << l << "_" << b << "\" -> \"v" << (l + 1) << "_" << a
                   << "\" [label=\"" << j << "\"];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace substrat
