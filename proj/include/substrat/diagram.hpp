// diagram.hpp -- the stationary generalized Bratteli diagram of a left
// determined substitution: ordered edges, heights, path enumeration, the
// Vershik successor, telescoping and DOT export.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "substrat/substitution.hpp"

namespace substrat {

/// Vertices of every level are the letters; the ordered incoming edges of
/// vertex a list the sources sigma(a)[0..h_a-1] left to right, so the
/// substitution read back from the diagram is sigma itself.
class StationaryDiagram {
  public:
    explicit StationaryDiagram(Substitution s) : s_(std::move(s)) {}

    const Substitution& substitution() const { return s_; }

    /// Ordered sources of the in-edges at any vertex labelled a.
    Word ordered_sources(Letter a) const { return s_.image(a); }
    std::int64_t in_degree(Letter a) const { return s_.image_length(a); }

    /// Incidence row f_{a,.} (equals the substitution matrix row).
    std::map<Letter, std::int64_t> incidence_row(Letter a) const { return s_.abelianize_row(a); }

    /// The substitution read on the diagram (round-trip identity).
    Word read_substitution(Letter a) const { return ordered_sources(a); }

  private:
    Substitution s_;
};

/// h(n, a) = |sigma^n(a)| computed by the edge-count recursion.
class HeightTable {
  public:
    HeightTable(const Substitution& s, int n_max, LetterInterval window);

    std::int64_t at(int n, Letter a) const;
    int n_max() const { return n_max_; }
    const LetterInterval& window() const { return window_; }

  private:
    int n_max_;
    LetterInterval window_;
    std::map<std::pair<int, Letter>, std::int64_t> h_;
};

HeightTable heights(const Substitution& s, int n_max, const LetterInterval& window);

/// First N edges of an infinite path, stored top-down: positions[m-1] is the
/// in-edge order j_m chosen at level m, so the vertex below is
/// sigma(a_m)[j_m]. Vertices below the top are derived, never stored.
struct PathPrefix {
    Letter top = 0;                       // a_N
    std::vector<std::int64_t> positions;  // j_1 .. j_N, index m-1 holds j_m

    int depth() const { return static_cast<int>(positions.size()); }
};

/// The vertex chain a_N, a_(N-1), ..., a_0 implied by the source relation.
std::vector<Letter> vertex_chain(const StationaryDiagram& d, const PathPrefix& p);

/// Lexicographic ranks (i_n, v_n) for n = 1..N:
/// i_n = sum_(q < j_n) h(n-1, sigma(a_n)[q]) + i_(n-1), i_0 = 0.
std::vector<std::pair<std::int64_t, Letter>> path_index(const StationaryDiagram& d,
                                                        const PathPrefix& p,
                                                        const HeightTable& h);

/// Inverse of path_index on a fixed vertex chain: rebuilds the prefix from
/// tower addresses (i_n, v_n), n = 1..N. Returns nothing if the ranks are
/// not nested consistently.
std::optional<PathPrefix> prefix_from_ranks(
    const StationaryDiagram& d, const std::vector<std::pair<std::int64_t, Letter>>& ranks,
    const HeightTable& h);

struct MaxPrefixSignal {};  // all levels maximal: successor leaves prefix scope

/// Increment the lowest non-maximal edge and reset everything below it to
/// the minimal path. Vertices above the changed level are untouched.
std::optional<PathPrefix> vershik_successor(const StationaryDiagram& d, const PathPrefix& p);

/// Rows of F^stride materialized on the window, one map per requested
/// composed level gap. For the stationary diagram a telescoping by stride m
/// is the diagram of sigma^m.
std::vector<std::map<Letter, std::int64_t>> telescope_rows(const StationaryDiagram& d,
                                                           int stride,
                                                           const LetterInterval& window);

/// Composed incidence rows for a strictly increasing level sequence.
struct TelescopeResult {
    std::vector<int> gaps;
    std::vector<std::vector<std::map<Letter, std::int64_t>>> rows_per_gap;
    LetterInterval window{0, 0};
};
TelescopeResult telescope(const StationaryDiagram& d, const std::vector<int>& levels,
                          const LetterInterval& window);

/// Graphviz text: `levels` vertex layers over the window, multi-edges drawn
/// separately with their in-edge order labels 0..h_a-1.
std::string export_dot(const StationaryDiagram& d, int levels, const LetterInterval& window);

}  // namespace substrat
