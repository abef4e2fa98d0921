// core.hpp -- letters, words, windowed sequences, and the error taxonomy
// shared by every module of the toolkit.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace substrat {

/// A letter of the (countably infinite) alphabet, stored as its raw
/// integer value. Alphabets live on a sublattice stride*Z + residue.
using Letter = std::int64_t;

/// A finite string of letters. Empty words are allowed.
using Word = std::vector<Letter>;

/// Closed integer interval of letters [lo, hi].
struct LetterInterval {
    Letter lo = 0;
    Letter hi = 0;

    bool contains(Letter a) const { return lo <= a && a <= hi; }
    std::int64_t width() const { return hi - lo + 1; }
};

/// A finite factor of a bi-infinite sequence together with its index
/// anchor: letters[i] is the symbol at absolute position start + i.
struct WindowedSequence {
    std::int64_t start = 0;
    Word letters;

    std::int64_t size() const { return static_cast<std::int64_t>(letters.size()); }
    std::int64_t lo() const { return start; }
    std::int64_t hi() const { return start + size() - 1; }  // inclusive
    bool covers(std::int64_t pos) const { return pos >= lo() && pos <= hi(); }
    Letter at(std::int64_t pos) const { return letters.at(static_cast<std::size_t>(pos - start)); }

    /// Shift the anchor: the same letters viewed k steps later in the orbit.
    WindowedSequence shifted(std::int64_t k) const { return WindowedSequence{start - k, letters}; }
};

enum class Errc {
    uncovered_letter,
    overlapping_regions,
    image_too_short,
    size_unbounded,
    injectivity_violation,
    length_cap_exceeded,
    non_stabilizing,
    window_too_narrow,
    no_decomposition,
    ambiguous_decomposition,
    insufficient_window,
    boundary_vertex,
    not_irreducible_on_window,
    no_convergence,
    window_too_narrow_for_depth,
    seed_too_short,
    overflow,
    schema_error,
    invalid_argument,
    io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

  private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

/// a*b with overflow detection.
inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) fail(Errc::overflow, "integer product overflows int64");
    return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) fail(Errc::overflow, "integer sum overflows int64");
    return r;
}

/// ceil(log2(n)) for n >= 1.
inline int ceil_log2(std::int64_t n) {
    int k = 0;
    std::int64_t p = 1;
    while (p < n) {
        p *= 2;
        ++k;
    }
    return k;
}

/// Spiral enumeration 0, -1, 1, -2, 2, ... of Z; used as the total order
/// on letters wherever the construction needs one.
inline std::uint64_t spiral_rank(Letter a) {
    return a > 0 ? static_cast<std::uint64_t>(2 * a - 1) : static_cast<std::uint64_t>(-2 * a);
}

/// true iff u precedes v in the spiral-lexicographic order on words.
bool spiral_lex_less(const Word& u, const Word& v);

std::string word_to_string(const Word& w);

}  // namespace substrat
