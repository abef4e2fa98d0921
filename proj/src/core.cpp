#include "substrat/core.hpp"

#include <sstream>

namespace substrat {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::uncovered_letter: return "UncoveredLetter";
        case Errc::overlapping_regions: return "OverlappingRegions";
        case Errc::image_too_short: return "ImageTooShort";
        case Errc::size_unbounded: return "SizeUnbounded";
        case Errc::injectivity_violation: return "InjectivityViolation";
        case Errc::length_cap_exceeded: return "LengthCapExceeded";
        case Errc::non_stabilizing: return "NonStabilizing";
        case Errc::window_too_narrow: return "WindowTooNarrow";
        case Errc::no_decomposition: return "NoDecomposition";
        case Errc::ambiguous_decomposition: return "AmbiguousDecomposition";
        case Errc::insufficient_window: return "InsufficientWindow";
        case Errc::boundary_vertex: return "BoundaryVertex";
        case Errc::not_irreducible_on_window: return "NotIrreducibleOnWindow";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::window_too_narrow_for_depth: return "WindowTooNarrowForDepth";
        case Errc::seed_too_short: return "SeedTooShort";
        case Errc::overflow: return "Overflow";
        case Errc::schema_error: return "SchemaError";
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::io_error: return "IoError";
    }
    return "Error";
}

bool spiral_lex_less(const Word& u, const Word& v) {
    std::size_t n = std::min(u.size(), v.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] != v[i]) return spiral_rank(u[i]) < spiral_rank(v[i]);
    }
    return u.size() < v.size();
}

std::string word_to_string(const Word& w) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) os << ',';
        os << w[i];
    }
    os << ')';
    return os.str();
}

}  // namespace substrat
