// substitution.hpp -- finitely described substitutions on countably
// infinite alphabets: region rules with offset templates plus absolute
// exceptions, validation, application, iteration and abelianization.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "substrat/core.hpp"

namespace substrat {

/// The alphabet is identified with the sublattice stride*Z + residue.
struct Alphabet {
    std::int64_t stride = 1;
    std::int64_t residue = 0;

    bool contains(Letter a) const {
        std::int64_t r = (a - residue) % stride;
        return r == 0;
    }
    /// Raw letter -> consecutive index in Z.
    std::int64_t index_of(Letter a) const { return (a - residue) / stride; }
    Letter letter_at(std::int64_t idx) const { return idx * stride + residue; }
};

struct Region {
    enum class Kind { all, le, ge, set };
    Kind kind = Kind::all;
    Letter bound = 0;             // for le / ge
    std::vector<Letter> letters;  // for set

    bool contains(Letter a) const;
    std::string to_string() const;
};

/// Image of letter n is (n + offset) for each template entry.
struct RegionRule {
    Region region;
    std::vector<std::int64_t> template_offsets;
};

/// Raw description prior to validation.
struct SubstitutionDef {
    std::string name;
    Alphabet alphabet;
    std::vector<RegionRule> rules;
    std::map<Letter, Word> exceptions;  // absolute images; take precedence over rules
};

struct ValidateOptions {
    Letter injectivity_window = 64;  // exhaustive image check on [-W, W] (in indices)
    std::int64_t size_cap = 1024;    // reject computed size above this
};

class Substitution {
  public:
    /// Validates a raw definition and computes the derived constants.
    /// Throws Error with one of: uncovered_letter, overlapping_regions,
    /// image_too_short, size_unbounded, injectivity_violation, schema_error.
    static Substitution validate(const SubstitutionDef& def, const ValidateOptions& opts = {});

    const std::string& name() const { return def_.name; }
    const Alphabet& alphabet() const { return def_.alphabet; }
    const SubstitutionDef& definition() const { return def_; }

    /// Size t: max |image letter - source letter| over all images (raw units).
    std::int64_t size() const { return size_; }
    /// Max image length C.
    std::int64_t max_length() const { return max_len_; }
    std::int64_t min_length() const { return min_len_; }
    bool constant_length() const { return min_len_ == max_len_; }
    /// Size in normalized index units (size() / stride).
    std::int64_t band() const { return size_ / def_.alphabet.stride; }

    /// sigma(a) for a raw letter.
    Word image(Letter a) const;
    std::int64_t image_length(Letter a) const;

    /// sigma extended to words by concatenation; sigma(empty) = empty.
    Word apply(const Word& w) const;

    /// sigma^n(a). Guarded by an estimated length cap (letters).
    Word iterate(Letter a, int n, std::int64_t length_cap = 10'000'000) const;

    /// |sigma^n(a)| without materializing the word. Overflow signalled.
    std::int64_t iterate_length(Letter a, int n) const;

    /// Row a of the substitution matrix: {b -> m_ab}, support in [a-t, a+t].
    std::map<Letter, std::int64_t> abelianize_row(Letter a) const;

    /// Letters of sigma^depth(a) at positions [from, to), expanded lazily.
    Word segment_of_iterate(Letter a, int depth, std::int64_t from, std::int64_t to) const;

    void require_letter(Letter a) const;

  private:
    Substitution() = default;

    const RegionRule* rule_for(Letter a) const;

    SubstitutionDef def_;
    std::int64_t size_ = 0;
    std::int64_t max_len_ = 0;
    std::int64_t min_len_ = 0;
    mutable std::map<std::pair<Letter, int>, std::int64_t> iter_len_cache_;
};

struct LanguageOptions {
    /// Extra letters kept on each side of the requested window while closing
    /// under sigma-images; defaults to band * (ceil_log2(max_len) + 2).
    std::optional<std::int64_t> margin;  // in raw letter units (multiple of stride)
    int iteration_cap = 1000;
};

/// All language words of length <= max_len with letters in `window`,
/// obtained by closing the single letters of the inflated window under
/// "factors of sigma(.)" until stable. Factor-closed by construction.
/// Throws non_stabilizing if the closure exceeds the iteration cap.
std::set<Word> generate_language(const Substitution& s, std::int64_t max_len,
                                 const LetterInterval& window, const LanguageOptions& opts = {});

}  // namespace substrat
