// decompose.hpp -- unique sigma-decompositions, the left-determined
// property on windows, recognizability, and the power bounds.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "substrat/substitution.hpp"

namespace substrat {

/// One decomposition  w = head . sigma^n(core...) . tail  where head is a
/// proper suffix of sigma^n(b) for each b in head_witnesses (symmetrically
/// for tail), and some witness completion of the core is admissible.
struct Decomposition {
    Word head;
    std::vector<Letter> core;
    Word tail;
    std::set<Letter> head_witnesses;  // empty iff head is empty
    std::set<Letter> tail_witnesses;  // empty iff tail is empty

    bool same_cuts(const Decomposition& o) const {
        return head == o.head && core == o.core && tail == o.tail;
    }
};

class AmbiguousDecompositionError : public Error {
  public:
    AmbiguousDecompositionError(std::string what, std::vector<Decomposition> d)
        : Error(Errc::ambiguous_decomposition, std::move(what)), decompositions(std::move(d)) {}
    std::vector<Decomposition> decompositions;
};

/// Recursive language membership with memoization. A word is accepted when
/// it is short enough to appear in the window closure, or when it admits a
/// cut decomposition whose witness word is itself accepted.
class LanguageOracle {
  public:
    explicit LanguageOracle(const Substitution& s) : s_(&s) {}

    bool contains(const Word& u);
    const Substitution& substitution() const { return *s_; }

    /// Pre-seed from a window language: queries whose letters stay within the
    /// margin-trimmed window and whose length fits are decided by the set
    /// (negatives included); everything else takes the recursive path.
    void seed(const std::set<Word>& lang, const LetterInterval& decided_window,
              std::int64_t decided_len);

  private:
    void ensure_base(Letter lo, Letter hi);

    const Substitution* s_;
    std::map<Word, bool> memo_;
    std::set<Word> base_;
    std::optional<LetterInterval> base_window_;
    std::set<Word> seeded_;
    std::optional<LetterInterval> seeded_window_;
    std::int64_t seeded_len_ = 0;
    static constexpr std::int64_t kBaseLen = 8;
};

struct EnumerateOptions {
    bool stop_at_two = false;  // early exit once ambiguity is established
};

/// Reusable enumeration state for one (substitution, level): cached
/// sigma^level images and first/last-letter candidate indexes.
class DecomposeEngine {
  public:
    DecomposeEngine(const Substitution& s, int level, LanguageOracle& oracle);

    /// All admissible decompositions of w into suffix . blocks . prefix.
    /// Distinct results differ in their cut pattern (head length, core
    /// letters, tail length); witness sets never multiply decompositions.
    std::vector<Decomposition> enumerate(const Word& w, const EnumerateOptions& opts = {});

    int level() const { return level_; }

  private:
    const Word& image(Letter a);
    const std::vector<Letter>& by_first(Letter c);
    const std::vector<Letter>& by_last(Letter c);

    const Substitution* s_;
    int level_;
    LanguageOracle* oracle_;
    std::int64_t band_;
    std::int64_t block_cap_;
    std::map<Letter, Word> images_;
    std::map<Letter, std::vector<Letter>> first_index_;
    std::map<Letter, std::vector<Letter>> last_index_;
};

std::vector<Decomposition> enumerate_decompositions(const Substitution& s, const Word& w,
                                                    int level, LanguageOracle& oracle,
                                                    const EnumerateOptions& opts = {});

struct LeftDeterminedReport {
    enum class Verdict { confirmed_on_window, refuted };
    Verdict verdict = Verdict::confirmed_on_window;
    std::optional<std::int64_t> n_sigma;  // smallest verified cut length
    std::optional<Word> counterexample;   // ambiguous word when refuted
    std::vector<Decomposition> counterexample_decompositions;
    LetterInterval window{0, 0};
    std::int64_t max_len_checked = 0;
    std::int64_t margin = 0;              // letters trimmed at each side for interior tests
    std::map<std::int64_t, std::int64_t> words_by_length;
    std::map<std::int64_t, std::int64_t> ambiguous_by_length;
    std::map<std::int64_t, std::int64_t> undecomposable_by_length;
};

struct FindNSigmaOptions {
    bool parallel = true;
};

/// Brute-force window verification of the left-determined property: every
/// interior language word with |w| in [2, max_len] is tested for having
/// exactly one decomposition. Confirmed-on-window reports the smallest L
/// with all tested lengths >= L unique.
LeftDeterminedReport find_n_sigma(const Substitution& s, const LetterInterval& window,
                                  std::int64_t max_len, const FindNSigmaOptions& opts = {});

/// The unique decomposition of w (|w| >= n_sigma). Throws no_decomposition
/// or AmbiguousDecompositionError when the assumption fails.
Decomposition sigma_decompose(const Substitution& s, const Word& w, std::int64_t n_sigma);

/// x = T^k sigma(y) on the overlap: returns the preimage window y and the
/// offset k of x's position 0 inside the image of y's letter 0.
std::pair<WindowedSequence, std::int64_t> recognize(const Substitution& s,
                                                    const WindowedSequence& x,
                                                    std::int64_t n_sigma);

/// Smallest k with 2^(k-1) >= n_sigma; sigma^k is injective on letters.
int power_injectivity_bound(std::int64_t n_sigma);

/// N_sigma * C^(n-1): a valid cut length for sigma^n. Overflow signalled.
std::int64_t power_n_sigma_bound(std::int64_t n_sigma, std::int64_t c, int n);

}  // namespace substrat
