// towers.hpp -- Kakutani-Rokhlin tower partitions: mode A towers over
// [sigma^n(a)] and the mode B tower families over [sigma(w)], w in P_n,
// produced by the removal pass.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "substrat/decompose.hpp"
#include "substrat/substitution.hpp"

namespace substrat {

enum class TowerMode { A, B };

struct TowerAddress {
    TowerMode mode = TowerMode::A;
    int level = 1;         // n
    Letter base_letter = 0;  // mode A
    Word base_word;          // mode B
    std::int64_t floor = 0;  // 0 <= floor < height
    std::int64_t height = 0;
};

struct SectionSpec {
    TowerMode mode = TowerMode::A;
    int level = 1;
    std::set<Word> bases;  // mode B: the kept P_n words; ignored for mode A
};

/// The unique (a, k) with x in T^k [sigma^n(a)], read off the sigma^n-
/// decomposition of the window around index 0.
TowerAddress locate_in_tower(const Substitution& s, const WindowedSequence& x, int level,
                             std::int64_t n_sigma);

/// Letters of the sigma-preimage y around the block containing position 0:
/// letters[center - back .. center + fwd] with y[center] the letter whose
/// image block contains index 0 at offset `offset_in_block`.
struct PreimageContext {
    std::vector<Letter> letters;
    std::int64_t center = 0;           // index into letters
    std::int64_t offset_in_block = 0;  // of x-position 0 within image(letters[center])
};
PreimageContext preimage_context(const Substitution& s, const WindowedSequence& x,
                                 std::int64_t back, std::int64_t fwd, std::int64_t n_sigma);

struct PnTower {
    Word word;
    std::int64_t height = 0;  // sum of image lengths
    bool boundary = false;    // touches the window margin; excluded from assertions
};

struct PnResult {
    int level = 1;
    std::vector<PnTower> kept;  // spiral-lexicographic order
    std::int64_t towers_total = 0;
    std::int64_t removed = 0;
    std::int64_t forced_kept = 0;        // self-paired towers that must stay
    bool exact_on_interior = false;      // removal verified exact on interior classes
    std::int64_t interior_classes = 0;
    std::int64_t violations = 0;         // interior classes covered != once
    bool odd_conflict_cycle = false;     // no exact selection exists on this window
    std::int64_t margin = 0;
    LetterInterval window{0, 0};

    bool contains(const Word& w) const;
};

/// The removal pass of the two-copies construction, on a window. n = 1 keeps
/// every letter (the level-1 partition needs no removal). n = 2 resolves the
/// kept set by alternating constraint propagation over the conflict graph of
/// admissible (2n-1)-grams; n >= 3 runs the literal left-to-right greedy.
/// Every run self-verifies exact covering over interior classes and reports
/// the outcome instead of asserting it.
PnResult build_pn(const Substitution& s, int level, const LetterInterval& window,
                  std::int64_t n_sigma);

/// true iff x sits on a section base: mode A -- floor 0 of its level-n tower;
/// mode B -- offset 0 of a kept P_n base block.
bool section_membership(const Substitution& s, const WindowedSequence& x,
                        const SectionSpec& spec, std::int64_t n_sigma);

}  // namespace substrat
