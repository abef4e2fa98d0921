#include "substrat/towers.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace substrat {

TowerAddress locate_in_tower(const Substitution& s, const WindowedSequence& x, int level,
                             std::int64_t n_sigma) {
    if (!x.covers(0)) fail(Errc::invalid_argument, "window must contain index 0");
    std::int64_t cut = power_n_sigma_bound(n_sigma, s.max_length(), level);
    std::int64_t block_cap = 1;
    for (int i = 0; i < level; ++i) block_cap = checked_mul(block_cap, s.max_length());
    std::int64_t radius = (cut + 1) / 2 + block_cap;
    if (x.lo() > -radius || x.hi() < radius)
        fail(Errc::insufficient_window,
             "window [" + std::to_string(x.lo()) + "," + std::to_string(x.hi()) +
                 "] is smaller than the required radius " + std::to_string(radius) +
                 " for level " + std::to_string(level));

    LanguageOracle oracle(s);
    auto ds = enumerate_decompositions(s, x.letters, level, oracle);
    if (ds.empty()) fail(Errc::no_decomposition, "window word has no sigma^n-decomposition");
    if (ds.size() > 1)
        throw AmbiguousDecompositionError("sigma^n-decomposition of the window is ambiguous",
                                          std::move(ds));
    const Decomposition& d = ds.front();

    std::int64_t pos = x.start + static_cast<std::int64_t>(d.head.size());
    if (0 < pos) fail(Errc::insufficient_window, "index 0 falls in the partial head block");
    for (Letter a : d.core) {
        std::int64_t len = s.iterate_length(a, level);
        if (pos <= 0 && 0 < pos + len) {
            TowerAddress addr;
            addr.mode = TowerMode::A;
            addr.level = level;
            addr.base_letter = a;
            addr.floor = -pos;
            addr.height = len;
            return addr;
        }
        pos += len;
    }
    fail(Errc::insufficient_window, "index 0 falls in the partial tail block");
}

PreimageContext preimage_context(const Substitution& s, const WindowedSequence& x,
                                 std::int64_t back, std::int64_t fwd, std::int64_t n_sigma) {
    if (!x.covers(0)) fail(Errc::invalid_argument, "window must contain index 0");
    if (x.size() < n_sigma)
        fail(Errc::insufficient_window, "window shorter than N_sigma");
    LanguageOracle oracle(s);
    auto ds = enumerate_decompositions(s, x.letters, 1, oracle);
    if (ds.empty()) fail(Errc::no_decomposition, "window word is not in the language");
    if (ds.size() > 1)
        throw AmbiguousDecompositionError("window word decomposes ambiguously", std::move(ds));
    const Decomposition& d = ds.front();

    std::int64_t pos = x.start + static_cast<std::int64_t>(d.head.size());
    if (0 < pos) fail(Errc::insufficient_window, "index 0 falls in the partial head block");
    for (std::size_t i = 0; i < d.core.size(); ++i) {
        std::int64_t len = s.image_length(d.core[i]);
        if (pos <= 0 && 0 < pos + len) {
            std::int64_t ci = static_cast<std::int64_t>(i);
            if (ci < back || ci + fwd >= static_cast<std::int64_t>(d.core.size()))
                fail(Errc::insufficient_window,
                     "window does not expose " + std::to_string(back) + " blocks back and " +
                         std::to_string(fwd) + " forward around index 0");
            PreimageContext ctx;
            ctx.letters.assign(d.core.begin() + (ci - back), d.core.begin() + (ci + fwd + 1));
            ctx.center = back;
            ctx.offset_in_block = -pos;
            return ctx;
        }
        pos += len;
    }
    fail(Errc::insufficient_window, "index 0 falls in the partial tail block");
}

bool PnResult::contains(const Word& w) const {
    for (const auto& t : kept)
        if (t.word == w) return true;
    return false;
}

namespace {

struct SpiralLess {
    bool operator()(const Word& u, const Word& v) const { return spiral_lex_less(u, v); }
};

std::int64_t tower_height(const Substitution& s, const Word& w) {
    std::int64_t h = 0;
    for (Letter a : w) h = checked_add(h, s.image_length(a));
    return h;
}

}  // namespace

PnResult build_pn(const Substitution& s, int level, const LetterInterval& window,
                  std::int64_t n_sigma) {
    if (level < 1) fail(Errc::invalid_argument, "level must be >= 1");
    (void)n_sigma;
    const std::int64_t n = level;
    const std::int64_t gram_len = 2 * n - 1;
    const std::int64_t margin = s.size() * (ceil_log2(std::max<std::int64_t>(2, gram_len)) + 2);
    if (window.hi - window.lo < 2 * margin + 2 * s.alphabet().stride)
        fail(Errc::window_too_narrow, "window cannot absorb the generation margin " +
                                          std::to_string(margin));

    PnResult res;
    res.level = level;
    res.window = window;
    res.margin = margin;

    std::set<Word> lang = generate_language(s, std::max<std::int64_t>(n, gram_len), window);
    std::vector<Word> towers;
    for (const Word& w : lang)
        if (static_cast<std::int64_t>(w.size()) == n) towers.push_back(w);
    std::sort(towers.begin(), towers.end(), SpiralLess{});
    res.towers_total = static_cast<std::int64_t>(towers.size());

    LetterInterval interior{window.lo + margin, window.hi - margin};
    auto is_interior = [&](const Word& w) {
        for (Letter a : w)
            if (!interior.contains(a)) return false;
        return true;
    };

    std::map<Word, bool, SpiralLess> kept_flag;  // presence decided below

    if (n == 1) {
        for (const Word& w : towers) kept_flag[w] = true;
    } else {
        // classes: admissible (2n-1)-grams; cover j reads the slice starting
        // at position (n-1-j), copy 0 being the lowest floors.
        std::vector<Word> classes;
        for (const Word& g : lang)
            if (static_cast<std::int64_t>(g.size()) == gram_len) classes.push_back(g);
        std::sort(classes.begin(), classes.end(), SpiralLess{});

        auto cover = [&](const Word& g, std::int64_t j) {
            return Word(g.begin() + (n - 1 - j), g.begin() + (2 * n - 1 - j));
        };

        if (n == 2) {
            // conflict graph: the two covers of each class must alternate;
            // classes whose covers coincide force that tower to stay.
            std::map<Word, std::set<Word, SpiralLess>, SpiralLess> adj;
            std::set<Word, SpiralLess> forced;
            for (const Word& g : classes) {
                Word lo_cov = cover(g, 0), up_cov = cover(g, 1);
                if (lo_cov == up_cov) {
                    forced.insert(lo_cov);
                } else {
                    adj[lo_cov].insert(up_cov);
                    adj[up_cov].insert(lo_cov);
                }
            }
            res.forced_kept = static_cast<std::int64_t>(forced.size());
            auto bfs = [&](const Word& start, bool value) {
                kept_flag[start] = value;
                std::deque<Word> dq{start};
                while (!dq.empty()) {
                    Word x = dq.front();
                    dq.pop_front();
                    auto it = adj.find(x);
                    if (it == adj.end()) continue;
                    for (const Word& y : it->second) {
                        auto f = kept_flag.find(y);
                        if (f == kept_flag.end()) {
                            kept_flag[y] = !kept_flag[x];
                            dq.push_back(y);
                        } else if (f->second == kept_flag[x]) {
                            res.odd_conflict_cycle = true;
                        }
                    }
                }
            };
            for (const Word& w : forced)
                if (!kept_flag.count(w)) bfs(w, true);
            for (const Word& w : towers)
                if (!kept_flag.count(w)) bfs(w, true);  // lex-least of its component stays
            for (const Word& w : forced)
                if (!kept_flag[w]) res.odd_conflict_cycle = true;
        } else {
            // literal greedy: walk towers in spiral-lexicographic order; a
            // kept tower evicts, per upper-copy class, the smallest later
            // cover still present.
            std::map<Word, std::vector<std::pair<Word, std::int64_t>>, SpiralLess> upper_of;
            for (const Word& g : classes)
                for (std::int64_t j = 1; j < n; ++j) upper_of[cover(g, j)].push_back({g, j});
            std::set<Word, SpiralLess> removed;
            for (const Word& tau : towers) {
                if (removed.count(tau)) continue;
                kept_flag[tau] = true;
                auto it = upper_of.find(tau);
                if (it == upper_of.end()) continue;
                for (const auto& [g, j] : it->second) {
                    Word best;
                    bool have = false;
                    for (std::int64_t jj = 0; jj < n; ++jj) {
                        if (jj == j) continue;
                        Word other = cover(g, jj);
                        if (other == tau) continue;
                        if (!spiral_lex_less(tau, other)) continue;
                        if (removed.count(other) || kept_flag.count(other)) continue;
                        if (!have || spiral_lex_less(other, best)) {
                            best = other;
                            have = true;
                        }
                    }
                    if (have) removed.insert(best);
                }
            }
            for (const Word& w : towers)
                if (!kept_flag.count(w)) kept_flag[w] = !removed.count(w);
        }

        // self-verification over interior classes, counting distinct kept
        // towers through which the class is covered.
        for (const Word& g : classes) {
            if (!is_interior(g)) continue;
            ++res.interior_classes;
            std::set<Word, SpiralLess> distinct;
            for (std::int64_t j = 0; j < n; ++j) {
                Word c = cover(g, j);
                auto f = kept_flag.find(c);
                if (f != kept_flag.end() && f->second) distinct.insert(c);
            }
            if (distinct.size() != 1) ++res.violations;
        }
        res.exact_on_interior = res.violations == 0;
    }

    for (const Word& w : towers) {
        auto f = kept_flag.find(w);
        if (f != kept_flag.end() && f->second) {
            PnTower t;
            t.word = w;
            t.height = tower_height(s, w);
            t.boundary = !is_interior(w);
            res.kept.push_back(std::move(t));
        }
    }
    res.removed = res.towers_total - static_cast<std::int64_t>(res.kept.size());
    if (n == 1) {
        res.exact_on_interior = true;
        res.interior_classes = 0;
    }
    return res;
}

bool section_membership(const Substitution& s, const WindowedSequence& x,
                        const SectionSpec& spec, std::int64_t n_sigma) {
    if (spec.mode == TowerMode::A) {
        TowerAddress addr = locate_in_tower(s, x, spec.level, n_sigma);
        return addr.floor == 0;
    }
    // mode B: x is at a base exactly when it sits at offset 0 of the image
    // of a kept word's first letter and the forward gram is that kept word.
    PreimageContext ctx = preimage_context(s, x, 0, spec.level - 1, n_sigma);
    if (ctx.offset_in_block != 0) return false;
    Word fwd(ctx.letters.begin() + ctx.center, ctx.letters.end());
    return spec.bases.count(fwd) > 0;
}

}  // namespace substrat
