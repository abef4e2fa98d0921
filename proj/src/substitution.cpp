#include "substrat/substitution.hpp"

#include <algorithm>
#include <sstream>

namespace substrat {

bool Region::contains(Letter a) const {
    switch (kind) {
        case Kind::all: return true;
        case Kind::le: return a <= bound;
        case Kind::ge: return a >= bound;
        case Kind::set: return std::find(letters.begin(), letters.end(), a) != letters.end();
    }
    return false;
}

std::string Region::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::all: os << "all"; break;
        case Kind::le: os << "le " << bound; break;
        case Kind::ge: os << "ge " << bound; break;
        case Kind::set:
            os << "set {";
            for (std::size_t i = 0; i < letters.size(); ++i) os << (i ? "," : "") << letters[i];
            os << '}';
            break;
    }
    return os.str();
}

namespace {

// Two translation rules collide on letters n in R1, m in R2 exactly when the
// offset templates differ by a constant shift c = m - n; the collision set is
// then R1 cap (R2 - c), which is decidable for half-lines and finite sets.
std::optional<std::int64_t> constant_difference(const std::vector<std::int64_t>& t1,
                                                const std::vector<std::int64_t>& t2) {
    if (t1.size() != t2.size() || t1.empty()) return std::nullopt;
    std::int64_t c = t1[0] - t2[0];
    for (std::size_t i = 1; i < t1.size(); ++i)
        if (t1[i] - t2[i] != c) return std::nullopt;
    return c;
}

bool regions_intersect(const Region& r1, const Region& r2, std::int64_t shift2,
                       std::int64_t stride) {
    // r1 cap (r2 + shift2), both over the same lattice
    auto lo = [&](const Region& r, std::int64_t sh) -> std::optional<Letter> {
        if (r.kind == Region::Kind::ge) return r.bound + sh;
        if (r.kind == Region::Kind::all || r.kind == Region::Kind::le) return std::nullopt;
        return std::nullopt;  // set handled separately
    };
    auto hi = [&](const Region& r, std::int64_t sh) -> std::optional<Letter> {
        if (r.kind == Region::Kind::le) return r.bound + sh;
        return std::nullopt;
    };
    if (r1.kind == Region::Kind::set) {
        for (Letter a : r1.letters) {
            Region shifted = r2;
            if (shifted.kind == Region::Kind::set) {
                for (Letter b : shifted.letters)
                    if (a == b + shift2) return true;
            } else if (shifted.contains(a - shift2)) {
                return true;
            }
        }
        return false;
    }
    if (r2.kind == Region::Kind::set) {
        for (Letter b : r2.letters)
            if (r1.contains(b + shift2)) return true;
        return false;
    }
    std::optional<Letter> l1 = lo(r1, 0), h1 = hi(r1, 0);
    std::optional<Letter> l2 = lo(r2, shift2), h2 = hi(r2, shift2);
    std::optional<Letter> l = l1, h = h1;
    if (l2 && (!l || *l2 > *l)) l = l2;
    if (h2 && (!h || *h2 < *h)) h = h2;
    if (l && h) return *l <= *h;
    (void)stride;
    return true;  // at least one side unbounded
}

}  // namespace

const RegionRule* Substitution::rule_for(Letter a) const {
    for (const auto& r : def_.rules)
        if (r.region.contains(a)) return &r;
    return nullptr;
}

void Substitution::require_letter(Letter a) const {
    if (!def_.alphabet.contains(a))
        fail(Errc::invalid_argument, "letter " + std::to_string(a) + " is not on the lattice " +
                                         std::to_string(def_.alphabet.stride) + "Z+" +
                                         std::to_string(def_.alphabet.residue));
}

Word Substitution::image(Letter a) const {
    require_letter(a);
    auto it = def_.exceptions.find(a);
    if (it != def_.exceptions.end()) return it->second;
    const RegionRule* r = rule_for(a);
    if (!r) fail(Errc::uncovered_letter, "no rule or exception covers letter " + std::to_string(a));
    Word out;
    out.reserve(r->template_offsets.size());
    for (std::int64_t off : r->template_offsets) out.push_back(a + off);
    return out;
}

std::int64_t Substitution::image_length(Letter a) const {
    auto it = def_.exceptions.find(a);
    if (it != def_.exceptions.end()) return static_cast<std::int64_t>(it->second.size());
    const RegionRule* r = rule_for(a);
    if (!r) fail(Errc::uncovered_letter, "no rule or exception covers letter " + std::to_string(a));
    return static_cast<std::int64_t>(r->template_offsets.size());
}

Word Substitution::apply(const Word& w) const {
    Word out;
    for (Letter a : w) {
        Word im = image(a);
        out.insert(out.end(), im.begin(), im.end());
    }
    return out;
}

std::int64_t Substitution::iterate_length(Letter a, int n) const {
    if (n < 0) fail(Errc::invalid_argument, "negative iterate depth");
    if (n == 0) return 1;
    auto key = std::make_pair(a, n);
    auto it = iter_len_cache_.find(key);
    if (it != iter_len_cache_.end()) return it->second;
    std::int64_t total = 0;
    for (Letter b : image(a)) total = checked_add(total, iterate_length(b, n - 1));
    iter_len_cache_[key] = total;
    return total;
}

Word Substitution::iterate(Letter a, int n, std::int64_t length_cap) const {
    require_letter(a);
    if (n < 0) fail(Errc::invalid_argument, "negative iterate depth");
    if (iterate_length(a, n) > length_cap)
        fail(Errc::length_cap_exceeded, "|sigma^" + std::to_string(n) + "(" + std::to_string(a) +
                                            ")| exceeds cap " + std::to_string(length_cap));
    Word w{a};
    for (int i = 0; i < n; ++i) w = apply(w);
    return w;
}

std::map<Letter, std::int64_t> Substitution::abelianize_row(Letter a) const {
    std::map<Letter, std::int64_t> row;
    for (Letter b : image(a)) ++row[b];
    return row;
}

Word Substitution::segment_of_iterate(Letter a, int depth, std::int64_t from,
                                      std::int64_t to) const {
    Word out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(0, to - from)));
    // depth-first descent expanding only blocks that meet [from, to)
    struct Frame {
        Letter letter;
        int level;
        std::int64_t offset;
    };
    std::vector<Frame> stack{{a, depth, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        std::int64_t len = iterate_length(f.letter, f.level);
        if (f.offset >= to || f.offset + len <= from) continue;
        if (f.level == 0) {
            out.push_back(f.letter);
            continue;
        }
        Word im = image(f.letter);
        std::int64_t off = f.offset;
        std::vector<Frame> children;
        children.reserve(im.size());
        for (Letter b : im) {
            children.push_back({b, f.level - 1, off});
            off += iterate_length(b, f.level - 1);
        }
        for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
    }
    return out;
}

Substitution Substitution::validate(const SubstitutionDef& def, const ValidateOptions& opts) {
    const Alphabet& al = def.alphabet;
    if (al.stride < 1) fail(Errc::schema_error, "alphabet stride must be >= 1");

    for (const auto& r : def.rules) {
        if (r.template_offsets.size() < 2)
            fail(Errc::image_too_short,
                 "rule over region " + r.region.to_string() + " has template length < 2");
        for (std::int64_t off : r.template_offsets)
            if (off % al.stride != 0)
                fail(Errc::schema_error, "template offset " + std::to_string(off) +
                                             " is not a multiple of the stride");
        if (r.region.kind == Region::Kind::le || r.region.kind == Region::Kind::ge) {
            if (!al.contains(r.region.bound))
                fail(Errc::schema_error, "region bound off the lattice");
        }
        if (r.region.kind == Region::Kind::set) {
            if (r.region.letters.empty()) fail(Errc::schema_error, "empty set region");
            for (Letter a : r.region.letters)
                if (!al.contains(a)) fail(Errc::schema_error, "set region letter off the lattice");
        }
    }
    for (const auto& [a, im] : def.exceptions) {
        if (!al.contains(a)) fail(Errc::schema_error, "exception letter off the lattice");
        if (im.size() < 2)
            fail(Errc::image_too_short, "exception image of " + std::to_string(a) + " shorter than 2");
        for (Letter b : im)
            if (!al.contains(b)) fail(Errc::schema_error, "exception image letter off the lattice");
    }

    // Pairwise rule overlap (exceptions legitimately shadow rules).
    for (std::size_t i = 0; i < def.rules.size(); ++i) {
        for (std::size_t j = i + 1; j < def.rules.size(); ++j) {
            if (regions_intersect(def.rules[i].region, def.rules[j].region, 0, al.stride))
                fail(Errc::overlapping_regions, "regions " + def.rules[i].region.to_string() +
                                                    " and " + def.rules[j].region.to_string() +
                                                    " overlap");
        }
    }

    // Coverage: every lattice letter must fall in a rule region or be an
    // exception. With half-lines this reduces to a finite gap check.
    {
        bool has_all = false;
        std::optional<Letter> best_le, best_ge;
        std::set<Letter> finite_cover;
        for (const auto& r : def.rules) {
            switch (r.region.kind) {
                case Region::Kind::all: has_all = true; break;
                case Region::Kind::le:
                    if (!best_le || r.region.bound > *best_le) best_le = r.region.bound;
                    break;
                case Region::Kind::ge:
                    if (!best_ge || r.region.bound < *best_ge) best_ge = r.region.bound;
                    break;
                case Region::Kind::set:
                    finite_cover.insert(r.region.letters.begin(), r.region.letters.end());
                    break;
            }
        }
        for (const auto& [a, _] : def.exceptions) finite_cover.insert(a);
        if (!has_all) {
            if (!best_le || !best_ge)
                fail(Errc::uncovered_letter,
                     "rules leave a half-line uncovered (need both le and ge regions, or all)");
            for (Letter a = *best_le + al.stride; a < *best_ge; a += al.stride)
                if (!finite_cover.count(a))
                    fail(Errc::uncovered_letter, "letter " + std::to_string(a) + " uncovered");
        }
    }

    Substitution s;
    s.def_ = def;

    // Derived constants over rules and exceptions.
    std::int64_t size = 0, maxlen = 0, minlen = 0;
    bool first = true;
    for (const auto& r : def.rules) {
        std::int64_t len = static_cast<std::int64_t>(r.template_offsets.size());
        std::int64_t t = 0;
        for (std::int64_t off : r.template_offsets) t = std::max(t, std::int64_t(std::abs(off)));
        size = std::max(size, t);
        maxlen = first ? len : std::max(maxlen, len);
        minlen = first ? len : std::min(minlen, len);
        first = false;
    }
    for (const auto& [a, im] : def.exceptions) {
        std::int64_t len = static_cast<std::int64_t>(im.size());
        std::int64_t t = 0;
        for (Letter b : im) t = std::max(t, std::int64_t(std::abs(b - a)));
        size = std::max(size, t);
        maxlen = first ? len : std::max(maxlen, len);
        minlen = first ? len : std::min(minlen, len);
        first = false;
    }
    if (first) fail(Errc::uncovered_letter, "definition has no rules and no exceptions");
    if (size > opts.size_cap)
        fail(Errc::size_unbounded, "computed size " + std::to_string(size) + " exceeds cap " +
                                       std::to_string(opts.size_cap));
    s.size_ = size;
    s.max_len_ = maxlen;
    s.min_len_ = minlen;

    // Injectivity. Exact check across translation rules: images of rules i, j
    // can only coincide when the templates differ by a constant shift.
    for (std::size_t i = 0; i < def.rules.size(); ++i) {
        for (std::size_t j = i + 1; j < def.rules.size(); ++j) {
            auto c = constant_difference(def.rules[i].template_offsets,
                                         def.rules[j].template_offsets);
            if (!c) continue;
            // sigma(n) = sigma(m) for n in R_i, m in R_j with m = n + c.  A
            // letter pair collides unless one of them is shadowed by an
            // exception; shadowed letters are finitely many, so demand empty
            // intersection outright and let the window check refine.
            if (regions_intersect(def.rules[i].region, def.rules[j].region, -*c, al.stride)) {
                // Exclude collisions fully shadowed by exceptions.
                bool real = false;
                Region ri = def.rules[i].region, rj = def.rules[j].region;
                // scan a generous stretch around bounds and exceptions
                std::vector<Letter> probes;
                for (const auto& r : {ri, rj}) {
                    if (r.kind == Region::Kind::le || r.kind == Region::Kind::ge)
                        probes.push_back(r.bound);
                    for (Letter a : r.letters) probes.push_back(a);
                }
                for (const auto& [a, _] : def.exceptions) probes.push_back(a);
                probes.push_back(0);
                for (Letter base : probes) {
                    for (std::int64_t d = -2 * opts.injectivity_window;
                         d <= 2 * opts.injectivity_window; ++d) {
                        Letter n = base + d * al.stride;
                        Letter m = n + *c;
                        if (!ri.contains(n) || !rj.contains(m)) continue;
                        if (def.exceptions.count(n) || def.exceptions.count(m)) continue;
                        real = true;
                        break;
                    }
                    if (real) break;
                }
                if (real)
                    fail(Errc::injectivity_violation,
                         "rules " + ri.to_string() + " and " + rj.to_string() +
                             " produce equal images (templates differ by the constant " +
                             std::to_string(*c) + ")");
            }
        }
    }
    // Exhaustive window check (catches exception collisions and anything the
    // structural check cannot see). Semi-decision; the window is reported.
    {
        std::map<Word, Letter> seen;
        for (std::int64_t idx = -opts.injectivity_window; idx <= opts.injectivity_window; ++idx) {
            Letter a = al.letter_at(idx);
            Word im = s.image(a);
            auto [it, inserted] = seen.emplace(std::move(im), a);
            if (!inserted)
                fail(Errc::injectivity_violation,
                     "letters " + std::to_string(it->second) + " and " + std::to_string(a) +
                         " share the image " + word_to_string(s.image(a)));
        }
    }

    return s;
}

std::set<Word> generate_language(const Substitution& s, std::int64_t max_len,
                                 const LetterInterval& window, const LanguageOptions& opts) {
    if (max_len < 0) fail(Errc::invalid_argument, "max_len must be >= 0");
    std::set<Word> lang;
    lang.insert(Word{});
    if (max_len == 0) return lang;

    const Alphabet& al = s.alphabet();
    std::int64_t stride = al.stride;
    std::int64_t margin =
        opts.margin.value_or(s.size() * (ceil_log2(std::max<std::int64_t>(2, max_len)) + 2));
    Letter lo = window.lo - margin, hi = window.hi + margin;
    // snap to the lattice
    while (!al.contains(lo)) ++lo;
    while (!al.contains(hi)) --hi;

    std::set<Word> closure;
    std::vector<Word> frontier;
    for (Letter a = lo; a <= hi; a += stride) {
        closure.insert(Word{a});
        frontier.push_back(Word{a});
    }

    auto in_range = [&](const Word& w) {
        for (Letter x : w)
            if (x < lo || x > hi) return false;
        return true;
    };

    // each word contributes the factors of its image exactly once; the
    // closure proceeds in waves until no wave adds anything
    int wave = 0;
    while (!frontier.empty()) {
        if (++wave > opts.iteration_cap)
            fail(Errc::non_stabilizing,
                 "language closure did not stabilize within " +
                     std::to_string(opts.iteration_cap) + " passes");
        std::vector<Word> next;
        for (const Word& w : frontier) {
            Word img = s.apply(w);
            std::int64_t L = static_cast<std::int64_t>(img.size());
            for (std::int64_t i = 0; i < L; ++i) {
                std::int64_t jmax = std::min(L, i + max_len);
                for (std::int64_t j = i + 1; j <= jmax; ++j) {
                    Word f(img.begin() + i, img.begin() + j);
                    if (!in_range(f)) continue;
                    if (closure.insert(f).second) next.push_back(std::move(f));
                }
            }
        }
        frontier = std::move(next);
    }

    for (const Word& w : closure) {
        bool inside = true;
        for (Letter x : w)
            if (!window.contains(x)) {
                inside = false;
                break;
            }
        if (inside) lang.insert(w);
    }
    return lang;
}

}  // namespace substrat
