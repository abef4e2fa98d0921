#include "substrat/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "substrat/decompose.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace substrat {

MeasureContext::MeasureContext(Substitution s, ClosedFormSpectral cf)
    : s_(std::move(s)), cf_(std::move(cf)) {}

MeasureContext::MeasureContext(Substitution s, SpectralData sd)
    : s_(std::move(s)), sd_(std::move(sd)) {}

double MeasureContext::lambda() const { return cf_ ? to_double(cf_->lambda) : sd_->lambda; }

Rational MeasureContext::lambda_exact() const {
    if (!cf_) fail(Errc::invalid_argument, "exact lambda requires rational mode");
    return cf_->lambda;
}

double MeasureContext::ell(Letter a) const {
    if (cf_) return to_double(cf_->ell(a));
    return sd_->left_at(s_.alphabet().index_of(a));
}

Rational MeasureContext::ell_exact(Letter a) const {
    if (!cf_) fail(Errc::invalid_argument, "exact eigenvector requires rational mode");
    return cf_->ell(a);
}

LetterInterval MeasureContext::support() const {
    if (cf_) {
        const std::int64_t huge = 1'000'000'000;
        return LetterInterval{-huge, huge};
    }
    const Alphabet al = s_.alphabet();
    return LetterInterval{al.letter_at(sd_->interior_lo), al.letter_at(sd_->interior_hi)};
}

double MeasureContext::cylinder_measure_path(Letter v, int n) const {
    if (!support().contains(v)) fail(Errc::boundary_vertex, "vertex outside the spectral interior");
    return ell(v) / std::pow(lambda(), double(n));
}

Rational MeasureContext::cylinder_measure_path_exact(Letter v, int n) const {
    if (!cf_) fail(Errc::invalid_argument, "rational mode required");
    Rational p = 1;
    for (int i = 0; i < n; ++i) p *= cf_->lambda;
    return cf_->ell(v) / p;
}

double MeasureContext::consistency_residual(Letter v, int n) const {
    const Alphabet al = s_.alphabet();
    LetterInterval sup = support();
    if (v - s_.size() < sup.lo || v + s_.size() > sup.hi)
        fail(Errc::boundary_vertex, "vertex band leaves the spectral interior");
    double acc = 0.0;
    for (Letter a = v - s_.size(); a <= v + s_.size(); ++a) {
        if (!al.contains(a)) continue;
        auto row = s_.abelianize_row(a);
        auto it = row.find(v);
        if (it != row.end()) acc += ell(a) * double(it->second);
    }
    double lam = lambda();
    return acc / std::pow(lam, double(n + 1)) - ell(v) / std::pow(lam, double(n));
}

Rational MeasureContext::consistency_residual_exact(Letter v, int n) const {
    if (!cf_) fail(Errc::invalid_argument, "rational mode required");
    const Alphabet al = s_.alphabet();
    Rational acc = 0;
    for (Letter a = v - s_.size(); a <= v + s_.size(); ++a) {
        if (!al.contains(a)) continue;
        auto row = s_.abelianize_row(a);
        auto it = row.find(v);
        if (it != row.end()) acc += cf_->ell(a) * it->second;
    }
    Rational lam_n = 1;
    for (int i = 0; i < n; ++i) lam_n *= cf_->lambda;
    return acc / (lam_n * cf_->lambda) - cf_->ell(v) / lam_n;
}

TotalMassResult MeasureContext::total_mass(const std::vector<std::int64_t>& schedule) const {
    TotalMassResult res;
    const Alphabet al = s_.alphabet();
    LetterInterval sup = support();
    std::vector<double> partial;
    for (std::int64_t K : schedule) {
        std::int64_t lo = std::max<std::int64_t>(-K, al.index_of(sup.lo));
        std::int64_t hi = std::min<std::int64_t>(K, al.index_of(sup.hi));
        double acc = 0.0;
        for (std::int64_t i = lo; i <= hi; ++i) acc += ell(al.letter_at(i));
        res.partials.emplace_back(K, acc);
        partial.push_back(acc);
    }
    if (cf_ && cf_->ell_total) {
        res.verdict = TotalMassResult::Verdict::finite;
        res.exact_value = *cf_->ell_total;
        res.value = to_double(*cf_->ell_total);
        return res;
    }
    if (partial.size() < 3) return res;
    double d1 = partial[partial.size() - 2] - partial[partial.size() - 3];
    double d2 = partial[partial.size() - 1] - partial[partial.size() - 2];
    double scale = std::max(1.0, std::abs(partial.back()));
    if (d2 < 1e-9 * scale) {
        res.verdict = TotalMassResult::Verdict::finite;
        res.value = partial.back();
    } else if (d2 > 0.5 * d1) {
        res.verdict = TotalMassResult::Verdict::divergent_evidence;
        res.value = partial.back();
    } else {
        // geometric decay of window increments: extrapolate the tail
        double q = d2 / d1;
        res.verdict = TotalMassResult::Verdict::finite;
        res.value = partial.back() + d2 * q / (1.0 - q);
    }
    return res;
}

namespace {

// Spanning occurrences of g in sigma(gp): occurrences that meet both the
// first and the last block.
std::int64_t spanning_count(const Substitution& s, const Word& g, const Word& gp) {
    Word img = s.apply(gp);
    std::int64_t L = static_cast<std::int64_t>(img.size());
    std::int64_t gl = static_cast<std::int64_t>(g.size());
    if (gl > L) return 0;
    std::int64_t first_len = s.image_length(gp.front());
    std::int64_t last_len = s.image_length(gp.back());
    std::int64_t count = 0;
    for (std::int64_t p = 0; p + gl <= L; ++p) {
        if (gp.size() > 1) {
            if (p >= first_len) continue;            // misses the first block
            if (p + gl <= L - last_len) continue;    // misses the last block
        }
        if (std::equal(g.begin(), g.end(), img.begin() + p)) ++count;
    }
    return count;
}

template <class Scalar>
struct ShiftEngine {
    const Substitution& s;
    std::function<Scalar(Letter)> ell;
    Scalar lambda;

    std::vector<Word> grams;
    std::map<Word, std::size_t> gram_id;
    // transfer[i] = [(j, count)]: occ(g_i, sigma^n(a)) = sum_j count * occ(g_j, sigma^(n-1)(a))
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> transfer;

    ShiftEngine(const Substitution& subst, std::function<Scalar(Letter)> e, Scalar lam,
                std::int64_t gcap, const LetterInterval& window, int n_max, ExecMode exec)
        : s(subst), ell(std::move(e)), lambda(std::move(lam)) {
        std::int64_t inflate = s.size() * (n_max + 2);
        LetterInterval gwin{window.lo - inflate, window.hi + inflate};
        std::set<Word> lang = generate_language(s, std::max<std::int64_t>(gcap, 2), gwin);
        for (const Word& g : lang) {
            if (g.empty() || static_cast<std::int64_t>(g.size()) > gcap) continue;
            gram_id[g] = grams.size();
            grams.push_back(g);
        }
        std::vector<std::pair<Letter, Letter>> range(grams.size());
        for (std::size_t i = 0; i < grams.size(); ++i)
            range[i] = {*std::min_element(grams[i].begin(), grams[i].end()),
                        *std::max_element(grams[i].begin(), grams[i].end())};
        transfer.assign(grams.size(), {});
        auto build_row = [&](std::size_t i) {
            const Word& g = grams[i];
            std::vector<std::pair<std::size_t, std::int64_t>> row;
            for (std::size_t j = 0; j < grams.size(); ++j) {
                const Word& gp = grams[j];
                // a spanning occurrence needs |g| >= 2|gp| - 2 letters and
                // letters of g inside the band of gp
                if (gp.size() > 1 &&
                    static_cast<std::int64_t>(g.size()) <
                        2 * static_cast<std::int64_t>(gp.size()) - 2)
                    continue;
                if (range[i].first < range[j].first - s.size() ||
                    range[i].second > range[j].second + s.size())
                    continue;
                std::int64_t c = spanning_count(s, g, gp);
                if (c > 0) row.emplace_back(j, c);
            }
            transfer[i] = std::move(row);
        };
        if (exec == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
            for (std::size_t i = 0; i < grams.size(); ++i) build_row(i);
#else
            for (std::size_t i = 0; i < grams.size(); ++i) build_row(i);
#endif
        } else {
            for (std::size_t i = 0; i < grams.size(); ++i) build_row(i);
        }
    }

    // S_0(g) = ell(g) for single letters inside the caller's window.
    std::vector<Scalar> initial(const LetterInterval& window) const {
        std::vector<Scalar> v(grams.size(), Scalar(0));
        for (std::size_t i = 0; i < grams.size(); ++i)
            if (grams[i].size() == 1 && window.contains(grams[i][0]))
                v[i] = ell(grams[i][0]);
        return v;
    }

    std::vector<Scalar> step(const std::vector<Scalar>& prev, ExecMode exec) const {
        std::vector<Scalar> next(grams.size(), Scalar(0));
        auto one = [&](std::size_t i) {
            Scalar acc(0);
            for (const auto& [j, c] : transfer[i]) acc += prev[j] * Scalar(c);
            next[i] = acc / lambda;
        };
        if (exec == ExecMode::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
            for (std::size_t i = 0; i < grams.size(); ++i) one(i);
#else
            for (std::size_t i = 0; i < grams.size(); ++i) one(i);
#endif
        } else {
            for (std::size_t i = 0; i < grams.size(); ++i) one(i);
        }
        return next;
    }
};

template <class Scalar>
struct ShiftRun {
    Scalar value{0};
    std::vector<Scalar> history;
    int depth = 0;
    bool converged = false;
};

template <class Scalar>
ShiftRun<Scalar> run_shift(const ShiftEngine<Scalar>& eng, const LetterInterval& window,
                           const Word& w, int n_max, int min_depth, const Scalar& tol,
                           ExecMode exec) {
    ShiftRun<Scalar> out;
    auto it = eng.gram_id.find(w);
    if (it == eng.gram_id.end()) {
        out.converged = true;  // not a window-language word: measure zero
        return out;
    }
    std::size_t target = it->second;
    std::vector<Scalar> v = eng.initial(window);
    Scalar prev = v[target];
    for (int n = 1; n <= n_max; ++n) {
        v = eng.step(v, exec);
        out.depth = n;
        Scalar cur = v[target];
        out.history.push_back(cur);
        Scalar diff = cur - prev;
        if (diff < Scalar(0)) diff = -diff;
        if (n >= min_depth && diff <= tol) {
            out.converged = true;
            out.value = cur;
            return out;
        }
        prev = cur;
    }
    out.value = prev;
    return out;
}

}  // namespace

ShiftMeasureEstimate MeasureContext::cylinder_measure_shift(const Word& w,
                                                            const LetterInterval& window,
                                                            const MeasureOptions& opts) const {
    ShiftMeasureEstimate est;
    est.word = w;
    if (w.empty()) {
        est.mass = total_mass(opts.mass_schedule);
        est.estimate = est.mass->value;
        est.converged = est.mass->verdict != TotalMassResult::Verdict::inconclusive;
        return est;
    }
    if (window.lo > window.hi) fail(Errc::window_too_narrow_for_depth, "empty letter window");
    std::int64_t gcap = std::max<std::int64_t>(1, static_cast<std::int64_t>(w.size()));

    if (cf_) {
        ShiftEngine<Rational> eng(s_, cf_->ell, cf_->lambda, gcap, window, opts.n_max, opts.exec);
        Rational tol(0);
        if (opts.tol > 0)
            tol = Rational(std::int64_t(std::llround(opts.tol * 1e18)),
                           std::int64_t(1'000'000'000'000'000'000LL));
        ShiftRun<Rational> run = run_shift<Rational>(eng, window, w, opts.n_max, opts.min_depth,
                                                     tol, opts.exec);
        est.depth = run.depth;
        est.converged = run.converged;
        est.exact_estimate = run.value;
        est.estimate = to_double(run.value);
        est.exact_history = run.history;
        for (const Rational& q : run.history) est.history.push_back(to_double(q));
    } else {
        auto ellf = [this](Letter a) { return ell(a); };
        ShiftEngine<double> eng(s_, ellf, sd_->lambda, gcap, window, opts.n_max, opts.exec);
        ShiftRun<double> run =
            run_shift<double>(eng, window, w, opts.n_max, opts.min_depth, opts.tol, opts.exec);
        est.depth = run.depth;
        est.converged = run.converged;
        est.estimate = run.value;
        est.history = run.history;
    }
    if (est.history.size() >= 2)
        est.achieved_tol = std::abs(est.history.back() - est.history[est.history.size() - 2]);
    if (!est.converged)
        fail(Errc::no_convergence, "shift measure of " + word_to_string(w) +
                                       " did not settle within depth " + std::to_string(opts.n_max));

    // dropped boundary occurrences: (|w|-1) per block junction, weighted
    double mass_win = 0.0;
    {
        const Alphabet al = s_.alphabet();
        Letter lo = window.lo;
        while (!al.contains(lo)) ++lo;
        for (Letter a = lo; a <= window.hi; a += al.stride)
            if (support().contains(a)) mass_win += ell(a);
    }
    est.boundary_error_bound = double(w.size() - 1) * mass_win /
                               std::pow(lambda(), double(std::max(est.depth, 1)));
    return est;
}

double MeasureContext::shift_invariance_residual(const Word& w, const LetterInterval& window,
                                                 const MeasureOptions& opts) const {
    if (w.empty()) fail(Errc::invalid_argument, "needs a nonempty word");
    ShiftMeasureEstimate base = cylinder_measure_shift(w, window, opts);
    LanguageOracle oracle(s_);
    double total = 0.0;
    const Alphabet al = s_.alphabet();
    // admissible one-letter extensions b w
    std::int64_t reach = 4 * s_.size() + al.stride;
    bool any = false;
    for (Letter b = w.front() - reach; b <= w.front() + reach; ++b) {
        if (!al.contains(b)) continue;
        Word bw;
        bw.push_back(b);
        bw.insert(bw.end(), w.begin(), w.end());
        if (!oracle.contains(bw)) continue;
        any = true;
        total += cylinder_measure_shift(bw, window, opts).estimate;
    }
    if (!any)
        fail(Errc::no_convergence,
             "no admissible extension of " + word_to_string(w) + "; empty preimage sum");
    return std::abs(base.estimate - total);
}

BirkhoffResult MeasureContext::birkhoff_check(const Word& w, std::int64_t orbit_len,
                                              const WindowedSequence& seed,
                                              const LetterInterval& window,
                                              const MeasureOptions& opts) const {
    if (w.empty()) fail(Errc::invalid_argument, "needs a nonempty word");
    if (orbit_len < static_cast<std::int64_t>(w.size()))
        fail(Errc::seed_too_short, "orbit shorter than the word itself");
    std::int64_t need_hi = orbit_len + static_cast<std::int64_t>(w.size()) - 1;
    if (seed.lo() > 0 || seed.hi() < need_hi - 1)
        fail(Errc::seed_too_short, "seed window does not cover orbit positions [0, " +
                                       std::to_string(need_hi) + ")");
    TotalMassResult mass = total_mass(opts.mass_schedule);
    if (mass.verdict != TotalMassResult::Verdict::finite)
        fail(Errc::invalid_argument,
             "total mass is not finite; frequencies have no probability normalization");

    std::int64_t count = 0;
    const std::int64_t gl = static_cast<std::int64_t>(w.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(+ : count)
#endif
    for (std::int64_t p = 0; p < orbit_len; ++p) {
        bool hit = true;
        for (std::int64_t q = 0; q < gl; ++q)
            if (seed.at(p + q) != w[q]) {
                hit = false;
                break;
            }
        if (hit) ++count;
    }

    BirkhoffResult res;
    res.orbit_len = orbit_len;
    res.occurrences = count;
    res.frequency = double(count) / double(orbit_len);
    ShiftMeasureEstimate nu = cylinder_measure_shift(w, window, opts);
    res.predicted = nu.estimate / mass.value;
    return res;
}

WindowedSequence birkhoff_seed(const Substitution& s, Letter a, int depth, std::int64_t need) {
    std::int64_t len = s.iterate_length(a, depth);
    if (len < need)
        fail(Errc::seed_too_short, "|sigma^" + std::to_string(depth) + "(" + std::to_string(a) +
                                       ")| = " + std::to_string(len) +
                                       " cannot host an orbit of " + std::to_string(need));
    std::int64_t base = (len - need) / 2;
    WindowedSequence seed;
    seed.start = 0;
    seed.letters = s.segment_of_iterate(a, depth, base, base + need);
    return seed;
}

}  // namespace substrat
