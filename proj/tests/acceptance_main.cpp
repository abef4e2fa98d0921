// acceptance_main.cpp -- end-to-end acceptance suite. Each numbered
// criterion prints one PASS/FAIL line (per fixture where it applies); the
// process exits with the number of failures.
//
// Two checks are expected to stay red and are reported with their measured
// numbers rather than weakened thresholds: the exact-single-covering of the
// level-2 tower removal fails on the two non-constant-length fixtures
// (their admissible 3-grams force conflict cycles, so no subset of full
// towers covers exactly once), and the 10^6-step empirical letter frequency
// sits several percent away from the invariant prediction because the
// orbit equidistributes only polynomially.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "substrat/decompose.hpp"
#include "substrat/diagram.hpp"
#include "substrat/fixtures.hpp"
#include "substrat/measure.hpp"
#include "substrat/spectral.hpp"
#include "substrat/towers.hpp"

using namespace substrat;

namespace {

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("%-4s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Ctx {
    Fixture fixture;
    Substitution subst;
    std::int64_t n_sigma;
    int conj_depth_seed;      // iterate depth used to sample points
    std::int64_t conj_radius;
};

WindowedSequence sample_window(const Substitution& s, Letter seed, int depth, std::int64_t pos,
                               std::int64_t radius) {
    WindowedSequence x;
    x.start = -radius;
    x.letters = s.segment_of_iterate(seed, depth, pos - radius, pos + radius + 1);
    return x;
}

// --- criterion 1 & 2: spectral regressions --------------------------------

void criterion_spectral(const std::vector<Ctx>& ctxs) {
    const double expected[] = {3.0, 9.0, 2.0, 4.0};
    std::vector<SpectralData> data;
    for (std::size_t i = 0; i < ctxs.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        SpectralData sd = pf_eigen(BandedMatrix::from_substitution(ctxs[i].subst));
        double dt = seconds_since(t0);
        double err = std::abs(sd.lambda - expected[i]);
        report("1." + ctxs[i].fixture.id, err < 1e-6 && dt < 5.0,
               "lambda = " + std::to_string(sd.lambda) + " (err " + std::to_string(err) + ", " +
                   std::to_string(dt) + " s)");
        data.push_back(std::move(sd));
    }

    // 2: eigenvector shapes within 1e-6 on the interior
    {
        const SpectralData& sd = data[0];
        double worst = 0;
        for (std::int64_t b = sd.interior_lo + 1; b <= sd.interior_hi; ++b) {
            if (b <= 0) continue;  // ratio ell_{n+1}/ell_n for n >= 0
            worst = std::max(worst, std::abs(sd.left_at(b) / sd.left_at(b - 1) - 0.5));
        }
        report("2.one_step_forward_two_back", worst < 1e-6,
               "max |ratio - 1/2| = " + std::to_string(worst));
    }
    {
        const SpectralData& sd = data[1];
        double worst = std::abs(sd.left_at(0) / sd.left_at(-1) - 1.0);
        worst = std::max(worst, std::abs(sd.left_at(0) / sd.left_at(1) - (4.0 / 3.0)));
        for (std::int64_t b = 2; b <= sd.interior_hi; ++b)
            worst = std::max(worst, std::abs(sd.left_at(b) / sd.left_at(b - 1) - 0.25));
        report("2.squared_one_step_forward_two_back", worst < 1e-6,
               "central 1/3,1/3 then quarter powers; max deviation " + std::to_string(worst));
    }
    for (std::size_t i = 2; i < 4; ++i) {
        const SpectralData& sd = data[i];
        double worst = 0;
        for (std::int64_t b = sd.interior_lo; b <= sd.interior_hi; ++b)
            worst = std::max(worst, std::abs(sd.left_at(b) - sd.left_at(0)));
        report("2." + ctxs[i].fixture.id, worst < 1e-6,
               "constant eigenvector; max deviation " + std::to_string(worst));
    }
    // 2: rational-mode residuals are exactly zero
    for (const Ctx& c : ctxs) {
        std::int64_t K = 48 * c.subst.alphabet().stride;
        ResidualReport rr = verify_eigen_exact(c.subst, *c.fixture.closed_form,
                                               LetterInterval{-K, K});
        bool ok = *rr.exact_left_max == 0 && *rr.exact_right_max == 0;
        report("2.exact." + c.fixture.id, ok,
               "closed-form residuals " + rr.exact_left_max->str() + ", " +
                   rr.exact_right_max->str());
    }
}

// --- criterion 3: drunken-man left-determined constant ---------------------

void criterion_nsigma(const Ctx& dm) {
    auto t0 = std::chrono::steady_clock::now();
    LeftDeterminedReport rep = find_n_sigma(dm.subst, LetterInterval{-20, 20}, 8);
    double dt = seconds_since(t0);
    bool ok = rep.verdict == LeftDeterminedReport::Verdict::confirmed_on_window &&
              rep.n_sigma == 3 && dt < 10.0;
    report("3.drunken_man", ok,
           "N_sigma = " + (rep.n_sigma ? std::to_string(*rep.n_sigma) : std::string("-")) +
               " on [-20,20], max_len 8 (" + std::to_string(dt) + " s)");
}

// --- criterion 4: exact measure identities ---------------------------------

void criterion_measure_identities(const std::vector<Ctx>& ctxs) {
    for (const Ctx& c : ctxs) {
        MeasureContext ctx(c.subst, *c.fixture.closed_form);
        const std::int64_t stride = c.subst.alphabet().stride;
        bool consistency_ok = true;
        for (Letter v = -6 * stride; v <= 6 * stride && consistency_ok; v += stride)
            for (int n = 0; n <= 4; ++n)
                if (ctx.consistency_residual_exact(v, n) != 0) consistency_ok = false;
        report("4.consistency." + c.fixture.id, consistency_ok,
               "sum_u f_uv ell_u / lambda^(n+1) == ell_v / lambda^n exactly, n <= 4");

        bool nu_ok = true;
        std::string detail = "nu_n([b]) == ell_b exactly for n = 1..8";
        MeasureOptions opts;
        opts.n_max = 8;
        opts.min_depth = 8;
        opts.tol = 1.0;  // depth pinned by min_depth; every step must be exact
        LetterInterval window{-40 * stride, 40 * stride};
        for (Letter b = -3 * stride; b <= 3 * stride && nu_ok; b += stride) {
            ShiftMeasureEstimate est = ctx.cylinder_measure_shift(Word{b}, window, opts);
            Rational expect = c.fixture.closed_form->ell(b);
            for (const Rational& q : est.exact_history)
                if (q != expect) nu_ok = false;
            if (est.exact_history.size() != 8) nu_ok = false;
        }
        report("4.single_letter." + c.fixture.id, nu_ok, detail);
    }

    // independent cross-check: direct occurrence counting at depth 8 (depth 4
    // for the nine-letter fixture, whose iterates grow too fast to scan)
    for (const Ctx& c : ctxs) {
        bool deep = c.fixture.id != "squared_one_step_forward_two_back";
        int n = deep ? 8 : 4;
        const auto& cf = *c.fixture.closed_form;
        const std::int64_t stride = c.subst.alphabet().stride;
        Rational lam_n = 1;
        for (int i = 0; i < n; ++i) lam_n *= cf.lambda;
        bool ok = true;
        for (Letter b = -stride; b <= stride && ok; b += stride) {
            Rational acc = 0;
            for (Letter a = -40 * stride; a <= 40 * stride; a += stride) {
                Word w = c.subst.iterate(a, n);
                std::int64_t occ = 0;
                for (Letter x : w)
                    if (x == b) ++occ;
                acc += cf.ell(a) * occ;
            }
            if (acc / lam_n != cf.ell(b)) ok = false;
        }
        report("4.direct_count." + c.fixture.id, ok,
               "materialized occurrence sums at depth " + std::to_string(n) + " agree");
    }
}

// --- criterion 5: finiteness verdicts --------------------------------------

void criterion_total_mass(const std::vector<Ctx>& ctxs) {
    for (const Ctx& c : ctxs) {
        ClosedFormSpectral cf = *c.fixture.closed_form;
        bool expect_finite = cf.ell_total.has_value();
        cf.ell_total = std::nullopt;  // let the window partials decide
        MeasureContext ctx(c.subst, cf);
        TotalMassResult m = ctx.total_mass();
        bool ok = expect_finite ? m.verdict == TotalMassResult::Verdict::finite
                                : m.verdict == TotalMassResult::Verdict::divergent_evidence;
        std::string v = m.verdict == TotalMassResult::Verdict::finite ? "finite"
                        : m.verdict == TotalMassResult::Verdict::divergent_evidence
                            ? "divergent-evidence"
                            : "inconclusive";
        report("5." + c.fixture.id, ok, "total mass " + v);
    }
}

// --- criterion 6: conjugacy of the shift with the Vershik successor --------

void criterion_conjugacy(const std::vector<Ctx>& ctxs) {
    for (const Ctx& c : ctxs) {
        const Substitution& s = c.subst;
        StationaryDiagram diagram(s);
        HeightTable h = heights(s, 3, LetterInterval{-32 * s.alphabet().stride,
                                                     32 * s.alphabet().stride});
        std::int64_t agreed = 0, compared = 0, skipped = 0;
        std::uint64_t rng = 0x5eed;
        std::int64_t len = s.iterate_length(0, c.conj_depth_seed);
        for (int trial = 0; trial < 4000 && compared < 120; ++trial) {
            std::int64_t pos =
                c.conj_radius + 2 +
                std::int64_t(splitmix64(rng) %
                             std::uint64_t(len - 2 * c.conj_radius - 6));
            WindowedSequence x = sample_window(s, 0, c.conj_depth_seed, pos, c.conj_radius + 2);
            std::vector<std::pair<std::int64_t, Letter>> rx, rtx;
            try {
                for (int n = 1; n <= 3; ++n) {
                    TowerAddress ax = locate_in_tower(s, x, n, c.n_sigma);
                    rx.emplace_back(ax.floor, ax.base_letter);
                    TowerAddress atx = locate_in_tower(s, x.shifted(1), n, c.n_sigma);
                    rtx.emplace_back(atx.floor, atx.base_letter);
                }
            } catch (const Error&) {
                ++skipped;
                continue;
            }
            auto px = prefix_from_ranks(diagram, rx, h);
            auto ptx = prefix_from_ranks(diagram, rtx, h);
            if (!px || !ptx) {
                ++skipped;
                continue;
            }
            auto succ = vershik_successor(diagram, *px);
            if (!succ) {
                ++skipped;  // prefix-maximal: the carry leaves depth-3 scope
                continue;
            }
            ++compared;
            if (succ->top == ptx->top && succ->positions == ptx->positions) ++agreed;
        }
        bool ok = compared >= 100 && agreed == compared;
        report("6." + c.fixture.id, ok,
               std::to_string(agreed) + "/" + std::to_string(compared) +
                   " successors agree (skipped " + std::to_string(skipped) + " ambiguous)");
    }
}

// --- criterion 7: enumeration bijectivity, exhaustive -----------------------

void criterion_bijectivity(const std::vector<Ctx>& ctxs) {
    for (const Ctx& c : ctxs) {
        const Substitution& s = c.subst;
        StationaryDiagram d(s);
        const std::int64_t stride = s.alphabet().stride;
        HeightTable h = heights(s, 2, LetterInterval{-10 * stride, 10 * stride});
        bool ok = true;
        std::int64_t vertices = 0;
        for (Letter a = -10 * stride; a <= 10 * stride && ok; a += stride) {
            std::int64_t ha = h.at(2, a);
            if (ha > 256) continue;
            ++vertices;
            std::vector<char> seen(static_cast<std::size_t>(ha), 0);
            Word src2 = d.ordered_sources(a);
            for (std::int64_t j2 = 0; ok && j2 < static_cast<std::int64_t>(src2.size()); ++j2) {
                Word src1 = d.ordered_sources(src2[static_cast<std::size_t>(j2)]);
                for (std::int64_t j1 = 0; j1 < static_cast<std::int64_t>(src1.size()); ++j1) {
                    PathPrefix p;
                    p.top = a;
                    p.positions = {j1, j2};
                    auto ranks = path_index(d, p, h);
                    std::int64_t i2 = ranks[1].first;
                    if (i2 < 0 || i2 >= ha || seen[static_cast<std::size_t>(i2)]) {
                        ok = false;
                        break;
                    }
                    seen[static_cast<std::size_t>(i2)] = 1;
                    auto succ = vershik_successor(d, p);
                    if (succ) {
                        if (path_index(d, *succ, h)[1].first != i2 + 1) ok = false;
                    } else if (i2 != ha - 1) {
                        ok = false;
                    }
                }
            }
        }
        report("7." + c.fixture.id, ok,
               "path_index bijective onto [0, h(2,a)) with successor = rank+1 over " +
                   std::to_string(vertices) + " vertices");
    }
}

// --- criterion 8: Birkhoff frequency (expected red; see header note) --------

void criterion_birkhoff(const Ctx& os) {
    auto t0 = std::chrono::steady_clock::now();
    MeasureContext ctx(os.subst, *os.fixture.closed_form);
    const std::int64_t orbit = 1'000'000;
    int depth = 13;  // 3^13 = 1594323 letters, centered
    WindowedSequence seed = birkhoff_seed(os.subst, 0, depth, orbit + 1);
    BirkhoffResult br = ctx.birkhoff_check(Word{0}, orbit, seed, LetterInterval{-40, 40});
    double dt = seconds_since(t0);
    double rel = std::abs(br.frequency - br.predicted) / br.predicted;
    bool ok = rel <= 0.02 && dt < 30.0;
    report("8.one_step_forward_two_back", ok,
           "frequency " + std::to_string(br.frequency) + " vs predicted " +
               std::to_string(br.predicted) + " (rel " + std::to_string(100 * rel) + "%, " +
               std::to_string(dt) + " s)");
}

// --- criterion 9: tower exactness (red on the non-constant-length pair) -----

void criterion_tower_exactness(const std::vector<Ctx>& ctxs) {
    for (const Ctx& c : ctxs) {
        const Substitution& s = c.subst;
        const std::int64_t stride = s.alphabet().stride;
        std::int64_t Kw = (c.fixture.id == "squared_one_step_forward_two_back" ? 32 : 30) * stride;
        PnResult pn = build_pn(s, 2, LetterInterval{-Kw, Kw}, c.n_sigma);
        std::set<Word> kept;
        for (const auto& t : pn.kept)
            if (!t.boundary) kept.insert(t.word);
        std::set<Word> lang2 = generate_language(s, 2, LetterInterval{-Kw, Kw});

        int sample_depth = c.fixture.id == "drunken_man"          ? 7
                           : c.fixture.id == "random_walk"        ? 12
                           : c.fixture.id == "one_step_forward_two_back" ? 9
                                                                  : 5;
        std::int64_t radius = (c.n_sigma + 1) / 2 + 3 * s.max_length() + 4;
        std::int64_t len = s.iterate_length(0, sample_depth);
        std::uint64_t rng = 0xc0ffee;
        std::int64_t before_ok = 0, after_ok = 0, total = 0;
        for (int trial = 0; trial < 40000 && total < 1000; ++trial) {
            std::int64_t pos = radius + 1 +
                               std::int64_t(splitmix64(rng) % std::uint64_t(len - 2 * radius - 4));
            WindowedSequence x = sample_window(s, 0, sample_depth, pos, radius);
            PreimageContext pc;
            try {
                pc = preimage_context(s, x, 1, 1, c.n_sigma);
            } catch (const Error&) {
                continue;
            }
            Word up{pc.letters[0], pc.letters[1]};
            Word lo{pc.letters[1], pc.letters[2]};
            auto interior = [&](const Word& w) {
                for (Letter a : w)
                    if (a < -Kw + pn.margin || a > Kw - pn.margin) return false;
                return true;
            };
            if (!interior(up) || !interior(lo)) continue;
            ++total;
            if (lang2.count(up) && lang2.count(lo)) ++before_ok;  // two address copies
            int covers = int(kept.count(up)) + int(up == lo ? 0 : kept.count(lo));
            if (covers == 1) ++after_ok;
        }
        bool ok = total >= 1000 && before_ok == total && after_ok == total;
        report("9." + c.fixture.id, ok,
               "of " + std::to_string(total) + " sampled points: " + std::to_string(before_ok) +
                   " doubly covered before, " + std::to_string(after_ok) +
                   " exactly-once after removal");
    }
}

}  // namespace

int main() {
    std::vector<Ctx> ctxs;
    ctxs.push_back({fixture_one_step_forward_two_back(),
                    Substitution::validate(fixture_one_step_forward_two_back().def), 3, 8, 41});
    ctxs.push_back({fixture_squared_one_step_forward_two_back(),
                    Substitution::validate(fixture_squared_one_step_forward_two_back().def), 8, 5,
                    1053});
    ctxs.push_back({fixture_random_walk(), Substitution::validate(fixture_random_walk().def), 2,
                    12, 12});
    ctxs.push_back({fixture_drunken_man(), Substitution::validate(fixture_drunken_man().def), 3,
                    8, 88});

    criterion_spectral(ctxs);
    criterion_nsigma(ctxs[3]);
    criterion_measure_identities(ctxs);
    criterion_total_mass(ctxs);
    criterion_conjugacy(ctxs);
    criterion_bijectivity(ctxs);
    criterion_birkhoff(ctxs[0]);
    criterion_tower_exactness(ctxs);

    std::printf("%d criterion check(s) failed\n", g_failures);
    return g_failures;
}
