#include "substrat/cli_lib.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "substrat/decompose.hpp"
#include "substrat/diagram.hpp"
#include "substrat/fixtures.hpp"
#include "substrat/io.hpp"
#include "substrat/measure.hpp"
#include "substrat/spectral.hpp"
#include "substrat/towers.hpp"

namespace substrat {

namespace fs = std::filesystem;

int exit_code_for(Errc c) {
    switch (c) {
        case Errc::ambiguous_decomposition:
            return 3;
        case Errc::no_convergence:
        case Errc::non_stabilizing:
        case Errc::overflow:
            return 4;
        case Errc::io_error:
            return 5;
        default:
            return 2;
    }
}

std::string resolve_substitution_path(const std::string& subject) {
    if (fs::exists(subject)) return subject;
    const char* env = std::getenv("SUBSTRAT_FIXTURES");
    fs::path dir = env ? fs::path(env) : fs::path("fixtures");
    for (const auto& cand : {dir / subject, dir / (subject + ".json")}) {
        if (fs::exists(cand)) return cand.string();
    }
    fail(Errc::io_error, "substitution file '" + subject + "' not found (searched " +
                             dir.string() + ")");
}

namespace {

bool same_definition(const SubstitutionDef& a, const SubstitutionDef& b) {
    return substitution_to_json(a) == substitution_to_json(b);
}

struct Session {
    SubstitutionDef def;
    Substitution subst;
    std::optional<ClosedFormSpectral> closed_form;  // when the fixture is recognized
    bool rational;

    Session(const JobConfig& cfg) : subst(Substitution::validate(load(cfg))) {
        for (const Fixture& f : all_fixtures()) {
            SubstitutionDef named = def;
            named.name = f.def.name;
            if (same_definition(named, f.def)) {
                closed_form = f.closed_form;
                break;
            }
        }
        if (cfg.mode == "rational") {
            if (!closed_form)
                fail(Errc::invalid_argument,
                     "rational mode needs a fixture with closed-form spectral data");
            rational = true;
        } else if (cfg.mode == "float") {
            rational = false;
        } else if (cfg.mode == "auto") {
            rational = closed_form.has_value();
        } else {
            fail(Errc::invalid_argument, "mode must be rational|float|auto");
        }
    }

    SubstitutionDef load(const JobConfig& cfg) {
        def = parse_substitution_file(resolve_substitution_path(cfg.subject));
        return def;
    }

    std::int64_t window_or(const JobConfig& cfg, std::int64_t dflt_halfwidth) const {
        std::int64_t k = cfg.window > 0 ? cfg.window : dflt_halfwidth * subst.alphabet().stride;
        return k;
    }
};

std::string summary(const Substitution& s) {
    std::ostringstream os;
    os << "substitution '" << s.name() << "' on " << s.alphabet().stride << "Z+"
       << s.alphabet().residue << ": size t=" << s.size() << ", lengths " << s.min_length() << ".."
       << s.max_length() << (s.constant_length() ? " (constant length)" : "") << "\n";
    return os.str();
}

SpectralData spectral_of(const Session& ses, const JobConfig& cfg) {
    BandedMatrix m = BandedMatrix::from_substitution(ses.subst);
    SpectralOptions opts;
    opts.schedule = cfg.schedule;
    opts.tol = cfg.tol;
    return pf_eigen(m, opts);
}

MeasureContext measure_context(const Session& ses, const SpectralData* sd) {
    if (ses.rational) return MeasureContext(ses.subst, *ses.closed_form);
    return MeasureContext(ses.subst, *sd);
}

std::int64_t resolve_nsigma(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    std::int64_t K = ses.window_or(cfg, 20);
    LeftDeterminedReport rep = find_n_sigma(ses.subst, LetterInterval{-K, K}, cfg.max_len);
    if (rep.verdict != LeftDeterminedReport::Verdict::confirmed_on_window) {
        out << render_left_determined(rep);
        fail(Errc::ambiguous_decomposition, "left-determined check refuted on the window");
    }
    return *rep.n_sigma;
}

int cmd_validate(const Session& ses, const JobConfig&, std::ostream& out) {
    out << summary(ses.subst);
    out << "validation: ok\n";
    return 0;
}

int cmd_language(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    std::int64_t K = ses.window_or(cfg, 12);
    auto lang = generate_language(ses.subst, cfg.max_len, LetterInterval{-K, K});
    std::vector<Word> words(lang.begin(), lang.end());
    std::sort(words.begin(), words.end(), [](const Word& a, const Word& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return spiral_lex_less(a, b);
    });
    out << "language words up to length " << cfg.max_len << " on [" << -K << ", " << K
        << "]: " << words.size() << "\n";
    for (const Word& w : words) out << "  " << word_to_string(w) << "\n";
    return 0;
}

int cmd_nsigma(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    std::int64_t K = ses.window_or(cfg, 20);
    LeftDeterminedReport rep = find_n_sigma(ses.subst, LetterInterval{-K, K}, cfg.max_len);
    out << render_left_determined(rep);
    if (rep.verdict != LeftDeterminedReport::Verdict::confirmed_on_window) return 3;
    return 0;
}

int cmd_decompose(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    if (!cfg.word) fail(Errc::invalid_argument, "decompose needs a word argument");
    std::int64_t n_sigma = resolve_nsigma(ses, cfg, out);
    Decomposition d = sigma_decompose(ses.subst, *cfg.word, n_sigma);
    out << "word " << word_to_string(*cfg.word) << " (N_sigma = " << n_sigma << ")\n";
    out << "  head: " << word_to_string(d.head) << " witnesses {";
    bool first = true;
    for (Letter a : d.head_witnesses) out << (first ? "" : ",") << a, first = false;
    out << "}\n  core: " << word_to_string(Word(d.core.begin(), d.core.end()));
    out << "\n  tail: " << word_to_string(d.tail) << " witnesses {";
    first = true;
    for (Letter a : d.tail_witnesses) out << (first ? "" : ",") << a, first = false;
    out << "}\n";
    return 0;
}

int cmd_towers(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    int level = cfg.depth > 0 ? cfg.depth : 2;
    std::int64_t K = ses.window_or(cfg, 10);
    std::int64_t n_sigma = resolve_nsigma(ses, cfg, out);
    PnResult pn = build_pn(ses.subst, level, LetterInterval{-K, K}, n_sigma);
    out << "P_" << level << " on [" << -K << ", " << K << "]: " << pn.kept.size() << " towers kept, "
        << pn.removed << " removed, " << pn.forced_kept << " forced\n";
    out << "  exact on interior: " << (pn.exact_on_interior ? "yes" : "no") << " ("
        << pn.violations << " violations over " << pn.interior_classes << " classes"
        << (pn.odd_conflict_cycle ? ", odd conflict cycle present" : "") << ")\n";
    out << "  order: spiral enumeration 0,-1,1,-2,2,...\n";
    if (cfg.out_dir) write_file(*cfg.out_dir + "/towers.csv", towers_csv(pn));
    return 0;
}

int cmd_diagram(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    StationaryDiagram d(ses.subst);
    int levels = cfg.depth > 0 ? cfg.depth : 3;
    std::int64_t K = ses.window_or(cfg, 6);
    std::string dot = export_dot(d, levels, LetterInterval{-K, K});
    if (cfg.dot_file) {
        write_file(*cfg.dot_file, dot);
        out << "wrote " << *cfg.dot_file << "\n";
    } else {
        out << dot;
    }
    return 0;
}

int cmd_spectral(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    SpectralData sd = spectral_of(ses, cfg);
    out << render_spectral(sd);
    if (ses.rational) {
        std::int64_t K = ses.window_or(cfg, 32);
        ResidualReport rr = verify_eigen_exact(ses.subst, *ses.closed_form,
                                               LetterInterval{-K, K});
        out << "  closed-form residual (exact): left " << rr.exact_left_max->str() << ", right "
            << rr.exact_right_max->str() << "\n";
    }
    if (cfg.out_dir)
        write_file(*cfg.out_dir + "/eigenvector.csv", eigenvector_csv(ses.subst.alphabet(), sd));
    return 0;
}

int cmd_classify(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    SpectralData sd = spectral_of(ses, cfg);
    RecurrenceOptions ro;
    if (cfg.depth > 0) ro.n_max = cfg.depth;
    RecurrenceVerdict v = classify_recurrence(BandedMatrix::from_substitution(ses.subst), sd, ro);
    out << render_recurrence(v);
    return 0;
}

int cmd_measure(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    if (!cfg.word) fail(Errc::invalid_argument, "measure needs a word argument");
    std::optional<SpectralData> sd;
    if (!ses.rational) sd = spectral_of(ses, cfg);
    MeasureContext ctx = measure_context(ses, sd ? &*sd : nullptr);
    std::int64_t K = ses.window_or(cfg, 40);
    MeasureOptions mo;
    mo.tol = cfg.tol;
    if (cfg.depth > 0) mo.n_max = cfg.depth;
    ShiftMeasureEstimate est = ctx.cylinder_measure_shift(*cfg.word, LetterInterval{-K, K}, mo);
    if (est.mass) {
        out << render_total_mass(*est.mass);
        return 0;
    }
    out << "nu(" << word_to_string(*cfg.word) << ") = " << format_double(est.estimate);
    if (est.exact_estimate) out << " (exact " << est.exact_estimate->str() << ")";
    out << " at depth " << est.depth << ", boundary error bound "
        << format_double(est.boundary_error_bound) << "\n";
    if (cfg.out_dir)
        write_file(*cfg.out_dir + "/measure.csv",
                   measure_csv({est}, ses.rational ? "rational" : "float"));
    return 0;
}

int cmd_simulate(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    std::optional<SpectralData> sd;
    if (!ses.rational) sd = spectral_of(ses, cfg);
    MeasureContext ctx = measure_context(ses, sd ? &*sd : nullptr);
    Word w = cfg.word.value_or(Word{cfg.seed_letter});
    std::int64_t need = cfg.orbit + static_cast<std::int64_t>(w.size());
    int depth = 1;
    while (ses.subst.iterate_length(cfg.seed_letter, depth) < need) ++depth;
    depth = std::min(depth + 2, depth * 2);  // a little slack above the minimum
    WindowedSequence seed = birkhoff_seed(ses.subst, cfg.seed_letter, depth, need);
    std::int64_t K = ses.window_or(cfg, 40);
    MeasureOptions mo;
    mo.tol = cfg.tol;
    BirkhoffResult br = ctx.birkhoff_check(w, cfg.orbit, seed, LetterInterval{-K, K}, mo);
    out << "orbit " << br.orbit_len << " from sigma^" << depth << "(" << cfg.seed_letter
        << ") centered\n";
    out << "  empirical frequency of " << word_to_string(w) << ": " << format_double(br.frequency)
        << " (" << br.occurrences << " hits)\n";
    out << "  predicted (probability-normalized): " << format_double(br.predicted) << "\n";
    return 0;
}

int cmd_report(const Session& ses, const JobConfig& cfg, std::ostream& out) {
    out << "== substrat report ==\n";
    out << summary(ses.subst);

    std::int64_t Kn = ses.window_or(cfg, 20);
    LeftDeterminedReport ld = find_n_sigma(ses.subst, LetterInterval{-Kn, Kn}, cfg.max_len);
    out << render_left_determined(ld);
    if (ld.verdict != LeftDeterminedReport::Verdict::confirmed_on_window) return 3;

    SpectralData sd = spectral_of(ses, cfg);
    out << render_spectral(sd);

    RecurrenceVerdict rv =
        classify_recurrence(BandedMatrix::from_substitution(ses.subst), sd, RecurrenceOptions{});
    out << render_recurrence(rv);

    MeasureContext ctx = measure_context(ses, &sd);
    TotalMassResult mass = ctx.total_mass(cfg.schedule);
    out << render_total_mass(mass);

    std::int64_t Km = ses.window_or(cfg, 40);
    std::vector<ShiftMeasureEstimate> rows;
    out << "single-letter measures nu([b]) = ell_b:\n";
    for (Letter b = -4 * ses.subst.alphabet().stride; b <= 4 * ses.subst.alphabet().stride; ++b) {
        if (!ses.subst.alphabet().contains(b)) continue;
        ShiftMeasureEstimate est = ctx.cylinder_measure_shift(Word{b}, LetterInterval{-Km, Km},
                                                              MeasureOptions{});
        out << "  nu([" << b << "]) = " << format_double(est.estimate);
        if (est.exact_estimate) out << " (exact " << est.exact_estimate->str() << ")";
        out << "\n";
        rows.push_back(std::move(est));
    }

    std::int64_t n_sigma = *ld.n_sigma;
    PnResult pn = build_pn(ses.subst, 2, LetterInterval{-ses.window_or(cfg, 10),
                                                        ses.window_or(cfg, 10)},
                           n_sigma);
    out << "P_2: " << pn.kept.size() << " towers kept, exact on interior: "
        << (pn.exact_on_interior ? "yes" : "no") << "\n";

    out << "provenance: substrat 0.1.0; tol " << format_double(cfg.tol) << "; schedule";
    for (std::int64_t K : cfg.schedule) out << ' ' << K;
    out << "; mode " << (ses.rational ? "rational" : "float") << "\n";

    if (cfg.out_dir) {
        write_file(*cfg.out_dir + "/eigenvector.csv", eigenvector_csv(ses.subst.alphabet(), sd));
        write_file(*cfg.out_dir + "/towers.csv", towers_csv(pn));
        write_file(*cfg.out_dir + "/measure.csv",
                   measure_csv(rows, ses.rational ? "rational" : "float"));
    }
    return 0;
}

}  // namespace

int run(const JobConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        Session ses(cfg);
        if (cfg.command == "validate") return cmd_validate(ses, cfg, out);
        if (cfg.command == "language") return cmd_language(ses, cfg, out);
        if (cfg.command == "decompose") return cmd_decompose(ses, cfg, out);
        if (cfg.command == "nsigma") return cmd_nsigma(ses, cfg, out);
        if (cfg.command == "towers") return cmd_towers(ses, cfg, out);
        if (cfg.command == "diagram") return cmd_diagram(ses, cfg, out);
        if (cfg.command == "spectral") return cmd_spectral(ses, cfg, out);
        if (cfg.command == "classify") return cmd_classify(ses, cfg, out);
        if (cfg.command == "measure") return cmd_measure(ses, cfg, out);
        if (cfg.command == "simulate") return cmd_simulate(ses, cfg, out);
        if (cfg.command == "report") return cmd_report(ses, cfg, out);
        fail(Errc::invalid_argument, "unknown command '" + cfg.command + "'");
    } catch (const Error& e) {
        err << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace substrat
