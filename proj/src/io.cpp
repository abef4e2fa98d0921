#include "substrat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace substrat {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) fail(Errc::schema_error, "unknown key '" + it.key() + "' in " + where);
    }
}

std::int64_t get_int(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(Errc::schema_error, "missing '" + std::string(key) + "' in " + where);
    if (!j[key].is_number_integer())
        fail(Errc::schema_error, "'" + std::string(key) + "' must be an integer in " + where);
    return j[key].get<std::int64_t>();
}

Word get_word(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j[key].is_array())
        fail(Errc::schema_error, "missing array '" + std::string(key) + "' in " + where);
    Word w;
    for (const auto& x : j[key]) {
        if (!x.is_number_integer()) fail(Errc::schema_error, "non-integer letter in " + where);
        w.push_back(x.get<std::int64_t>());
    }
    return w;
}

}  // namespace

SubstitutionDef parse_substitution_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::schema_error, std::string("not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"name", "alphabet", "rules", "exceptions"}, "top level");
    SubstitutionDef def;
    if (j.contains("name")) {
        if (!j["name"].is_string()) fail(Errc::schema_error, "'name' must be a string");
        def.name = j["name"].get<std::string>();
    }
    if (!j.contains("alphabet")) fail(Errc::schema_error, "missing 'alphabet'");
    reject_unknown(j["alphabet"], {"stride", "residue"}, "alphabet");
    def.alphabet.stride = get_int(j["alphabet"], "stride", "alphabet");
    def.alphabet.residue = get_int(j["alphabet"], "residue", "alphabet");
    if (def.alphabet.stride < 1) fail(Errc::schema_error, "alphabet stride must be >= 1");

    if (j.contains("rules")) {
        if (!j["rules"].is_array()) fail(Errc::schema_error, "'rules' must be an array");
        for (const auto& jr : j["rules"]) {
            reject_unknown(jr, {"region", "template"}, "rule");
            if (!jr.contains("region")) fail(Errc::schema_error, "rule without region");
            const json& reg = jr["region"];
            reject_unknown(reg, {"kind", "bound", "letters"}, "region");
            if (!reg.contains("kind") || !reg["kind"].is_string())
                fail(Errc::schema_error, "region needs a string 'kind'");
            std::string kind = reg["kind"].get<std::string>();
            RegionRule rule;
            if (kind == "all") {
                rule.region.kind = Region::Kind::all;
            } else if (kind == "le") {
                rule.region.kind = Region::Kind::le;
                rule.region.bound = get_int(reg, "bound", "le region");
            } else if (kind == "ge") {
                rule.region.kind = Region::Kind::ge;
                rule.region.bound = get_int(reg, "bound", "ge region");
            } else if (kind == "set") {
                rule.region.kind = Region::Kind::set;
                rule.region.letters = get_word(reg, "letters", "set region");
            } else {
                fail(Errc::schema_error, "region kind '" + kind + "' is not all|le|ge|set");
            }
            rule.template_offsets = get_word(jr, "template", "rule");
            def.rules.push_back(std::move(rule));
        }
    }
    if (j.contains("exceptions")) {
        if (!j["exceptions"].is_array()) fail(Errc::schema_error, "'exceptions' must be an array");
        for (const auto& je : j["exceptions"]) {
            reject_unknown(je, {"letter", "image"}, "exception");
            Letter a = get_int(je, "letter", "exception");
            if (def.exceptions.count(a))
                fail(Errc::schema_error, "duplicate exception for letter " + std::to_string(a));
            def.exceptions[a] = get_word(je, "image", "exception");
        }
    }
    return def;
}

SubstitutionDef parse_substitution_file(const std::string& path) {
    return parse_substitution_text(read_file(path));
}

std::string substitution_to_json(const SubstitutionDef& def) {
    json j;
    j["name"] = def.name;
    j["alphabet"] = {{"stride", def.alphabet.stride}, {"residue", def.alphabet.residue}};
    j["rules"] = json::array();
    for (const auto& r : def.rules) {
        json reg;
        switch (r.region.kind) {
            case Region::Kind::all: reg = {{"kind", "all"}}; break;
            case Region::Kind::le: reg = {{"kind", "le"}, {"bound", r.region.bound}}; break;
            case Region::Kind::ge: reg = {{"kind", "ge"}, {"bound", r.region.bound}}; break;
            case Region::Kind::set: reg = {{"kind", "set"}, {"letters", r.region.letters}}; break;
        }
        j["rules"].push_back({{"region", reg}, {"template", r.template_offsets}});
    }
    j["exceptions"] = json::array();
    for (const auto& [a, im] : def.exceptions)
        j["exceptions"].push_back({{"letter", a}, {"image", im}});
    return j.dump(2) + "\n";
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string word_csv(const Word& w) {
    std::ostringstream os;
    for (std::size_t i = 0; i < w.size(); ++i) os << (i ? " " : "") << w[i];
    return os.str();
}

std::string eigenvector_csv(const Alphabet& al, const SpectralData& sd) {
    std::ostringstream os;
    os << "letter,left,right\n";
    for (std::int64_t i = sd.interior_lo; i <= sd.interior_hi; ++i)
        os << al.letter_at(i) << ',' << format_double(sd.left_at(i)) << ','
           << format_double(sd.right_at(i)) << '\n';
    return os.str();
}

std::string towers_csv(const PnResult& pn) {
    std::ostringstream os;
    os << "mode,base,height,boundary\n";
    for (const auto& t : pn.kept)
        os << "B," << word_csv(t.word) << ',' << t.height << ',' << (t.boundary ? 1 : 0) << '\n';
    return os.str();
}

std::string measure_csv(const std::vector<ShiftMeasureEstimate>& rows, const std::string& mode) {
    std::ostringstream os;
    os << "word,estimate,tolerance,depth,mode\n";
    for (const auto& r : rows)
        os << word_csv(r.word) << ',' << format_double(r.estimate) << ','
           << format_double(r.achieved_tol) << ',' << r.depth << ',' << mode << '\n';
    return os.str();
}

std::string render_left_determined(const LeftDeterminedReport& rep) {
    std::ostringstream os;
    os << "left-determined check\n";
    os << "  window: [" << rep.window.lo << ", " << rep.window.hi << "], margin " << rep.margin
       << ", lengths 2.." << rep.max_len_checked << "\n";
    if (rep.verdict == LeftDeterminedReport::Verdict::confirmed_on_window) {
        os << "  verdict: confirmed-on-window (evidence up to length " << rep.max_len_checked
           << ")\n";
        os << "  N_sigma: " << *rep.n_sigma << "\n";
    } else {
        os << "  verdict: refuted\n";
        if (rep.counterexample)
            os << "  counterexample: " << word_to_string(*rep.counterexample) << " admits "
               << rep.counterexample_decompositions.size() << "+ decompositions\n";
    }
    for (const auto& [len, n] : rep.words_by_length) {
        os << "  length " << len << ": " << n << " words";
        auto a = rep.ambiguous_by_length.find(len);
        auto u = rep.undecomposable_by_length.find(len);
        if (a != rep.ambiguous_by_length.end()) os << ", " << a->second << " ambiguous";
        if (u != rep.undecomposable_by_length.end()) os << ", " << u->second << " undecomposable";
        os << "\n";
    }
    return os.str();
}

std::string render_spectral(const SpectralData& sd) {
    std::ostringstream os;
    os << "Perron-Frobenius data\n";
    os << "  lambda: " << format_double(sd.lambda)
       << (sd.converged_by_cauchy ? " (window-Cauchy)" : " (vanishing-boundary fit)") << "\n";
    os << "  period: " << sd.period << ", irreducible on window: "
       << (sd.irreducible_on_window ? "yes" : "no") << "\n";
    os << "  window history:";
    for (const auto& [K, l] : sd.lambda_history) os << " lambda_" << K << "=" << format_double(l);
    os << "\n";
    os << "  interior indices: [" << sd.interior_lo << ", " << sd.interior_hi << "]\n";
    os << "  left residual: " << format_double(sd.residual_left)
       << ", right residual: " << format_double(sd.residual_right) << "\n";
    os << "  left normalization: " << sd.left_normalization << "\n";
    return os.str();
}

std::string render_recurrence(const RecurrenceVerdict& v) {
    std::ostringstream os;
    os << "recurrence classification (evidence only)\n";
    os << "  irreducible on window: " << (v.irreducible_on_window ? "yes" : "no") << ", period "
       << v.period << "\n";
    os << "  class: ";
    switch (v.klass) {
        case RecurrenceClass::recurrent_evidence: os << "recurrent-evidence"; break;
        case RecurrenceClass::transient_evidence: os << "transient-evidence"; break;
        case RecurrenceClass::inconclusive: os << "inconclusive"; break;
    }
    os << "\n  positive vs null: ";
    switch (v.positive_vs_null) {
        case MassClass::positive: os << "positive"; break;
        case MassClass::null_evidence: os << "null-evidence"; break;
        case MassClass::inconclusive: os << "inconclusive"; break;
    }
    os << "\n  f-series partial sums (last 5):";
    std::size_t n = v.f_series_partial_sums.size();
    for (std::size_t i = n >= 5 ? n - 5 : 0; i < n; ++i)
        os << ' ' << format_double(v.f_series_partial_sums[i]);
    os << "\n  l.r window partials:";
    for (const auto& [K, x] : v.lr_partial) os << " K=" << K << ":" << format_double(x);
    if (v.lr_extrapolated) os << " -> " << format_double(*v.lr_extrapolated);
    os << "\n";
    return os.str();
}

std::string render_total_mass(const TotalMassResult& m) {
    std::ostringstream os;
    os << "total mass: ";
    switch (m.verdict) {
        case TotalMassResult::Verdict::finite:
            os << "finite, " << format_double(m.value);
            if (m.exact_value) os << " (exact " << m.exact_value->str() << ")";
            break;
        case TotalMassResult::Verdict::divergent_evidence: os << "divergent-evidence"; break;
        case TotalMassResult::Verdict::inconclusive: os << "inconclusive"; break;
    }
    os << "; window partials:";
    for (const auto& [K, x] : m.partials) os << " K=" << K << ":" << format_double(x);
    os << "\n";
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::io_error, "cannot open " + path + " for writing");
    out << content;
    if (!out) fail(Errc::io_error, "write failed for " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io_error, "cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace substrat
