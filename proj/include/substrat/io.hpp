// io.hpp -- substitution definition files (JSON schema), CSV side files,
// and the plain-text report rendering used by the CLI.

#pragma once

#include <string>

#include "substrat/decompose.hpp"
#include "substrat/measure.hpp"
#include "substrat/spectral.hpp"
#include "substrat/substitution.hpp"
#include "substrat/towers.hpp"

namespace substrat {

/// Schema: top-level keys name, alphabet{stride>=1, residue}, rules
/// [{region:{kind:"all"|"le"|"ge"|"set", bound?, letters?}, template:[int]}],
/// exceptions [{letter, image:[int]}]. Unknown keys are rejected.
SubstitutionDef parse_substitution_text(const std::string& text);
SubstitutionDef parse_substitution_file(const std::string& path);
std::string substitution_to_json(const SubstitutionDef& def);

/// Deterministic shortest-roundtrip double rendering.
std::string format_double(double x);

std::string word_csv(const Word& w);  // space-separated letters

std::string eigenvector_csv(const Alphabet& al, const SpectralData& sd);
std::string towers_csv(const PnResult& pn);
std::string measure_csv(const std::vector<ShiftMeasureEstimate>& rows, const std::string& mode);

std::string render_left_determined(const LeftDeterminedReport& rep);
std::string render_spectral(const SpectralData& sd);
std::string render_recurrence(const RecurrenceVerdict& v);
std::string render_total_mass(const TotalMassResult& m);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace substrat
