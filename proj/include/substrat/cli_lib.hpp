// cli_lib.hpp -- command orchestration behind the substrat executable:
// configuration, fixture resolution, command dispatch and exit codes.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "substrat/core.hpp"

namespace substrat {

struct JobConfig {
    std::string command;
    std::string subject;  // substitution file path or fixture id
    std::optional<Word> word;           // decompose / measure argument
    std::int64_t window = 0;            // raw half-width; 0 = per-command default
    std::vector<std::int64_t> schedule{16, 32, 64, 128};
    double tol = 1e-8;
    std::int64_t max_len = 8;
    int depth = 0;                      // 0 = per-command default
    std::string mode = "auto";          // rational | float | auto
    std::optional<std::string> out_dir;
    std::optional<std::string> dot_file;
    Letter seed_letter = 0;
    std::int64_t orbit = 1'000'000;
};

// exit codes: 0 success, 2 validation failure, 3 semi-decision refuted,
// 4 numeric non-convergence, 5 I/O
int exit_code_for(Errc c);

/// Executes one command, writing human-readable output to `out` and error
/// text to `err`; returns the exit status.
int run(const JobConfig& cfg, std::ostream& out, std::ostream& err);

/// Resolves `subject` against the filesystem and the SUBSTRAT_FIXTURES
/// directory (defaulting to ./fixtures).
std::string resolve_substitution_path(const std::string& subject);

}  // namespace substrat
