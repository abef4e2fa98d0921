// substrat.cpp -- command line front end.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "substrat/cli_lib.hpp"

namespace {

substrat::Word parse_word(const std::string& text) {
    substrat::Word w;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        w.push_back(std::stoll(tok));
    }
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"substrat -- substitutions on infinite alphabets: decompositions, towers, "
                 "Bratteli-Vershik data and invariant measures"};
    app.require_subcommand(1);

    substrat::JobConfig cfg;
    std::string word_text;
    std::string schedule_text;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("subst", cfg.subject, "substitution file or fixture id")->required();
        sub->add_option("--window", cfg.window, "letter window half-width (raw letters)");
        sub->add_option("--schedule", schedule_text, "spectral window schedule K1,K2,...");
        sub->add_option("--tol", cfg.tol, "numeric tolerance");
        sub->add_option("--max-len", cfg.max_len, "maximum word length for language scans");
        sub->add_option("--depth", cfg.depth, "level / iteration depth");
        sub->add_option("--mode", cfg.mode, "arithmetic mode: rational|float|auto");
        sub->add_option("--out", cfg.out_dir, "directory for CSV side files");
        sub->add_option("--dot", cfg.dot_file, "DOT output file");
        sub->add_option("--seed-letter", cfg.seed_letter, "orbit seed letter");
        sub->add_option("--orbit", cfg.orbit, "orbit length for simulate");
        return sub;
    };

    add_common(app.add_subcommand("validate", "validate a substitution definition"));
    add_common(app.add_subcommand("language", "enumerate window language words"));
    auto* dec = add_common(app.add_subcommand("decompose", "unique sigma-decomposition"));
    dec->add_option("word", word_text, "comma-separated letters")->required();
    add_common(app.add_subcommand("nsigma", "left-determined check and N_sigma"));
    auto* tow = add_common(app.add_subcommand("towers", "Kakutani-Rokhlin tower family P_n"));
    tow->add_option("level", cfg.depth, "tower level n");
    add_common(app.add_subcommand("diagram", "stationary Bratteli diagram export"));
    add_common(app.add_subcommand("spectral", "Perron-Frobenius eigenvalue and eigenvectors"));
    add_common(app.add_subcommand("classify", "recurrence classification"));
    auto* mea = add_common(app.add_subcommand("measure", "shift-invariant cylinder measure"));
    mea->add_option("word", word_text, "comma-separated letters (empty for total mass)");
    add_common(app.add_subcommand("simulate", "Birkhoff frequency along an orbit"));
    add_common(app.add_subcommand("report", "full pipeline report"));

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    if (!word_text.empty() || cfg.command == "measure") cfg.word = parse_word(word_text);
    if (!schedule_text.empty()) {
        cfg.schedule.clear();
        std::stringstream ss(schedule_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) cfg.schedule.push_back(std::stoll(tok));
    }
    return substrat::run(cfg, std::cout, std::cerr);
}
