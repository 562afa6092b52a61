// Command-line front end: run or check a session document.
#include "hermsig/session.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

enum Exit { Ok = 0, Usage = 1, Parse = 2, Computation = 3 };

bool read_file(const std::string& path, std::string& out)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Signatures of hermitian forms over algebras with involution"};
    app.require_subcommand(1);

    std::string file;
    std::string format = "json";
    hermsig::RunOptions opts;

    auto* run = app.add_subcommand("run", "Execute the commands of a session document");
    run->add_option("file", file, "Session document")->required();
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    run->add_option("--search-height", opts.search_height, "Coordinate bound for square searches")
        ->check(CLI::Range(1, 20));
    run->add_option("--search-terms", opts.search_terms, "Term bound for square searches")->check(CLI::Range(1, 64));

    auto* check = app.add_subcommand("check", "Parse and validate a session document");
    check->add_option("file", file, "Session document")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    std::string text;
    if (!read_file(file, text)) {
        std::cerr << "hermsig: cannot read " << file << "\n";
        return Usage;
    }
    hermsig::SessionDocument doc;
    try {
        doc = hermsig::parse_session(text);
    } catch (const hermsig::ParseError& e) {
        std::cerr << file << ": " << e.what() << "\n";
        return Parse;
    }
    if (check->parsed()) {
        std::cout << file << ": ok, " << doc.commands.size() << " commands\n";
        return Ok;
    }
    const hermsig::Report rep = hermsig::run_session(doc, opts);
    std::cout << (format == "table" ? rep.table() : rep.json());
    return rep.ok ? Ok : Computation;
}
