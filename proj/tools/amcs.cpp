#include "amcs/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"aMCS runtime with ASP packing programs"};
    app.require_subcommand(1);

    amcs::cli::SolveArgs solve;
    std::size_t models = 1;
    bool all = false;
    auto* s = app.add_subcommand("solve", "print answer sets of a program");
    s->add_option("program", solve.program)->required();
    s->add_option("facts", solve.facts);
    auto* m = s->add_option("--models", models, "number of answer sets (0 for all)");
    auto* a = s->add_flag("--all", all, "print every answer set");
    m->excludes(a);
    s->add_flag("--opt", solve.optimize, "print one optimal answer set");

    amcs::cli::SolveArgs oracle;
    auto* o = app.add_subcommand("oracle", "brute-force answer sets");
    o->add_option("program", oracle.program)->required();
    o->add_option("facts", oracle.facts);

    amcs::cli::RunArgs run;
    auto* r = app.add_subcommand("run", "simulate a scenario and write its trace");
    r->add_option("scenario", run.scenario)->required();
    r->add_option("--until", run.until, "stop after this virtual time (ms)");
    r->add_option("--trace", run.trace, "trace file (default stdout)");

    std::string buffer;
    bool arrived = false;
    auto* e = app.add_subcommand("encode", "print the input facts of a buffer");
    e->add_option("buffer", buffer)->required();
    e->add_flag("--arrived", arrived, "include arrived/2 facts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    amcs::cli::Limits limits;
    try {
        limits = amcs::cli::limits_from_env();
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }

    if (s->parsed()) {
        solve.models = all || models == 0 ? std::nullopt : std::optional<std::size_t>(models);
        return amcs::cli::cmd_solve(solve, limits, std::cout, std::cerr);
    }
    if (o->parsed()) return amcs::cli::cmd_oracle(oracle, limits, std::cout, std::cerr);
    if (r->parsed()) return amcs::cli::cmd_run(run, limits, std::cout, std::cerr);
    return amcs::cli::cmd_encode(buffer, arrived, std::cout, std::cerr);
}
