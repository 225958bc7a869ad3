#include "cvmem/app/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
    using namespace cvmem::app;

    CLI::App app{"Gaussian quantum-memory reproductions"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::string format;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "INI run configuration");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", seed, "optimizer seed");

    for (const auto& [name, fn] : commands()) app.add_subcommand(name);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_failure;
    }

    RunConfig cfg;
    try {
        cfg = config_path.empty() ? default_config() : load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = parse_format(format);
        if (seed) cfg.seed = *seed;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
