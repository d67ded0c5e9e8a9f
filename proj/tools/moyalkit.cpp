// moyalkit run --config cfg.json [--suite S --grid-n N --grid-l L --form F --hbar H --seed K --out DIR]
// moyalkit convert in.pss out.json | in.json out.pss

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "moyalkit/io.hpp"
#include "moyalkit/suites.hpp"

namespace {

enum Exit { ok = 0, checks_failed = 1, config_error = 2, io_error = 3 };

int convert(const std::filesystem::path& in, const std::filesystem::path& out) {
    const auto ext = [](const std::filesystem::path& p) { return p.extension().string(); };
    if (ext(in) == ".pss" && ext(out) == ".json") {
        std::ofstream os(out);
        if (!os) throw moyalkit::Error(moyalkit::ErrorKind::FormatError, "cannot write " + out.string());
        os << moyalkit::io::symbol_to_json(moyalkit::io::load_pss(in)).dump() << '\n';
        return ok;
    }
    if (ext(in) == ".json" && ext(out) == ".pss") {
        std::ifstream is(in);
        if (!is) throw moyalkit::Error(moyalkit::ErrorKind::FormatError, "cannot open " + in.string());
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw moyalkit::Error(moyalkit::ErrorKind::FormatError, e.what());
        }
        moyalkit::io::save_pss(out, moyalkit::io::symbol_from_json(j));
        return ok;
    }
    std::cerr << "convert expects one .pss and one .json path\n";
    return config_error;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moyalkit: twisted convolution and Moyal product verification suites"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a verification suite and write reports");
    std::string config_path;
    std::optional<std::string> suite, form, out;
    std::optional<int> grid_n;
    std::optional<double> grid_l, hbar;
    std::optional<std::uint64_t> seed;
    run->add_option("--config", config_path, "JSON configuration file");
    run->add_option("--suite", suite, "identities|routes|oracle|multipliers|convergence|continuity|all");
    run->add_option("--grid-n", grid_n, "points per axis");
    run->add_option("--grid-l", grid_l, "half-extent per axis");
    run->add_option("--form", form, "J|hbarJ|2J");
    run->add_option("--hbar", hbar, "scale for the hbarJ preset");
    run->add_option("--seed", seed, "seed for randomized cases");
    run->add_option("--out", out, "output directory");

    auto* conv = app.add_subcommand("convert", "convert a symbol between .pss and JSON");
    std::string conv_in, conv_out;
    conv->add_option("input", conv_in)->required();
    conv->add_option("output", conv_out)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (conv->parsed()) return convert(conv_in, conv_out);

        moyalkit::SuiteConfig cfg;
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw moyalkit::Error(moyalkit::ErrorKind::ConfigError, "cannot open " + config_path);
            nlohmann::json j;
            try {
                is >> j;
            } catch (const nlohmann::json::exception& e) {
                throw moyalkit::Error(moyalkit::ErrorKind::ConfigError, e.what());
            }
            cfg = moyalkit::config_from_json(j);
        }
        if (suite) cfg.suite = *suite;
        if (grid_n) cfg.points = *grid_n;
        if (grid_l) cfg.half_extent = *grid_l;
        if (form) cfg.form_preset = *form;
        if (hbar) cfg.hbar = *hbar;
        if (seed) cfg.seed = *seed;
        if (out) cfg.output = *out;

        const auto report = moyalkit::run_suite(cfg);
        std::size_t failed = 0;
        for (const auto& c : report.checks) {
            if (!c.pass) {
                ++failed;
                std::cout << "FAIL " << c.suite << '/' << c.name << " error=" << c.error << " tol=" << c.tolerance;
                if (!c.note.empty()) std::cout << " (" << c.note << ')';
                std::cout << '\n';
            }
        }
        std::cout << report.checks.size() - failed << '/' << report.checks.size() << " checks passed; report in "
                  << (cfg.output / "report.json").string() << '\n';
        return failed == 0 ? ok : checks_failed;
    } catch (const moyalkit::Error& e) {
        std::cerr << e.what() << '\n';
        return e.kind() == moyalkit::ErrorKind::ConfigError ? config_error : io_error;
    }
}
