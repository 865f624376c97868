#include "commands.hpp"
#include "config.hpp"

#include "clab/error.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

// Dedicated flags outrank `--set`, which outranks the config file.
constexpr const char* kFlagSection = "flags";

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> samples;
    std::string out = "clab-out";
    std::string cache_dir;
    bool no_timestamp = false;
};

int run(const std::string& command, const Options& opt) {
    using namespace clab::cli;
    Config cfg;
    if (!opt.config.empty()) cfg.load_file(opt.config);
    cfg.set_sections({kFlagSection, command, "common"});
    for (const auto& s : opt.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw clab::InvalidInput("--set expects key=value, got '" + s + "'");
        const std::string key = s.substr(0, eq);
        cfg.set(key.find('.') == std::string::npos ? command + "." + key : key, s.substr(eq + 1));
    }
    if (opt.seed) cfg.set(std::string(kFlagSection) + ".seed", std::to_string(*opt.seed));
    if (opt.samples) cfg.set(std::string(kFlagSection) + ".samples", std::to_string(*opt.samples));
    if (!opt.cache_dir.empty()) cfg.set(std::string(kFlagSection) + ".cache_dir", opt.cache_dir);

    const auto output = run_command(command, cfg);
    if (const auto unused = cfg.unused_keys(command); !unused.empty()) {
        std::string list;
        for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
        throw clab::InvalidInput("unknown configuration keys: " + list);
    }

    nlohmann::ordered_json report;
    report["tool"] = "clab";
    report["version"] = CLAB_VERSION;
    report["command"] = command;
    if (!opt.no_timestamp) report["timestamp"] = utc_timestamp();
    report["config"] = cfg.resolved();
    report["result"] = output.result;

    std::filesystem::create_directories(opt.out);
    const auto base = std::filesystem::path(opt.out) / command;
    std::ofstream json(base.string() + ".json", std::ios::binary);
    json << report.dump(2) << '\n';
    std::ofstream csv(base.string() + ".csv", std::ios::binary);
    write_csv(csv, output.csv);
    if (!json || !csv) throw clab::InvalidInput("cannot write reports under " + opt.out);
    std::cout << base.string() << ".json\n" << base.string() << ".csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clab: constellation lab experiments"};
    app.set_version_flag("--version", CLAB_VERSION);
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", opt.sets, "override a configuration value (key=value or section.key=value)");
    app.add_option("--seed", opt.seed, "root random seed");
    app.add_option("--samples", opt.samples, "Monte-Carlo sample count");
    app.add_option("--out", opt.out, "output directory for <command>.json and <command>.csv");
    app.add_option("--cache-dir", opt.cache_dir, "sieve table cache directory (overrides CLAB_CACHE_DIR)");
    app.add_flag("--no-timestamp", opt.no_timestamp, "omit the timestamp so reports are byte-reproducible");
    for (const auto& name : clab::cli::command_names())
        app.add_subcommand(name, clab::cli::command_summary(name))->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
