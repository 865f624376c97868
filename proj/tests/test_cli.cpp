#include <doctest.h>

#include "../tools/commands.hpp"
#include "../tools/config.hpp"
#include "clab/error.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace clab;
using namespace clab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("clab_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string line = std::string(CLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(line.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("config precedence and typed lookups") {
    const auto dir = scratch("config");
    {
        std::ofstream ini(dir / "a.ini");
        ini << "[common]\nseed = 3\nN = 11\n[boxnorm]\nN = 13\nsamples = 1e4\nlist = 1, 2,3\nflag = yes\n";
    }
    Config cfg;
    cfg.load_file((dir / "a.ini").string());
    cfg.set_sections({"flags", "boxnorm", "common"});
    CHECK(cfg.get_int("N", 0) == 13);
    CHECK(cfg.get_uint("seed", 0) == 3);
    CHECK(cfg.get_uint("samples", 0) == 10000);
    CHECK(cfg.get_int_list("list", {}) == std::vector<std::int64_t>{1, 2, 3});
    CHECK(cfg.get_bool("flag", false));
    CHECK(cfg.get_double("missing", 2.5) == 2.5);
    CHECK_FALSE(cfg.get_optional_double("R"));
    cfg.set("boxnorm.strategy", "naive");
    cfg.set("flags.seed", "9");
    CHECK(cfg.get_string("strategy", "factored") == "naive");
    // the first lookup is what the report records
    CHECK(cfg.resolved()["seed"] == 3);
    CHECK(cfg.resolved()["R"].is_null());
    CHECK(cfg.unused_keys("boxnorm").empty());

    Config later;
    later.load_file((dir / "a.ini").string());
    later.set_sections({"flags", "boxnorm", "common"});
    later.set("flags.seed", "9");
    CHECK(later.get_uint("seed", 0) == 9);
    CHECK(later.unused_keys("boxnorm").size() == 4);
}

TEST_CASE("config parse errors") {
    Config cfg;
    cfg.set("x.a", "12z");
    cfg.set("x.b", "maybe");
    cfg.set("x.c", "2.5");
    cfg.set("x.d", "-1");
    cfg.set_sections({"x"});
    CHECK_THROWS_AS(cfg.get_int("a", 0), InvalidInput);
    CHECK_THROWS_AS(cfg.get_bool("b", false), InvalidInput);
    CHECK_THROWS_AS(cfg.get_int("c", 0), InvalidInput);
    CHECK_THROWS_AS(cfg.get_uint("d", 0), InvalidInput);
    CHECK_THROWS_AS(cfg.set(".a", "1"), InvalidInput);
    CHECK_THROWS_AS(Config().load_file("/nonexistent/clab.ini"), InvalidInput);
}

TEST_CASE("csv formatting") {
    std::ostringstream out;
    write_csv(out, {{"a", "b"}, {{"1", "x,y"}, {"0.5", "say \"hi\""}}});
    CHECK(out.str() == "a,b\n1,\"x,y\"\n0.5,\"say \"\"hi\"\"\"\n");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1e-300) == "1e-300");
}

TEST_CASE("commands run in-process") {
    Config cfg;
    cfg.set("geometry.basis", "1,0;0,1");
    cfg.set_sections({"geometry", "common"});
    const auto standard = run_command("geometry", cfg);
    CHECK(standard.result["general_position"] == false);
    CHECK(standard.result["tau"]["value"] == 0.5);

    Config bad;
    bad.set_sections({"nosuch"});
    CHECK_THROWS_AS(run_command("nosuch", bad), InvalidInput);
    CHECK(command_names().size() == 12);
}

TEST_CASE("exit codes and report files") {
    const auto dir = scratch("runs");
    const std::string out = " --out " + dir.string() + " --no-timestamp";
    CHECK(run_cli("") == 1);
    CHECK(run_cli("frobnicate" + out) == 1);
    CHECK(run_cli("measure --set bogus=1" + out) == 1);
    CHECK(run_cli("measure --set N=1000" + out) == 1);
    CHECK(run_cli("ladder --set Ns=10007,1009" + out) == 1);
    CHECK(run_cli("ladder --set Ns=1000" + out) == 1);
    CHECK(run_cli("--help") == 0);

    REQUIRE(run_cli("ladder --set Ns=1009" + out) == 0);
    const auto single = read_json(dir / "ladder.json");
    CHECK(single["result"]["rows"].size() == 1);
    CHECK(single["result"]["flags"] == 0);
    CHECK_FALSE(single.contains("timestamp"));
    CHECK(single["version"] == CLAB_VERSION);
    CHECK(single["config"]["Ns"] == std::vector<int>{1009});

    REQUIRE(run_cli("geometry --set basis=\"1,0;0,1\"" + out) == 0);
    CHECK(read_json(dir / "geometry.json")["result"]["general_position"] == false);

    REQUIRE(run_cli("boxnorm --seed 4 --set N=5 --set compare=true" + out) == 0);
    const auto box = read_json(dir / "boxnorm.json");
    CHECK(box["config"]["seed"] == 4);
    CHECK(box["result"]["compare"]["relative_difference"].get<double>() < 1e-12);
    std::ifstream csv(dir / "boxnorm.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "metric,value");

    REQUIRE(run_cli("measure" + out) == 0);
    const auto measure = read_json(dir / "measure.json");
    CHECK(measure["result"]["lower_bound"]["holds"] == true);
    CHECK(measure["result"]["off_window_not_one"] == 0);

    REQUIRE(run_cli("count --set search_side=50" + out) == 0);
    bool found = false;
    const auto count = read_json(dir / "count.json");
    for (const auto& c : count["result"]["constellations"])
        found |= c["x"].get<std::vector<int>>() == std::vector<int>{3, 3} && c["t"].get<int>() == 2;
    CHECK(found);
    fs::remove_all(dir.parent_path());
}
