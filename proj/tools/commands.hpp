#pragma once

#include "config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace clab::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct CommandOutput {
    nlohmann::ordered_json result;
    Table csv;
};

const std::vector<std::string>& command_names();
std::string command_summary(const std::string& name);

/// Runs one subcommand. Reads its parameters from `cfg` (whose sections must
/// already be set to the command's lookup chain).
CommandOutput run_command(const std::string& name, Config& cfg);

/// Shortest round-trip decimal form used for CSV cells.
std::string format_number(double v);

void write_csv(std::ostream& out, const Table& table);

}  // namespace clab::cli
