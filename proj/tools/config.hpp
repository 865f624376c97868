#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace clab::cli {

/// Sectioned key-value experiment configuration.
///
/// Values come from an INI file, then `--set key=value` overrides, then
/// dedicated flags. Lookups walk the active section list (command section
/// first, then `common`) and fall back to the supplied default. Every lookup is
/// recorded with its typed effective value so reports can embed the resolved
/// configuration.
class Config {
public:
    void load_file(const std::string& path);

    /// `key` may be `section.name`; a bare name goes to the first active section.
    void set(const std::string& key, const std::string& value);
    void set_sections(std::vector<std::string> sections) { sections_ = std::move(sections); }
    const std::vector<std::string>& sections() const { return sections_; }

    std::string get_string(const std::string& key, const std::string& fallback);
    std::int64_t get_int(const std::string& key, std::int64_t fallback);
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
    double get_double(const std::string& key, double fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::optional<double> get_optional_double(const std::string& key);
    std::optional<std::int64_t> get_optional_int(const std::string& key);
    std::vector<std::int64_t> get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback);
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);

    bool has(const std::string& key) const { return raw(key).has_value(); }

    /// Resolved values in first-lookup order.
    const nlohmann::ordered_json& resolved() const { return resolved_; }

    /// Keys of `section` that no lookup consumed.
    std::vector<std::string> unused_keys(const std::string& section) const;

private:
    std::optional<std::string> raw(const std::string& key) const;
    void record(const std::string& key, nlohmann::ordered_json value);

    std::map<std::string, std::map<std::string, std::string>> values_;
    std::vector<std::string> sections_{"common"};
    nlohmann::ordered_json resolved_ = nlohmann::ordered_json::object();
};

std::int64_t parse_int(const std::string& text, const std::string& key);
double parse_double(const std::string& text, const std::string& key);

}  // namespace clab::cli
