#include "config.hpp"

#include "clab/error.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace clab::cli {

namespace {

std::string trimmed(std::string s) {
    boost::algorithm::trim(s);
    return s;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trimmed(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

std::int64_t parse_int(const std::string& text, const std::string& key) {
    const std::string s = trimmed(text);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc() && ptr == s.data() + s.size()) return value;
    // accept integral scientific notation such as 1e4
    const double d = parse_double(s, key);
    if (std::floor(d) != d || std::abs(d) > 9.0e18) throw InvalidInput("config: " + key + " must be an integer, got '" + s + "'");
    return static_cast<std::int64_t>(d);
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string s = trimmed(text);
    if (s.empty()) throw InvalidInput("config: " + key + " is empty");
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidInput("config: " + key + " must be a number, got '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(value))
        throw InvalidInput("config: " + key + " must be a finite number, got '" + s + "'");
    return value;
}

void Config::load_file(const std::string& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InvalidInput("config: " + std::string(e.what()));
    }
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            values_["common"][name] = trimmed(node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) values_[name][key] = trimmed(leaf.data());
    }
}

void Config::set(const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
        values_[sections_.front()][key] = trimmed(value);
        return;
    }
    const std::string section = key.substr(0, dot);
    const std::string name = key.substr(dot + 1);
    if (section.empty() || name.empty()) throw InvalidInput("config: malformed key '" + key + "'");
    values_[section][name] = trimmed(value);
}

std::optional<std::string> Config::raw(const std::string& key) const {
    for (const auto& section : sections_) {
        const auto s = values_.find(section);
        if (s == values_.end()) continue;
        const auto v = s->second.find(key);
        if (v != s->second.end()) return v->second;
    }
    return std::nullopt;
}

void Config::record(const std::string& key, nlohmann::ordered_json value) {
    if (!resolved_.contains(key)) resolved_[key] = std::move(value);
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
    const std::string v = raw(key).value_or(fallback);
    record(key, v);
    return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
    const auto r = raw(key);
    const std::int64_t v = r ? parse_int(*r, key) : fallback;
    record(key, v);
    return v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) {
    const auto r = raw(key);
    if (!r) {
        record(key, fallback);
        return fallback;
    }
    const std::int64_t v = parse_int(*r, key);
    if (v < 0) throw InvalidInput("config: " + key + " must be nonnegative");
    record(key, v);
    return static_cast<std::uint64_t>(v);
}

double Config::get_double(const std::string& key, double fallback) {
    const auto r = raw(key);
    const double v = r ? parse_double(*r, key) : fallback;
    record(key, v);
    return v;
}

bool Config::get_bool(const std::string& key, bool fallback) {
    const auto r = raw(key);
    bool v = fallback;
    if (r) {
        if (*r == "true" || *r == "1" || *r == "yes" || *r == "on")
            v = true;
        else if (*r == "false" || *r == "0" || *r == "no" || *r == "off")
            v = false;
        else
            throw InvalidInput("config: " + key + " must be a boolean, got '" + *r + "'");
    }
    record(key, v);
    return v;
}

std::optional<double> Config::get_optional_double(const std::string& key) {
    const auto r = raw(key);
    if (!r || r->empty()) {
        record(key, nullptr);
        return std::nullopt;
    }
    const double v = parse_double(*r, key);
    record(key, v);
    return v;
}

std::optional<std::int64_t> Config::get_optional_int(const std::string& key) {
    const auto r = raw(key);
    if (!r || r->empty()) {
        record(key, nullptr);
        return std::nullopt;
    }
    const std::int64_t v = parse_int(*r, key);
    record(key, v);
    return v;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback) {
    const auto r = raw(key);
    std::vector<std::int64_t> out = fallback;
    if (r) {
        out.clear();
        for (const auto& item : split_list(*r)) out.push_back(parse_int(item, key));
    }
    record(key, out);
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) {
    const auto r = raw(key);
    std::vector<double> out = fallback;
    if (r) {
        out.clear();
        for (const auto& item : split_list(*r)) out.push_back(parse_double(item, key));
    }
    record(key, out);
    return out;
}

std::vector<std::string> Config::unused_keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto s = values_.find(section);
    if (s == values_.end()) return out;
    for (const auto& [key, value] : s->second)
        if (!resolved_.contains(key)) out.push_back(section + "." + key);
    return out;
}

}  // namespace clab::cli
