#include "nertl/config.hpp"

#include <fstream>
#include <sstream>

#include "nertl/error.hpp"

namespace nertl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

KvConfig KvConfig::parse_text(const std::string& text, const std::string& origin) {
    KvConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(origin + ":" + std::to_string(line_no) + ": empty key");
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

KvConfig KvConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path.string());
}

bool KvConfig::has(const std::string& key) const { return get(key).has_value(); }

std::optional<std::string> KvConfig::get(const std::string& key) const {
    // Last occurrence wins for scalar lookups.
    std::optional<std::string> found;
    for (const auto& [k, v] : entries_)
        if (k == key) found = v;
    return found;
}

std::string KvConfig::get_or(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

std::vector<std::string> KvConfig::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out.push_back(v);
    return out;
}

int64_t KvConfig::get_int(const std::string& key, int64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stoll(*v);
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not an integer: " + *v);
    }
}

uint64_t KvConfig::get_u64(const std::string& key, uint64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stoull(*v);
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not an unsigned integer: " + *v);
    }
}

double KvConfig::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not a number: " + *v);
    }
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ParseError("config key '" + key + "': not a boolean: " + *v);
}

std::vector<double> KvConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    const auto v = get(key);
    if (!v) return out;
    for (const auto& item : split_list(*v, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ParseError("config key '" + key + "': not a number: " + item);
        }
    }
    return out;
}

std::vector<uint64_t> KvConfig::get_u64s(const std::string& key) const {
    std::vector<uint64_t> out;
    const auto v = get(key);
    if (!v) return out;
    for (const auto& item : split_list(*v, ',')) {
        try {
            out.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw ParseError("config key '" + key + "': not an unsigned integer: " + item);
        }
    }
    return out;
}

std::vector<std::string> KvConfig::get_strings(const std::string& key) const {
    const auto v = get(key);
    if (!v) return {};
    return split_list(*v, ',');
}

void KvConfig::set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

}  // namespace nertl
