#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nertl {

// Key=value config file: one `key = value` per line, `#` starts a comment,
// blank lines ignored. Repeated keys accumulate (used for lexicon and
// template overrides).
class KvConfig {
public:
    static KvConfig parse_text(const std::string& text, const std::string& origin = "<string>");
    static KvConfig parse_file(const std::filesystem::path& path);

    bool has(const std::string& key) const;
    std::optional<std::string> get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    std::vector<std::string> get_all(const std::string& key) const;

    int64_t get_int(const std::string& key, int64_t fallback) const;
    uint64_t get_u64(const std::string& key, uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    // Comma-separated list values.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<uint64_t> get_u64s(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    // Inserts or appends a key (CLI overrides reuse this).
    void set(const std::string& key, const std::string& value);

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<std::string> split_list(const std::string& value, char sep);

}  // namespace nertl
