#pragma once

// Flat key=value experiment configuration. Lines are `key = value`, `#`
// starts a comment, keys are dotted (`dims.N`). List values are comma
// separated.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lrnn {

class Config {
public:
    static Config parse(std::string_view text, const std::string& origin = "<config>");
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    /// Applies "key=value" as given to --set.
    void apply_override(std::string_view assignment);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& entries() const { return values_; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::int64_t> get_ints(const std::string& key, const std::vector<std::int64_t>& fallback) const;

    /// Throws UsageError naming the first key not in `known`.
    void require_known(const std::set<std::string>& known) const;

    /// Sorted "key=value" lines; identical configs give identical snapshots.
    std::string snapshot() const;

private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(std::string_view text);

} // namespace lrnn
