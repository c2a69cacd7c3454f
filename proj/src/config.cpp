#include "lrnn/config.hpp"

#include <charconv>

#include "lrnn/container.hpp"
#include "lrnn/errors.hpp"

namespace lrnn {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw UsageError("config key '" + key + "': cannot parse '" + std::string(text) + "' as a number");
    return value;
}

} // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

Config Config::parse(std::string_view text, const std::string& origin) {
    Config c;
    std::size_t line_no = 0;
    std::size_t offset = 0;
    while (offset <= text.size()) {
        const auto nl = text.find('\n', offset);
        const auto line_end = nl == std::string_view::npos ? text.size() : nl;
        std::string_view line = text.substr(offset, line_end - offset);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw FormatError(origin + ":" + std::to_string(line_no) + ": expected key = value", offset);
            const auto key = trim(line.substr(0, eq));
            if (key.empty()) throw FormatError(origin + ":" + std::to_string(line_no) + ": empty key", offset);
            c.values_[std::string(key)] = std::string(trim(line.substr(eq + 1)));
        }
        if (nl == std::string_view::npos) break;
        offset = nl + 1;
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::apply_override(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || trim(assignment.substr(0, eq)).empty())
        throw UsageError("--set expects key=value, got '" + std::string(assignment) + "'");
    set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

const std::string& Config::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double Config::get_double(const std::string& key) const { return parse_number<double>(key, raw(key)); }

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key) const { return parse_number<std::int64_t>(key, raw(key)); }

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? parse_number<std::uint64_t>(key, raw(key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = raw(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(raw(key))) out.push_back(parse_number<double>(key, item));
    return out;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    return has(key) ? get_doubles(key) : fallback;
}

std::vector<std::int64_t> Config::get_ints(const std::string& key, const std::vector<std::int64_t>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(raw(key))) out.push_back(parse_number<std::int64_t>(key, item));
    return out;
}

void Config::require_known(const std::set<std::string>& known) const {
    for (const auto& [key, value] : values_)
        if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
}

std::string Config::snapshot() const {
    std::string out;
    for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
    return out;
}

} // namespace lrnn
