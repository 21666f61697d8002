#pragma once

#include <map>
#include <string>
#include <vector>

namespace bqs {

/// Line-based key-value document: `key = value` entries, `[section]`
/// headers, `#` comments. Keys may repeat within a section (term/atom lists).
class ConfigDoc {
public:
    static ConfigDoc parse_file(const std::string& path);
    static ConfigDoc parse_string(const std::string& text);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key) const;
    int get_int_or(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key) const;

private:
    // section -> ordered (key, value) entries
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> entries_;
};

/// "a = x, b = [1, 2], c = y" -> {a: "x", b: "[1, 2]", c: "y"}; commas inside
/// brackets do not split.
std::map<std::string, std::string> parse_inline_pairs(const std::string& text);

std::vector<double> parse_double_list(const std::string& text);  // "[a, b, c]"
std::vector<int> parse_int_list(const std::string& text);

}  // namespace bqs
