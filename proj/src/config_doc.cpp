#include "bqs/config_doc.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bqs {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void missing(const std::string& section, const std::string& key) {
    throw std::runtime_error("missing key '" + key + "' in section '" +
                             (section.empty() ? "(top)" : section) + "'");
}

}  // namespace

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

ConfigDoc ConfigDoc::parse_string(const std::string& text) {
    ConfigDoc doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("malformed section header at line " +
                                         std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            doc.entries_[section];  // register even if empty
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("expected 'key = value' at line " + std::to_string(lineno));
        doc.entries_[section].emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return doc;
}

bool ConfigDoc::has_section(const std::string& section) const {
    return entries_.count(section) > 0;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
    auto it = entries_.find(section);
    if (it == entries_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const auto& kv) { return kv.first == key; });
}

std::string ConfigDoc::get(const std::string& section, const std::string& key) const {
    auto it = entries_.find(section);
    if (it == entries_.end()) missing(section, key);
    for (const auto& [k, v] : it->second)
        if (k == key) return v;
    missing(section, key);
}

std::string ConfigDoc::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

std::vector<std::string> ConfigDoc::get_all(const std::string& section,
                                            const std::string& key) const {
    std::vector<std::string> out;
    auto it = entries_.find(section);
    if (it == entries_.end()) return out;
    for (const auto& [k, v] : it->second)
        if (k == key) out.push_back(v);
    return out;
}

double ConfigDoc::get_double(const std::string& section, const std::string& key) const {
    return std::stod(get(section, key));
}

double ConfigDoc::get_double_or(const std::string& section, const std::string& key,
                                double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigDoc::get_int(const std::string& section, const std::string& key) const {
    return std::stoi(get(section, key));
}

int ConfigDoc::get_int_or(const std::string& section, const std::string& key, int fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

bool ConfigDoc::get_bool_or(const std::string& section, const std::string& key,
                            bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("expected boolean for key '" + key + "', got '" + v + "'");
}

std::vector<double> ConfigDoc::get_double_list(const std::string& section,
                                               const std::string& key) const {
    return parse_double_list(get(section, key));
}

std::vector<int> ConfigDoc::get_int_list(const std::string& section, const std::string& key) const {
    return parse_int_list(get(section, key));
}

std::map<std::string, std::string> parse_inline_pairs(const std::string& text) {
    std::map<std::string, std::string> out;
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char c : text) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty()) parts.push_back(cur);
    for (const auto& part : parts) {
        const auto eq = part.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("expected 'key = value' in entry: " + text);
        out[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::string body = trim(text);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw std::runtime_error("expected a [..] list, got: " + text);
    body = body.substr(1, body.size() - 2);
    std::vector<double> out;
    std::istringstream in(body);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
    return out;
}

}  // namespace bqs
