#include "baq/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "baq/util.hpp"

namespace baq {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
    KeyValueFile out;
    out.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected `key = value`, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (out.kv_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key " + key);
        out.kv_[key] = value;
    }
    return out;
}

bool KeyValueFile::has(const std::string& key) const { return kv_.count(key) > 0; }

double KeyValueFile::get_double(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(origin_ + ": missing required key " + key);
    consumed_[key] = true;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key " + key + " is not a number: " + it->second);
    }
    if (pos != it->second.size())
        throw ConfigError(origin_ + ": key " + key + " has trailing junk: " + it->second);
    return v;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return get_double(key);
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    consumed_[key] = true;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw ConfigError(origin_ + ": key " + key + " is not a boolean: " + it->second);
}

std::string KeyValueFile::get_string(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError(origin_ + ": missing required key " + key);
    consumed_[key] = true;
    return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return get_string(key);
}

void KeyValueFile::reject_unknown() const {
    std::string bad;
    for (const auto& [key, value] : kv_) {
        (void)value;
        if (!consumed_.count(key)) bad += (bad.empty() ? "" : ", ") + key;
    }
    if (!bad.empty()) throw ConfigError(origin_ + ": unknown keys: " + bad);
}

std::string default_config_path(const std::string& name) {
    if (const char* dir = std::getenv("BAQ_CONFIG_DIR"); dir && *dir)
        return std::string(dir) + "/" + name;
    return "configs/" + name;
}

}  // namespace baq
