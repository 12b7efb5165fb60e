#pragma once
// Strict key = value config files. Lines are `key = value`, `#` starts a
// comment, keys are dotted lowercase. Loaders reject unknown keys so typos
// fail loudly instead of silently keeping defaults.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace baq {

class KeyValueFile {
   public:
    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_text(const std::string& text, const std::string& origin = "<text>");

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    // Call after reading everything; throws ConfigError listing unconsumed keys.
    void reject_unknown() const;

    const std::string& origin() const { return origin_; }

   private:
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, bool> consumed_;
    std::string origin_;
};

// Resolve a config shipped with the repo: $BAQ_CONFIG_DIR/<name> if set,
// otherwise ./configs/<name>.
std::string default_config_path(const std::string& name);

}  // namespace baq
