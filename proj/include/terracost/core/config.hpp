#pragma once

#include <map>
#include <string>
#include <vector>

namespace terracost {

/// Flat `key = value` text config. Lines starting with '#' and blank lines
/// are ignored. Keys are unique; later lines overwrite earlier ones.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;

    /// Keys in sorted order, one `key = value` per line.
    std::string serialize() const;
    void save(const std::string& path) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace terracost
