#pragma once

#include "vortexstab/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vortexstab {

/// Plain-text key-value configuration: one `key = value` per line, `#` comments.
/// Doubles are printed with 17 significant digits so every IEEE-754 value
/// round-trips exactly.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load_file(const std::string& path);
    std::string serialize() const;
    void save_file(const std::string& path) const;

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, int value);
    void set(const std::string& key, const std::vector<double>& values);

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    int get_int_or(const std::string& key, int fallback) const;

    /// Keys in insertion order (serialization is deterministic).
    const std::vector<std::string>& keys() const { return order_; }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

/// Shortest decimal that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace vortexstab
