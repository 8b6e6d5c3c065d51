#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace hqsim {

/// Plain-text `key = value` file. Blank lines and lines starting with '#'
/// are ignored; a trailing `# comment` after a value is stripped.
class KeyValues {
public:
    KeyValues() = default;

    static KeyValues parse(const std::string& text, const std::string& source = "<string>");
    static KeyValues load(const std::filesystem::path& path);

    bool contains(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    std::optional<std::string> get(const std::string& key) const;
    std::optional<double> get_double(const std::string& key) const;
    std::optional<long long> get_int(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    // Keys present in the file but never read through one of the getters.
    std::set<std::string> unread_keys() const;

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> read_;
};

}  // namespace hqsim
