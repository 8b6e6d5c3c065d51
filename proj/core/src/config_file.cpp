#include "hqsim/config_file.hpp"

#include <fstream>
#include <sstream>

#include "hqsim/error.hpp"
#include "hqsim/text_io.hpp"

namespace hqsim {

KeyValues KeyValues::parse(const std::string& text, const std::string& source) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = text::trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = text::trim(view.substr(0, hash));
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(source, lineno, "expected 'key = value'");
        }
        const auto key = std::string(text::trim(view.substr(0, eq)));
        if (key.empty()) {
            throw ParseError(source, lineno, "empty key");
        }
        if (kv.values_.count(key) != 0) {
            throw ParseError(source, lineno, "duplicate key '" + key + "'");
        }
        kv.values_[key] = std::string(text::trim(view.substr(eq + 1)));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValues::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        return std::nullopt;
    }
    read_.insert(key);
    return it->second;
}

std::optional<double> KeyValues::get_double(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
        return text::parse_double(*v);
    } catch (const Error& e) {
        throw Error("config key '" + key + "': " + e.what());
    }
}

std::optional<long long> KeyValues::get_int(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
        return text::parse_int(*v);
    } catch (const Error& e) {
        throw Error("config key '" + key + "': " + e.what());
    }
}

std::optional<bool> KeyValues::get_bool(const std::string& key) const {
    auto v = get(key);
    if (!v) return std::nullopt;
    try {
        return text::parse_bool(*v);
    } catch (const Error& e) {
        throw Error("config key '" + key + "': " + e.what());
    }
}

std::set<std::string> KeyValues::unread_keys() const {
    std::set<std::string> out;
    for (const auto& [k, v] : values_) {
        if (read_.count(k) == 0) {
            out.insert(k);
        }
    }
    return out;
}

}  // namespace hqsim
