#include "hqsim/text_io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "hqsim/error.hpp"

namespace hqsim::text {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        throw Error("format_double: conversion failed");
    }
    return std::string(buf.data(), end);
}

double parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error("not a number: '" + std::string(s) + "'");
    }
    return v;
}

long long parse_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
        throw Error("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

bool parse_bool(std::string_view s) {
    s = trim(s);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw Error("not a boolean: '" + std::string(s) + "'");
}

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(trim(s.substr(start)));
            break;
        }
        out.emplace_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

std::vector<int> parse_int_list(std::string_view s) {
    s = trim(s);
    std::vector<int> out;
    if (const auto dots = s.find(".."); dots != std::string_view::npos) {
        const auto lo = parse_int(s.substr(0, dots));
        const auto hi = parse_int(s.substr(dots + 2));
        if (hi < lo) {
            throw Error("empty range: '" + std::string(s) + "'");
        }
        for (auto v = lo; v <= hi; ++v) {
            out.push_back(static_cast<int>(v));
        }
        return out;
    }
    for (const auto& part : split(s, ',')) {
        out.push_back(static_cast<int>(parse_int(part)));
    }
    return out;
}

}  // namespace hqsim::text
