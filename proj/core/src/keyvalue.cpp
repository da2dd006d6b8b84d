#include "jsaforge/keyvalue.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jsaforge/errors.hpp"

namespace jsaforge {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::optional<double> parse_double(std::string_view token) {
    token = trim(token);
    if (token.empty()) return std::nullopt;
    if (token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error("format_double: conversion failed");
    return std::string(buf.data(), ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
    KeyValueFile kv;
    kv.source_ = std::move(source);
    std::size_t line_no = 0;
    for (const auto raw : split(text, '\n')) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(kv.source_, line_no, "expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(kv.source_, line_no, "empty key");
        kv.entries_.push_back({std::string(key), std::string(value), line_no});
    }
    return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
    return parse(read_text_file(path), path.string());
}

bool KeyValueFile::contains(std::string_view key) const { return find(key) != nullptr; }

const KeyValueFile::Entry* KeyValueFile::find(std::string_view key) const {
    const Entry* found = nullptr;
    for (const auto& e : entries_) {
        if (e.key != key) continue;
        if (found) throw ParseError(source_, e.line, "duplicate key '" + e.key + "'");
        found = &e;
    }
    return found;
}

std::vector<const KeyValueFile::Entry*> KeyValueFile::find_all(std::string_view key) const {
    std::vector<const Entry*> out;
    for (const auto& e : entries_) {
        if (e.key == key) out.push_back(&e);
    }
    return out;
}

void KeyValueFile::fail(const Entry& entry, const std::string& what) const {
    throw ParseError(source_, entry.line, entry.key + ": " + what);
}

double KeyValueFile::to_double(const Entry& entry) const {
    const auto v = parse_double(entry.value);
    if (!v || !std::isfinite(*v)) fail(entry, "expected a finite decimal number, got '" + entry.value + "'");
    return *v;
}

std::vector<double> KeyValueFile::to_doubles(const Entry& entry) const {
    std::vector<double> out;
    for (const auto tok : split(entry.value, ',')) {
        const auto v = parse_double(tok);
        if (!v || !std::isfinite(*v)) fail(entry, "bad number '" + std::string(trim(tok)) + "'");
        out.push_back(*v);
    }
    return out;
}

std::string KeyValueFile::require_string(std::string_view key) const {
    const auto* e = find(key);
    if (!e) throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
    return e->value;
}

double KeyValueFile::require_double(std::string_view key) const {
    const auto* e = find(key);
    if (!e) throw ConfigError(source_ + ": missing required key '" + std::string(key) + "'");
    return to_double(*e);
}

std::optional<std::string> KeyValueFile::get_string(std::string_view key) const {
    const auto* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
}

std::optional<double> KeyValueFile::get_double(std::string_view key) const {
    const auto* e = find(key);
    if (!e) return std::nullopt;
    return to_double(*e);
}

std::optional<bool> KeyValueFile::get_bool(std::string_view key) const {
    const auto* e = find(key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    fail(*e, "expected true/false");
}

void KeyValueFile::reject_unknown(const std::vector<std::string_view>& allowed) const {
    for (const auto& e : entries_) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](std::string_view a) {
            if (!a.empty() && a.back() == '*') {
                return std::string_view(e.key).substr(0, a.size() - 1) == a.substr(0, a.size() - 1);
            }
            return e.key == a;
        });
        if (!ok) fail(e, "unknown key");
    }
}

}  // namespace jsaforge
