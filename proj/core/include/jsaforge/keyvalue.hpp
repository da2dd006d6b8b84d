#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jsaforge {

// Flat `key = value` text. `#` starts a comment line, keys may repeat and
// entries keep file order.
class KeyValueFile {
public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };

    static KeyValueFile parse(std::string_view text, std::string source = "<string>");
    static KeyValueFile load(const std::filesystem::path& path);

    const std::string& source() const noexcept { return source_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    bool contains(std::string_view key) const;
    const Entry* find(std::string_view key) const;
    std::vector<const Entry*> find_all(std::string_view key) const;

    std::string require_string(std::string_view key) const;
    double require_double(std::string_view key) const;
    std::optional<std::string> get_string(std::string_view key) const;
    std::optional<double> get_double(std::string_view key) const;
    std::optional<bool> get_bool(std::string_view key) const;

    double to_double(const Entry& entry) const;
    std::vector<double> to_doubles(const Entry& entry) const;

    // Throws ParseError for the first key not in `allowed` (exact or prefix match
    // for entries ending in '*').
    void reject_unknown(const std::vector<std::string_view>& allowed) const;

    [[noreturn]] void fail(const Entry& entry, const std::string& what) const;

private:
    std::string source_;
    std::vector<Entry> entries_;
};

// Strict decimal parse of the whole token; nullopt on any trailing junk.
std::optional<double> parse_double(std::string_view token);

// Shortest representation that parses back to the same double.
std::string format_double(double value);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

std::string read_text_file(const std::filesystem::path& path);

// 64-bit FNV-1a, stable across platforms. Used for provenance hashes.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

}  // namespace jsaforge
