#pragma once

// Small text utilities shared by the line-oriented file formats and logs.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mref::text {

/// Six-decimal fixed-point rendering used for every time and value in logs.
std::string fixed6(double value);

/// Double-quoted string with `\` and `"` escaped.
std::string quote(std::string_view s);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Splits `text` into lines, accepting LF or CRLF endings. A trailing newline
/// does not produce an empty final line.
std::vector<std::string_view> split_lines(std::string_view text);

/// Whitespace tokenizer honouring double quotes (with `\"` and `\\` escapes).
/// Quotes are removed: `name="a b"` yields the token `name=a b`.
/// Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> tokenize(std::string_view line);

/// Splits `key=value` at the first '='.
std::optional<std::pair<std::string_view, std::string_view>> key_value(std::string_view token);

/// Strict, locale-independent parsers: the whole input must be consumed.
std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_u64(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

std::string to_hex(const std::uint8_t* data, std::size_t size);
bool from_hex(std::string_view hex, std::uint8_t* out, std::size_t size);

}  // namespace mref::text
