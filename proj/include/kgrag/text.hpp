#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgrag::text {

// Collapse runs of whitespace to single spaces and trim the ends.
std::string normalize_whitespace(std::string_view s);

// Whitespace-delimited tokens; the unit used for chunk size caps.
std::vector<std::string> tokenize_ws(std::string_view s);
std::size_t count_units(std::string_view s);

// Unicode NFC. Falls back to the input bytes when they are not valid UTF-8.
std::string nfc(std::string_view s);

// Full Unicode case folding (ASCII-only fallback on invalid UTF-8).
std::string casefold(std::string_view s);

// Display form of an entity or relation: NFC, trimmed, inner whitespace
// collapsed. Idempotent.
std::string normalize_surface(std::string_view s);

// Index key for entity equality: case-folded display form. Idempotent.
std::string entity_key(std::string_view s);

// Lowercased alphanumeric tokens. Used by the mock embedding provider and
// the answer-metric normalization.
std::vector<std::string> alnum_tokens(std::string_view s);

// HotpotQA-style answer normalization: casefold, strip punctuation,
// drop the articles a/an/the, collapse whitespace.
std::vector<std::string> answer_tokens(std::string_view s);

} // namespace kgrag::text
