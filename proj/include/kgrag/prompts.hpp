#pragma once

namespace kgrag::prompts {

// Versioned so stored outputs can be traced to the prompt that produced
// them. Bump the suffix on any wording change.

inline constexpr const char* kTripletExtractionSystemV1 =
    "You extract knowledge triplets from text. Given a passage, list the facts it states "
    "as (head entity, relation, tail entity) triplets. Respond with one JSON object per "
    "line, each of the form {\"head\": \"...\", \"relation\": \"...\", \"tail\": \"...\"}. "
    "Use entity names as written in the passage. Output nothing besides the JSON lines. "
    "If the passage states no facts, output nothing.";

// The passage travels as a JSON object on its own line, so the exact text
// survives whitespace-mangling transports and can be recovered from logs.
inline constexpr const char* kTripletExtractionUserPrefixV1 = "Extract triplets from this passage:\n";

inline constexpr const char* kAnswerSystemV1 =
    "You answer questions using only the provided context paragraphs. Reply with the "
    "answer span alone, as briefly as possible. If the context does not contain the "
    "answer, reply with your best guess from the context.";

inline constexpr const char* kAnswerContextHeaderV1 = "Context:\n";
inline constexpr const char* kAnswerQuestionHeaderV1 = "\nQuestion: ";

} // namespace kgrag::prompts
