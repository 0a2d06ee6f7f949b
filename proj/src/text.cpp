#include "kgrag/text.hpp"

#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utypes.h>

#include <algorithm>
#include <cctype>

namespace kgrag::text {

namespace {

bool is_ascii_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool to_utf16(std::string_view s, std::u16string& out) {
    UErrorCode err = U_ZERO_ERROR;
    int32_t len = 0;
    u_strFromUTF8(nullptr, 0, &len, s.data(), static_cast<int32_t>(s.size()), &err);
    if (err != U_BUFFER_OVERFLOW_ERROR && err != U_ZERO_ERROR) {
        return false;
    }
    err = U_ZERO_ERROR;
    out.resize(static_cast<std::size_t>(len));
    u_strFromUTF8(reinterpret_cast<UChar*>(out.data()), len, nullptr,
                  s.data(), static_cast<int32_t>(s.size()), &err);
    return U_SUCCESS(err);
}

std::string from_utf16(const std::u16string& s) {
    UErrorCode err = U_ZERO_ERROR;
    int32_t len = 0;
    u_strToUTF8(nullptr, 0, &len, reinterpret_cast<const UChar*>(s.data()),
                static_cast<int32_t>(s.size()), &err);
    if (err != U_BUFFER_OVERFLOW_ERROR && err != U_ZERO_ERROR) {
        return {};
    }
    err = U_ZERO_ERROR;
    std::string out(static_cast<std::size_t>(len), '\0');
    u_strToUTF8(out.data(), len, nullptr, reinterpret_cast<const UChar*>(s.data()),
                static_cast<int32_t>(s.size()), &err);
    if (!U_SUCCESS(err)) {
        return {};
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string normalize_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_ascii_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::string> tokenize_ws(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) {
            ++i;
        }
        std::size_t start = i;
        while (i < s.size() && !is_ascii_space(s[i])) {
            ++i;
        }
        if (i > start) {
            tokens.emplace_back(s.substr(start, i - start));
        }
    }
    return tokens;
}

std::size_t count_units(std::string_view s) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(s[i])) {
            ++i;
        }
        if (i < s.size()) {
            ++count;
        }
        while (i < s.size() && !is_ascii_space(s[i])) {
            ++i;
        }
    }
    return count;
}

std::string nfc(std::string_view s) {
    std::u16string u16;
    if (!to_utf16(s, u16)) {
        return std::string(s);
    }
    UErrorCode err = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&err);
    if (!U_SUCCESS(err) || norm == nullptr) {
        return std::string(s);
    }
    int32_t len = unorm2_normalize(norm, reinterpret_cast<const UChar*>(u16.data()),
                                   static_cast<int32_t>(u16.size()), nullptr, 0, &err);
    if (err != U_BUFFER_OVERFLOW_ERROR && err != U_ZERO_ERROR) {
        return std::string(s);
    }
    err = U_ZERO_ERROR;
    std::u16string out(static_cast<std::size_t>(len), u'\0');
    unorm2_normalize(norm, reinterpret_cast<const UChar*>(u16.data()),
                     static_cast<int32_t>(u16.size()),
                     reinterpret_cast<UChar*>(out.data()), len, &err);
    if (!U_SUCCESS(err)) {
        return std::string(s);
    }
    return from_utf16(out);
}

std::string casefold(std::string_view s) {
    std::u16string u16;
    if (!to_utf16(s, u16)) {
        return ascii_lower(s);
    }
    UErrorCode err = U_ZERO_ERROR;
    int32_t len = u_strFoldCase(nullptr, 0, reinterpret_cast<const UChar*>(u16.data()),
                                static_cast<int32_t>(u16.size()), U_FOLD_CASE_DEFAULT, &err);
    if (err != U_BUFFER_OVERFLOW_ERROR && err != U_ZERO_ERROR) {
        return ascii_lower(s);
    }
    err = U_ZERO_ERROR;
    std::u16string out(static_cast<std::size_t>(len), u'\0');
    u_strFoldCase(reinterpret_cast<UChar*>(out.data()), len,
                  reinterpret_cast<const UChar*>(u16.data()),
                  static_cast<int32_t>(u16.size()), U_FOLD_CASE_DEFAULT, &err);
    if (!U_SUCCESS(err)) {
        return ascii_lower(s);
    }
    return from_utf16(out);
}

std::string normalize_surface(std::string_view s) {
    return normalize_whitespace(nfc(s));
}

std::string entity_key(std::string_view s) {
    return casefold(normalize_surface(s));
}

std::vector<std::string> alnum_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (c >= 0x80) {
            // Non-ASCII bytes are kept verbatim so multibyte words stay distinct.
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::vector<std::string> answer_tokens(std::string_view s) {
    std::vector<std::string> tokens = alnum_tokens(casefold(s));
    std::erase_if(tokens, [](const std::string& t) {
        return t == "a" || t == "an" || t == "the";
    });
    return tokens;
}

} // namespace kgrag::text
