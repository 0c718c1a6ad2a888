#pragma once

// Thin UTF-8 helpers over ICU: validation, NFC, case folding, script lookup.

#include <string>
#include <string_view>
#include <vector>

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "cmx/error.hpp"

namespace cmx::unicode {

inline bool is_valid_utf8(std::string_view s) {
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const int32_t n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0) return false;
    }
    return true;
}

inline std::vector<char32_t> code_points(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const int32_t n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0) throw DataError("invalid UTF-8");
        out.push_back(static_cast<char32_t>(c));
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t c) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) return;  // not a scalar value
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

inline std::string to_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t c : cps) append_utf8(out, c);
    return out;
}

// Throws DataError on invalid UTF-8.
inline std::string nfc(std::string_view s) {
    if (!is_valid_utf8(s)) throw DataError("invalid UTF-8");
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    if (norm->isNormalizedUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())), status) &&
        U_SUCCESS(status)) {
        return std::string(s);
    }
    status = U_ZERO_ERROR;
    std::string out;
    icu::StringByteSink<std::string> sink(&out);
    norm->normalizeUTF8(0, icu::StringPiece(s.data(), static_cast<int32_t>(s.size())), sink,
                        nullptr, status);
    if (U_FAILURE(status)) throw DataError("NFC normalization failed");
    return out;
}

inline std::string case_fold(std::string_view s) {
    icu::UnicodeString u =
        icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    u.foldCase();
    std::string out;
    u.toUTF8String(out);
    return out;
}

inline bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

// ICU long script name, e.g. "Latin", "Devanagari", "Common".
inline std::string script_name(char32_t c) {
    UErrorCode status = U_ZERO_ERROR;
    UScriptCode code = uscript_getScript(static_cast<UChar32>(c), &status);
    if (U_FAILURE(status)) return "Unknown";
    return uscript_getName(code);
}

// Letters and combining marks that belong to a concrete script (not
// Common/Inherited). Devanagari vowel signs count as letters here.
inline bool is_script_letter(char32_t c) {
    const auto cp = static_cast<UChar32>(c);
    const int8_t cat = u_charType(cp);
    const bool letter_or_mark = u_isalpha(cp) || cat == U_NON_SPACING_MARK ||
                                cat == U_COMBINING_SPACING_MARK || cat == U_ENCLOSING_MARK;
    if (!letter_or_mark) return false;
    UErrorCode status = U_ZERO_ERROR;
    UScriptCode code = uscript_getScript(cp, &status);
    return U_SUCCESS(status) && code != USCRIPT_COMMON && code != USCRIPT_INHERITED &&
           code != USCRIPT_UNKNOWN;
}

}  // namespace cmx::unicode
