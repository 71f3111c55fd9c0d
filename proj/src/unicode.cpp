#include "embexp/unicode.hpp"

#include <algorithm>
#include <iterator>

namespace embexp::unicode {

namespace {

struct CodepointRange {
    char32_t first;
    char32_t last;
};

struct CaseMapping {
    char32_t from;
    char32_t to;
};

#include "unicode_tables.inc"

}  // namespace

bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    auto it = std::upper_bound(std::begin(kLetterRanges), std::end(kLetterRanges), cp,
                               [](char32_t v, const CodepointRange& r) { return v < r.first; });
    if (it == std::begin(kLetterRanges)) return false;
    --it;
    return cp <= it->last;
}

char32_t to_lower(char32_t cp) {
    if (cp < 0x80) {
        if (cp >= 'A' && cp <= 'Z') return cp + 32;
        return cp;
    }
    auto it = std::lower_bound(std::begin(kLowerMappings), std::end(kLowerMappings), cp,
                               [](const CaseMapping& m, char32_t v) { return m.from < v; });
    if (it != std::end(kLowerMappings) && it->from == cp) return it->to;
    return cp;
}

char32_t to_upper(char32_t cp) {
    if (cp < 0x80) {
        if (cp >= 'a' && cp <= 'z') return cp - 32;
        return cp;
    }
    auto it = std::lower_bound(std::begin(kUpperMappings), std::end(kUpperMappings), cp,
                               [](const CaseMapping& m, char32_t v) { return m.from < v; });
    if (it != std::end(kUpperMappings) && it->from == cp) return it->to;
    return cp;
}

bool is_lowercase_letter(char32_t cp) {
    return is_letter(cp) && to_lower(cp) == cp;
}

char32_t decode_utf8(const std::string& data, std::size_t& pos) {
    const auto bad = static_cast<char32_t>(0xFFFFFFFF);
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
    const std::size_t n = data.size();
    unsigned char b0 = bytes[pos];
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return bad;
    }
    if (pos + len > n) return bad;
    for (int i = 1; i < len; ++i) {
        unsigned char b = bytes[pos + i];
        if ((b & 0xC0) != 0x80) return bad;
        cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong forms, surrogates and out-of-range values
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return bad;
    pos += static_cast<std::size_t>(len);
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace embexp::unicode
