#include "detox/text.hpp"

#include <fstream>

#include "detox/error.hpp"

namespace detox {

namespace utf8 {

std::u32string decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        int len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool ok = len > 0 && i + static_cast<std::size_t>(len) <= s.size();
        for (int k = 1; ok && k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
            } else {
                cp = (cp << 6) | (b & 0x3F);
            }
        }
        if (!ok) {
            out.push_back(char32_t{0xFFFD});
            ++i;
            continue;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(len);
    }
    return out;
}

void append(std::string& out, char32_t cp) {
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

std::string encode(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) append(out, cp);
    return out;
}

bool is_space(char32_t cp) noexcept {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\v':
        case U'\f':
        case U'\r':
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_punct(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp) {
        case 0xA1:
        case 0xA7:
        case 0xAB:
        case 0xB6:
        case 0xB7:
        case 0xBB:
        case 0xBF:
            return true;
        default:
            break;
    }
    return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
           (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
           (cp >= 0xFF01 && cp <= 0xFF0F);
}

char32_t fold(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    if (cp >= 0x100 && cp <= 0x17F) {
        if ((cp <= 0x137 || (cp >= 0x14A && cp <= 0x177)) && cp % 2 == 0) return cp + 1;
        if (((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) && cp % 2 == 1)
            return cp + 1;
        if (cp == 0x178) return 0xFF;
        return cp;
    }
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    if (((cp >= 0x460 && cp <= 0x481) || (cp >= 0x48A && cp <= 0x4BF) ||
         (cp >= 0x4D0 && cp <= 0x4FF)) &&
        cp % 2 == 0)
        return cp + 1;
    if (cp >= 0x4C1 && cp <= 0x4CE && cp % 2 == 1) return cp + 1;
    if (cp == 0x4C0) return 0x4CF;
    return cp;
}

char32_t upper(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= U'a' && cp <= U'z') ? cp - 32 : cp;
    if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 32;
    if (cp == 0xFF) return 0x178;
    if (cp >= 0x100 && cp <= 0x17F) {
        if ((cp <= 0x137 || (cp >= 0x14A && cp <= 0x177)) && cp % 2 == 1) return cp - 1;
        if (((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) && cp % 2 == 0)
            return cp - 1;
        return cp;
    }
    // Final sigma (U+03C2) has no simple uppercase partner here.
    if (cp >= 0x3B1 && cp <= 0x3C9 && cp != 0x3C2) return cp - 32;
    if (cp >= 0x430 && cp <= 0x44F) return cp - 32;
    if (cp >= 0x450 && cp <= 0x45F) return cp - 80;
    if (((cp >= 0x461 && cp <= 0x481) || (cp >= 0x48B && cp <= 0x4BF) ||
         (cp >= 0x4D1 && cp <= 0x4FF)) &&
        cp % 2 == 1)
        return cp - 1;
    if (cp >= 0x4C2 && cp <= 0x4CE && cp % 2 == 0) return cp - 1;
    if (cp == 0x4CF) return 0x4C0;
    return cp;
}

std::string fold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : decode(s)) append(out, fold(cp));
    return out;
}

std::string upper(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : decode(s)) append(out, upper(cp));
    return out;
}

}  // namespace utf8

std::string Sentence::joined() const {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t.surface;
    }
    return out;
}

namespace {

Token make_token(std::u32string_view cps) {
    Token t;
    t.surface = utf8::encode(cps);
    t.norm = normalize(t.surface);
    return t;
}

void split_chunk(std::u32string_view chunk, std::vector<Token>& out) {
    std::size_t begin = 0;
    std::size_t end = chunk.size();
    while (begin < end && utf8::is_punct(chunk[begin])) ++begin;
    if (begin == end) {
        out.push_back(make_token(chunk));
        return;
    }
    while (end > begin && utf8::is_punct(chunk[end - 1])) --end;
    if (begin > 0) out.push_back(make_token(chunk.substr(0, begin)));
    out.push_back(make_token(chunk.substr(begin, end - begin)));
    if (end < chunk.size()) out.push_back(make_token(chunk.substr(end)));
}

}  // namespace

Sentence tokenize(std::string_view raw) {
    Sentence s;
    s.raw = std::string(raw);
    const std::u32string cps = utf8::decode(raw);
    const std::u32string_view view(cps);
    std::size_t i = 0;
    while (i < view.size()) {
        while (i < view.size() && utf8::is_space(view[i])) ++i;
        std::size_t j = i;
        while (j < view.size() && !utf8::is_space(view[j])) ++j;
        if (j > i) split_chunk(view.substr(i, j - i), s.tokens);
        i = j;
    }
    return s;
}

std::string normalize(std::string_view surface) {
    const std::u32string cps = utf8::decode(surface);
    std::size_t begin = 0;
    std::size_t end = cps.size();
    while (begin < end && utf8::is_punct(cps[begin])) ++begin;
    while (end > begin && utf8::is_punct(cps[end - 1])) --end;
    std::string out;
    out.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) utf8::append(out, utf8::fold(cps[i]));
    return out;
}

std::string fold_surface(const Token& token) { return utf8::fold(token.surface); }

std::vector<std::string> folded_tokens(const Sentence& sentence) {
    std::vector<std::string> out;
    out.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) out.push_back(fold_surface(t));
    return out;
}

std::vector<std::string> norm_tokens(const Sentence& sentence) {
    std::vector<std::string> out;
    out.reserve(sentence.tokens.size());
    for (const auto& t : sentence.tokens) {
        if (!t.norm.empty()) out.push_back(t.norm);
    }
    return out;
}

Sentence from_surfaces(std::span<const std::string> surfaces) {
    std::string raw;
    for (const auto& s : surfaces) {
        if (s.empty()) continue;
        if (!raw.empty()) raw.push_back(' ');
        raw += s;
    }
    return tokenize(raw);
}

LemmaTable LemmaTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open lemma table: " + path.string());
    LemmaTable table;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
            throw DataError(path.string() + ": row " + std::to_string(row) +
                            ": expected `surface<TAB>lemma`");
        }
        table.add(std::string_view(line).substr(0, tab), std::string_view(line).substr(tab + 1));
    }
    return table;
}

void LemmaTable::add(std::string_view surface, std::string_view lemma) {
    auto key = normalize(surface);
    auto value = normalize(lemma);
    if (key.empty() || value.empty()) return;
    map_[std::move(key)] = std::move(value);
}

std::optional<std::string> LemmaTable::lemma(std::string_view norm) const {
    const auto it = map_.find(std::string(norm));
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

}  // namespace detox
