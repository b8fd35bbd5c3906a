#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace detox {

struct Token {
    std::string surface;
    /// Case-folded surface with surrounding punctuation stripped. Empty only
    /// for pure-punctuation tokens.
    std::string norm;

    bool operator==(const Token&) const = default;
};

struct Sentence {
    std::string raw;
    std::vector<Token> tokens;

    /// Surfaces joined with single spaces.
    std::string joined() const;

    bool operator==(const Sentence&) const = default;
};

namespace utf8 {

/// Decodes UTF-8; invalid bytes decode to U+FFFD one byte at a time.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

bool is_space(char32_t cp) noexcept;
bool is_punct(char32_t cp) noexcept;

/// Simple (one-to-one) case mappings for Latin, Latin-1, Latin Extended-A,
/// Greek and Cyrillic. Other code points map to themselves.
char32_t fold(char32_t cp) noexcept;
char32_t upper(char32_t cp) noexcept;

std::string fold(std::string_view s);
std::string upper(std::string_view s);

}  // namespace utf8

/// Splits on Unicode whitespace, then peels the leading and trailing runs of
/// punctuation off each chunk as separate tokens. A chunk that is entirely
/// punctuation ("...", ">>>") stays one token.
Sentence tokenize(std::string_view raw);

/// Case-fold and strip surrounding punctuation.
std::string normalize(std::string_view surface);

/// Case-folded surface, punctuation kept. This is the unit the language
/// models and BLEU work on.
std::string fold_surface(const Token& token);
std::vector<std::string> folded_tokens(const Sentence& sentence);

/// Non-empty normalized forms, in order.
std::vector<std::string> norm_tokens(const Sentence& sentence);

/// Sentence built from already-tokenized surfaces (joined, re-tokenized).
Sentence from_surfaces(std::span<const std::string> surfaces);

/// Optional surface→lemma map standing in for a morphological lemmatizer.
/// Keys and values are stored normalized.
class LemmaTable {
public:
    LemmaTable() = default;

    /// TSV with rows `surface TAB lemma`, UTF-8, no header.
    static LemmaTable load(const std::filesystem::path& path);

    void add(std::string_view surface, std::string_view lemma);
    std::optional<std::string> lemma(std::string_view norm) const;
    std::size_t size() const noexcept { return map_.size(); }

private:
    std::unordered_map<std::string, std::string> map_;
};

}  // namespace detox
