#include <doctest.h>

#include "detox/rng.hpp"
#include "detox/text.hpp"
#include "support/temp_dir.hpp"

using namespace detox;

namespace {

std::vector<std::string> surfaces(const Sentence& s) {
    std::vector<std::string> out;
    for (const auto& t : s.tokens) out.push_back(t.surface);
    return out;
}

}  // namespace

TEST_CASE("tokenize peels punctuation off words") {
    CHECK(surfaces(tokenize("Привет, мир!")) == std::vector<std::string>{"Привет", ",", "мир", "!"});
    CHECK(tokenize("").tokens.empty());
    CHECK(tokenize("   \t ").tokens.empty());
    CHECK(surfaces(tokenize("a  b")) == std::vector<std::string>{"a", "b"});
    CHECK(surfaces(tokenize("(hi)...")) == std::vector<std::string>{"(", "hi", ")..."});
    CHECK(surfaces(tokenize("don't")) == std::vector<std::string>{"don't"});
}

TEST_CASE("pure punctuation chunks stay whole") {
    CHECK(surfaces(tokenize("ты дурак >>> ты")) == std::vector<std::string>{"ты", "дурак", ">>>", "ты"});
    CHECK(surfaces(tokenize("...")) == std::vector<std::string>{"..."});
    CHECK(surfaces(tokenize("«дурак»")) == std::vector<std::string>{"«", "дурак", "»"});
}

TEST_CASE("unicode whitespace separates tokens") {
    CHECK(surfaces(tokenize("a b c")) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("normalize folds case and strips punctuation") {
    CHECK(normalize("Дурак!") == "дурак");
    CHECK(normalize("...") == "");
    CHECK(normalize("ИДИОТ") == "идиот");
    CHECK(normalize("Ёлка") == "ёлка");
    CHECK(normalize("ÀÉÎ") == "àéî");
    CHECK(tokenize("Hello").tokens[0].norm == "hello");
}

TEST_CASE("invalid utf-8 decodes to replacement characters") {
    const std::string bad = "a\xFF" "b";
    CHECK(utf8::decode(bad) == std::u32string{U'a', 0xFFFD, U'b'});
}

TEST_CASE("tokenize is idempotent and normalize case-insensitive on random text") {
    const std::vector<std::string> pieces{"Привет", ",", "мир", "!", "...", "ДУРАК", "(", ")", "«",
                                          "»", "ёж", "Hello", "don't", ">>>", "x.", "-", "ИДИОТ!"};
    SplitMix64 rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        std::string raw;
        const auto n = rng.index_below(8);
        for (std::size_t i = 0; i < n; ++i) {
            raw += pieces[rng.index_below(pieces.size())];
            raw += rng.index_below(3) == 0 ? "" : (rng.index_below(2) ? " " : "  ");
        }
        const auto once = tokenize(raw);
        const auto twice = tokenize(once.joined());
        CHECK(twice.tokens == once.tokens);
        for (const auto& t : once.tokens) {
            CHECK(normalize(t.norm) == t.norm);
            CHECK(normalize(utf8::upper(t.surface)) == t.norm);
        }
    }
}

TEST_CASE("lemma table loads normalized pairs") {
    testing::TempDir dir;
    const auto path = dir.write("lemmas.tsv", "Дураки\tдурак\nидиотом\tИдиот\n");
    const auto table = LemmaTable::load(path);
    CHECK(table.size() == 2);
    CHECK(table.lemma("дураки") == std::optional<std::string>("дурак"));
    CHECK(table.lemma("идиотом") == std::optional<std::string>("идиот"));
    CHECK_FALSE(table.lemma("мир").has_value());
    CHECK_THROWS(LemmaTable::load(dir.write("bad.tsv", "a\tb\tc\n")));
    CHECK_THROWS(LemmaTable::load(dir.path() / "missing.tsv"));
}
