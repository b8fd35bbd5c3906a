#include <doctest.h>

#include <cmath>

#include "detox/embeddings.hpp"
#include "detox/error.hpp"
#include "detox/rng.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace detox;

namespace {

EmbeddingTable ab_table() {
    EmbeddingTable t(2);
    t.set("a", std::vector<double>{1, 0});
    t.set("b", std::vector<double>{0, 1});
    return t;
}

std::vector<double> random_vector(SplitMix64& rng, std::size_t dim) {
    std::vector<double> v(dim);
    for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
    return v;
}

}  // namespace

TEST_CASE("embedding file loading") {
    testing::TempDir dir;
    const auto t = EmbeddingTable::load(dir.write("ok.vec", "2 3\nмир 1 2 3\nдом 0.5 -1 2e-1\n"));
    CHECK(t.size() == 2);
    CHECK(t.dim() == 3);
    const auto dom = t.find("дом");
    REQUIRE(dom.has_value());
    CHECK((*dom)[2] == doctest::Approx(0.2));

    try {
        EmbeddingTable::load(dir.write("short.vec", "2 3\nмир 1 2 3\nдом 1 2\n"));
        FAIL("expected an error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(EmbeddingTable::load(dir.write("nohdr.vec", "мир 1 2 3\n")), DataError);
    CHECK_THROWS_AS(EmbeddingTable::load(dir.write("nan.vec", "1 2\nмир 1 abc\n")), DataError);
    CHECK_THROWS_AS(EmbeddingTable::load(dir.path() / "missing.vec"), IoError);
}

TEST_CASE("duplicate embedding rows: last wins with a warning") {
    testing::TempDir dir;
    const auto t = EmbeddingTable::load(dir.write("dup.vec", "2 2\nмир 1 0\nмир 0 1\n"));
    CHECK(t.size() == 1);
    CHECK((*t.find("мир"))[1] == 1.0);
    REQUIRE(t.warnings().size() == 1);
    CHECK(t.warnings()[0].find("мир") != std::string::npos);
}

TEST_CASE("embedding table round-trips") {
    testing::TempDir dir;
    SplitMix64 rng(1);
    EmbeddingTable t(4);
    for (const char* w : {"a", "бы", "c"}) t.set(w, random_vector(rng, 4));
    t.save(dir.path() / "t.vec");
    const auto u = EmbeddingTable::load(dir.path() / "t.vec");
    CHECK(u.words() == t.words());
    for (const auto& w : t.words()) {
        const auto x = *t.find(w);
        const auto y = *u.find(w);
        CHECK(std::equal(x.begin(), x.end(), y.begin()));
    }
}

TEST_CASE("sentence vector is the mean of known token vectors") {
    const auto t = ab_table();
    CHECK(*sentence_vector(tokenize("a"), t) == Vector{1, 0});
    CHECK(*sentence_vector(tokenize("a b"), t) == Vector{0.5, 0.5});
    CHECK(*sentence_vector(tokenize("A, zzz b!"), t) == Vector{0.5, 0.5});
    CHECK_FALSE(sentence_vector(tokenize("zzz yyy"), t).has_value());
    CHECK_FALSE(sentence_vector(tokenize(""), t).has_value());
}

TEST_CASE("cosine examples") {
    const std::vector<double> u{1, 2, 3};
    CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 0.0);
    CHECK(cosine(std::vector<double>{1, 0}, std::vector<double>{-1, 0}) == -1.0);
    CHECK(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0}) == 0.0);
    CHECK_THROWS_AS(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 0, 0}), DataError);
    // (1,1)·(1,0) / (√2·1)
    CHECK(cosine(std::vector<double>{1, 1}, std::vector<double>{1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("cosine is reflexive, symmetric and scale invariant") {
    SplitMix64 rng(42);
    for (int i = 0; i < 300; ++i) {
        const auto dim = 1 + rng.index_below(16);
        const auto u = random_vector(rng, dim);
        const auto v = random_vector(rng, dim);
        CHECK(std::abs(cosine(u, u) - 1.0) <= 1e-12);
        CHECK(cosine(u, v) == cosine(v, u));
        const double a = 0.01 + 100.0 * rng.uniform();
        auto au = u;
        for (auto& x : au) x *= a;
        CHECK(cosine(au, v) == doctest::Approx(cosine(u, v)).epsilon(1e-12));
        const double c = cosine(u, v);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("nearest candidate among three hand-set vectors") {
    RetrieveIndex index;
    index.add("first", {1, 0});
    index.add("second", {0, 1});
    index.add("third", {0.9, 0.1});
    // cosines to (1,0): 1, 0, 0.9/√0.82 ≈ 0.9939
    CHECK(nearest_index(std::vector<double>{1, 0}, index) == 0);
    CHECK(nearest_index(std::vector<double>{0, 1}, index) == 1);
    CHECK(nearest_index(std::vector<double>{0.9, 0.1}, index) == 2);

    CHECK_THROWS_AS(nearest_index(std::vector<double>{1, 0}, RetrieveIndex{}), DataError);
}

TEST_CASE("ties go to the lowest candidate index") {
    RetrieveIndex index;
    index.add("x", {2, 0});
    index.add("y", {1, 0});
    CHECK(nearest_index(std::vector<double>{5, 0}, index) == 0);
}

TEST_CASE("nearest neighbor by sentence, with fallback for unknown queries") {
    const auto t = ab_table();
    const std::vector<std::string> cands{"b b", "a", "a b"};
    const auto index = RetrieveIndex::build(cands, t);
    CHECK(nearest_neighbor(tokenize("a a"), index, t) == "a");
    CHECK(nearest_neighbor(tokenize("b"), index, t) == "b b");
    CHECK(nearest_neighbor(tokenize("zzz"), index, t) == "b b");
    CHECK(nearest_neighbor(tokenize("a b"), index, t) == "a b");
}

TEST_CASE("index from a labeled corpus keeps neutral entries only") {
    LabeledCorpus c;
    c.add("a", StyleLabel::neutral);
    c.add("b", StyleLabel::toxic);
    c.add("a b", StyleLabel::neutral);
    const auto index = RetrieveIndex::build(c, ab_table());
    REQUIRE(index.size() == 2);
    CHECK(index.sentence(0) == "a");
    CHECK(index.sentence(1) == "a b");
}

TEST_CASE("nearest neighbor agrees with a brute-force scan and ignores scaling") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t dim = 2 + rng.index_below(8);
        const std::size_t n = 1 + rng.index_below(1000);
        RetrieveIndex index, scaled;
        std::vector<std::vector<double>> raw;
        const double s = 0.1 + 10.0 * rng.uniform();
        for (std::size_t i = 0; i < n; ++i) {
            auto v = random_vector(rng, dim);
            raw.push_back(v);
            index.add("c" + std::to_string(i), v);
            for (auto& x : v) x *= s;
            scaled.add("c" + std::to_string(i), v);
        }
        for (int q = 0; q < 5; ++q) {
            const auto query = random_vector(rng, dim);
            const auto expected = oracle::nearest(query, raw);
            CHECK(nearest_index(query, index) == expected);
            CHECK(nearest_index(query, scaled) == expected);
        }
    }
}

TEST_CASE("retrieve index persistence") {
    testing::TempDir dir;
    RetrieveIndex index;
    index.add("ты хороший", {0.25, -1.5});
    index.add("привет", {1e-300, 3});
    index.save(dir.path() / "idx.tsv");
    const auto back = RetrieveIndex::load(dir.path() / "idx.tsv");
    REQUIRE(back.size() == 2);
    CHECK(back.sentence(0) == "ты хороший");
    CHECK(back.vector(1)[0] == 1e-300);
    CHECK(back.vector(0)[1] == -1.5);
    CHECK_THROWS_AS(RetrieveIndex::load(dir.write("bad.tsv", "x\t1,2\ny\t1\n")), DataError);
}
