#include <doctest.h>

#include <cmath>
#include <functional>

#include "detox/condbert.hpp"
#include "detox/error.hpp"
#include "detox/synthetic.hpp"
#include "support/oracles.hpp"

using namespace detox;

namespace {

using Tokens = std::vector<std::string>;

/// Fill-in distributions that depend on the full left and right context
/// through a hash, so every prefix sees a different distribution.
class HashedLm final : public MaskedLm {
public:
    HashedLm(Tokens vocab, std::uint64_t salt) : vocab_(std::move(vocab)), salt_(salt) {}

    CandidateDistribution masked_fill(std::span<const std::string> left, std::span<const std::string> right,
                                      LmStyle) const override {
        return CandidateDistribution(raw(left, right));
    }

    std::vector<Candidate> raw(std::span<const std::string> left, std::span<const std::string> right) const {
        std::string key;
        for (const auto& w : left) key += w + "|";
        key += "#";
        for (const auto& w : right) key += w + "|";
        SplitMix64 rng(std::hash<std::string>{}(key) ^ salt_);
        std::vector<Candidate> out;
        double z = 0;
        for (const auto& w : vocab_) {
            out.push_back({w, 0.05 + rng.uniform()});
            z += out.back().prob;
        }
        for (auto& c : out) c.prob /= z;
        return out;
    }

private:
    Tokens vocab_;
    std::uint64_t salt_;
};

/// p·exp(−λ·weight) for lexicon words (or removal), renormalized; written
/// out directly from the rule.
std::map<std::string, double> penalize_by_hand(const std::vector<Candidate>& dist, const ToxicityLexicon& lex,
                                               double lambda, bool ban) {
    std::map<std::string, double> out;
    double z = 0;
    for (const auto& c : dist) {
        double p = c.prob;
        if (lex.contains(c.word)) {
            if (ban) continue;
            p *= std::exp(-lambda * *lex.weight(c.word));
        }
        out[c.word] = p;
        z += p;
    }
    for (auto& [w, p] : out) p /= z;
    return out;
}

LabeledCorpus ty_corpus() {
    LabeledCorpus c;
    c.add("ты хороший", StyleLabel::neutral);
    c.add("ты дурак", StyleLabel::toxic);
    return c;
}

}  // namespace

TEST_CASE("harmonic mean") {
    CHECK(harmonic_mean(std::vector<double>{0.4}) == doctest::Approx(0.4));
    CHECK(harmonic_mean(std::vector<double>{0.5, 0.5}) == doctest::Approx(0.5));
    CHECK(harmonic_mean(std::vector<double>{0.2, 0.8}) == doctest::Approx(2.0 / (5.0 + 1.25)));
    CHECK(harmonic_mean(std::vector<double>{}) == 0.0);

    const auto two = BeamHypothesis{}.extended("a", 0.5).extended("b", 0.5);
    const auto one = BeamHypothesis{}.extended("c", 0.4);
    CHECK(two.score == doctest::Approx(0.5));
    CHECK(ranks_before(two, one));
}

TEST_CASE("harmonic mean lies between the old score and the new probability") {
    SplitMix64 rng(31);
    for (int i = 0; i < 1000; ++i) {
        BeamHypothesis h;
        const auto n = 1 + rng.index_below(5);
        for (std::size_t k = 0; k < n; ++k) h = h.extended("w", 0.001 + 0.999 * rng.uniform());
        CHECK(h.score == doctest::Approx(oracle::harmonic(h.probs)).epsilon(1e-12));
        const double p = 0.001 + 0.999 * rng.uniform();
        const auto next = h.extended("v", p);
        if (p == h.score) continue;
        CHECK(next.score > std::min(h.score, p));
        CHECK(next.score < std::max(h.score, p));
        CHECK(next.score <= *std::max_element(next.probs.begin(), next.probs.end()));
        CHECK(next.score >= *std::min_element(next.probs.begin(), next.probs.end()));
    }
}

TEST_CASE("ranking: score, then length, then lexicographic") {
    BeamHypothesis a{{"b"}, {0.5}, 0.5};
    BeamHypothesis b{{"a", "a"}, {0.5, 0.5}, 0.5};
    BeamHypothesis c{{"a"}, {0.5}, 0.5};
    CHECK(ranks_before(a, b));
    CHECK(ranks_before(c, a));
    CHECK_FALSE(ranks_before(a, a));
}

TEST_CASE("mask positions") {
    const auto lex = ToxicityLexicon::from_words(Tokens{"дурак", "идиот"});
    CHECK(find_mask_positions(tokenize("ты дурак и идиот"), lex) == std::vector<std::size_t>{1, 3});
    CHECK(find_mask_positions(tokenize("ты хороший"), lex).empty());
    CHECK(find_mask_positions(tokenize("Дурак, идиот!"), lex) == std::vector<std::size_t>{0, 2});
    CHECK(find_mask_positions(tokenize("дурак идиот"), lex) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("penalized distribution examples") {
    const auto lex = ToxicityLexicon::from_words(Tokens{"bad"});
    const CandidateDistribution even({{"bad", 0.5}, {"ok", 0.5}});
    const auto same = penalized_distribution(even, lex, 0.0, false);
    CHECK(same.probability("bad") == 0.5);
    CHECK(same.probability("ok") == 0.5);

    const auto banned = penalized_distribution(CandidateDistribution({{"bad", 0.6}, {"ok", 0.4}}), lex, 1.5, true);
    REQUIRE(banned.size() == 1);
    CHECK(banned.probability("ok") == doctest::Approx(1.0));

    const auto halved = penalized_distribution(even, lex, std::log(2.0), false);
    CHECK(halved.probability("bad") == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(halved.probability("ok") == doctest::Approx(2.0 / 3).epsilon(1e-15));

    CHECK_THROWS_AS(penalized_distribution(CandidateDistribution({{"bad", 1.0}}), lex, 1.0, true), DataError);
}

TEST_CASE("penalized probability of a lexicon word never grows with the penalty") {
    const auto lex = ToxicityLexicon::from_words(Tokens{"bad", "worse"}, 0.7);
    const CandidateDistribution d({{"bad", 0.3}, {"worse", 0.1}, {"ok", 0.4}, {"fine", 0.2}});
    double prev_bad = 1.0, prev_worse = 1.0;
    for (double lambda = 0.0; lambda <= 20.0; lambda += 0.25) {
        const auto p = penalized_distribution(d, lex, lambda, false);
        CHECK(p.probability("bad") <= prev_bad);
        CHECK(p.probability("worse") <= prev_worse);
        prev_bad = p.probability("bad");
        prev_worse = p.probability("worse");
    }
}

TEST_CASE("single-step beam is the penalized argmax") {
    const HashedLm lm({"a", "b", "c", "d", "e"}, 3);
    const auto lex = ToxicityLexicon::from_words(Tokens{"b"});
    CondBertConfig cfg;
    cfg.max_length = 1;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Tokens left{"x" + std::to_string(s)};
        const auto expected = penalized_distribution(lm.masked_fill(left, Tokens{}, cfg.style), lex, cfg.penalty, true).argmax().word;
        CHECK(beam_replace(left, Tokens{}, lm, cfg, lex) == Tokens{expected});
    }
}

TEST_CASE("full-width beam search equals exhaustive enumeration") {
    for (std::uint64_t salt = 0; salt < 40; ++salt) {
        const std::size_t v = 2 + salt % 7;  // up to 8 words
        Tokens vocab;
        for (std::size_t i = 0; i < v; ++i) vocab.push_back(std::string(1, static_cast<char>('a' + i)));
        const HashedLm lm(vocab, salt);
        WordWeights weights{{"a", 0.5 + 0.1 * static_cast<double>(salt % 3)}};
        const ToxicityLexicon lex(weights, 0.0);
        CondBertConfig cfg;
        cfg.beam_width = v;
        cfg.max_length = 2;
        cfg.hard_ban = salt % 2 == 0;
        cfg.penalty = 0.8;
        const Tokens left{"l"}, right{"r"};

        std::vector<oracle::Scored> all;
        const auto first = penalize_by_hand(lm.raw(left, right), lex, cfg.penalty, cfg.hard_ban);
        for (const auto& [w1, p1] : first) {
            all.push_back({{w1}, p1});
            const auto second = penalize_by_hand(lm.raw(Tokens{"l", w1}, right), lex, cfg.penalty, cfg.hard_ban);
            for (const auto& [w2, p2] : second) all.push_back({{w1, w2}, oracle::harmonic({p1, p2})});
        }
        const auto best = *std::min_element(all.begin(), all.end(), oracle::better);
        CHECK(beam_replace(left, right, lm, cfg, lex) == best.tokens);
    }
}

TEST_CASE("condBERT replaces the insult with the neutral word") {
    const auto lm = NgramLm::train(ty_corpus(), 2, 0.1);
    const auto lex = ToxicityLexicon::from_words(Tokens{"дурак"});
    const CondBertConfig cfg;
    CHECK(detoxify_condbert(tokenize("ты дурак"), lm, lex, cfg).raw == "ты хороший");

    const auto clean = tokenize("ты  хороший!");
    CHECK(detoxify_condbert(clean, lm, lex, cfg).raw == clean.raw);

    CondBertMethod method(lm, lex, cfg);
    CHECK(method.name() == "condBERT");
    CHECK(method.transform(tokenize("ты дурак")).raw == "ты хороший");
}

TEST_CASE("later masks see earlier replacements") {
    // Neutral text pairs хороший with парень; the second mask should follow.
    LabeledCorpus c;
    c.add("ты хороший парень", StyleLabel::neutral);
    c.add("ты дурак урод", StyleLabel::toxic);
    const auto lm = NgramLm::train(c, 2, 0.1);
    const auto lex = ToxicityLexicon::from_words(Tokens{"дурак", "урод"});
    CondBertConfig cfg;
    cfg.max_length = 1;
    CHECK(detoxify_condbert(tokenize("ты дурак урод"), lm, lex, cfg).raw == "ты хороший парень");
}

TEST_CASE("hard ban: no lexicon word survives on a fuzz batch") {
    const auto corpus = synthetic::labeled_corpus({.neutral = 400, .toxic = 150, .min_fillers = 3, .max_fillers = 8, .seed = 21});
    const auto lm = NgramLm::train(corpus, 3, 0.1);
    const auto lex = ToxicityLexicon::from_words(synthetic::toxic_words(), 2.0);
    const CondBertConfig cfg;
    std::size_t changed = 0;
    for (const auto& raw : synthetic::toxic_sentences(1000, {.min_fillers = 2, .max_fillers = 8}, 99)) {
        const auto y = detoxify_condbert(tokenize(raw), lm, lex, cfg);
        for (const auto& t : y.tokens) CHECK_FALSE(lex.contains(t.norm));
        changed += y.raw != raw;
    }
    CHECK(changed == 1000);
}

TEST_CASE("config validation") {
    CondBertConfig cfg;
    cfg.beam_width = 0;
    CHECK_THROWS_AS(validate(cfg), DataError);
    cfg = {};
    cfg.max_length = 0;
    CHECK_THROWS_AS(validate(cfg), DataError);
    cfg = {};
    cfg.penalty = -1;
    CHECK_THROWS_AS(validate(cfg), DataError);
}
