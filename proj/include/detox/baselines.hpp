#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "detox/embeddings.hpp"
#include "detox/text.hpp"
#include "detox/toxicity.hpp"

namespace detox {

/// A style-transfer method: toxic sentence in, neutral sentence out.
class Detoxifier {
public:
    virtual ~Detoxifier() = default;
    virtual std::string name() const = 0;
    virtual Sentence transform(const Sentence& x) const = 0;
};

/// Runs `transform` over a batch, split across `threads` workers (0 picks
/// the hardware concurrency). Output order matches input order.
std::vector<Sentence> transform_batch(const Detoxifier& method, std::span<const Sentence> inputs,
                                      unsigned threads = 1);

Sentence duplicate(const Sentence& x);

/// True if the token's normalized form, or its lemma, is in the lexicon.
bool matches_lexicon(const Token& token, const ToxicityLexicon& lexicon,
                     const LemmaTable* lemmas = nullptr);

/// Drops every lexicon token and rebuilds the text with single spaces. The
/// result may be empty.
Sentence delete_toxic(const Sentence& x, const ToxicityLexicon& lexicon,
                      const LemmaTable* lemmas = nullptr);

Sentence retrieve(const Sentence& x, const RetrieveIndex& index, const EmbeddingTable& table);

class DuplicateMethod final : public Detoxifier {
public:
    std::string name() const override { return "Duplicate"; }
    Sentence transform(const Sentence& x) const override { return duplicate(x); }
};

class DeleteMethod final : public Detoxifier {
public:
    explicit DeleteMethod(const ToxicityLexicon& lexicon, const LemmaTable* lemmas = nullptr);
    std::string name() const override { return "Delete"; }
    Sentence transform(const Sentence& x) const override;

private:
    const ToxicityLexicon& lexicon_;
    const LemmaTable* lemmas_;
};

class RetrieveMethod final : public Detoxifier {
public:
    RetrieveMethod(const RetrieveIndex& index, const EmbeddingTable& table);
    std::string name() const override { return "Retrieve"; }
    Sentence transform(const Sentence& x) const override;

private:
    const RetrieveIndex& index_;
    const EmbeddingTable& table_;
};

}  // namespace detox
