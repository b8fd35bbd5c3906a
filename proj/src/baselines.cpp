#include "detox/baselines.hpp"

#include <algorithm>
#include <thread>

#include "detox/error.hpp"

namespace detox {

std::vector<Sentence> transform_batch(const Detoxifier& method, std::span<const Sentence> inputs,
                                      unsigned threads) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<Sentence> out(inputs.size());
    const std::size_t workers = std::min<std::size_t>(threads, inputs.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < inputs.size(); ++i) out[i] = method.transform(inputs[i]);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < inputs.size(); i += workers)
                        out[i] = method.transform(inputs[i]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Sentence duplicate(const Sentence& x) { return x; }

bool matches_lexicon(const Token& token, const ToxicityLexicon& lexicon, const LemmaTable* lemmas) {
    if (token.norm.empty()) return false;
    if (lexicon.contains(token.norm)) return true;
    if (lemmas) {
        if (const auto lemma = lemmas->lemma(token.norm)) return lexicon.contains(*lemma);
    }
    return false;
}

Sentence delete_toxic(const Sentence& x, const ToxicityLexicon& lexicon, const LemmaTable* lemmas) {
    std::vector<std::string> kept;
    for (const auto& t : x.tokens) {
        if (!matches_lexicon(t, lexicon, lemmas)) kept.push_back(t.surface);
    }
    return from_surfaces(kept);
}

Sentence retrieve(const Sentence& x, const RetrieveIndex& index, const EmbeddingTable& table) {
    return tokenize(nearest_neighbor(x, index, table));
}

DeleteMethod::DeleteMethod(const ToxicityLexicon& lexicon, const LemmaTable* lemmas)
    : lexicon_(lexicon), lemmas_(lemmas) {
    if (lexicon_.empty()) throw DataError("Delete requires a non-empty toxicity lexicon");
}

Sentence DeleteMethod::transform(const Sentence& x) const {
    return delete_toxic(x, lexicon_, lemmas_);
}

RetrieveMethod::RetrieveMethod(const RetrieveIndex& index, const EmbeddingTable& table)
    : index_(index), table_(table) {
    if (index_.empty()) throw DataError("Retrieve requires a non-empty index");
}

Sentence RetrieveMethod::transform(const Sentence& x) const { return retrieve(x, index_, table_); }

}  // namespace detox
