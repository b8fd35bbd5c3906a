#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "detox/data_io.hpp"
#include "detox/rng.hpp"
#include "detox/text.hpp"

namespace detox {

/// Which count table a query reads. `any` pools both labels.
enum class LmStyle { toxic, neutral, any };

std::string_view to_string(LmStyle style) noexcept;
std::optional<LmStyle> parse_lm_style(std::string_view text) noexcept;
LmStyle to_lm_style(StyleLabel label) noexcept;

inline constexpr std::string_view kStartToken = "<s>";
inline constexpr std::string_view kEndToken = "</s>";

struct Candidate {
    std::string word;
    double prob = 0.0;
};

/// Candidates sorted by descending probability, ties by ascending word.
class CandidateDistribution {
public:
    CandidateDistribution() = default;
    /// Sorts; drops non-positive entries. Does not renormalize.
    explicit CandidateDistribution(std::vector<Candidate> items);

    const std::vector<Candidate>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const Candidate& operator[](std::size_t i) const { return items_[i]; }
    const Candidate& argmax() const { return items_.front(); }

    double total() const noexcept;
    /// 0 for absent words.
    double probability(std::string_view word) const noexcept;

    /// Divides by the total mass. Throws NumericError if the mass is zero.
    CandidateDistribution normalized() const;

private:
    std::vector<Candidate> items_;
};

/// Fill-in distribution over the vocabulary for a single masked slot.
class MaskedLm {
public:
    virtual ~MaskedLm() = default;
    virtual CandidateDistribution masked_fill(std::span<const std::string> left,
                                              std::span<const std::string> right,
                                              LmStyle style) const = 0;
};

struct SequenceScore {
    double log_prob = 0.0;
    /// Tokens scored, end marker included.
    std::size_t count = 0;
};

class ScoringLm {
public:
    virtual ~ScoringLm() = default;
    /// Natural-log probability of the token sequence followed by the end
    /// marker. An empty sequence scores only the end marker.
    virtual SequenceScore score(std::span<const std::string> tokens) const = 0;
};

/// Next-token distribution; the end marker appears as `kEndToken`.
class GenerativeLm {
public:
    virtual ~GenerativeLm() = default;
    virtual CandidateDistribution next_distribution(std::span<const std::string> history,
                                                    LmStyle style) const = 0;
};

/// Add-α smoothed n-gram model with separate count tables per style:
///
///   P_s(w | h) = (c_s(h, w) + α) / (c_s(h) + α·V′)
///
/// where h is the previous n−1 tokens (start-padded), V′ = |vocab| + 1 (the
/// end marker is an outcome; the start marker is not). Tokens are
/// case-folded surfaces. Out-of-vocabulary tokens count zero everywhere.
class NgramLm final : public MaskedLm, public ScoringLm, public GenerativeLm {
public:
    using Id = std::uint32_t;
    using Key = std::vector<Id>;

    struct KeyHash {
        std::size_t operator()(const Key& key) const noexcept;
    };

    struct CountTable {
        std::unordered_map<Key, std::uint64_t, KeyHash> ngrams;
        std::unordered_map<Key, std::uint64_t, KeyHash> contexts;
    };

    /// Throws DataError when order < 1, α ≤ 0 or the corpus is empty.
    static NgramLm train(const LabeledCorpus& corpus, std::size_t order, double alpha);

    std::size_t order() const noexcept { return order_; }
    double alpha() const noexcept { return alpha_; }
    const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }
    /// |vocab| + 1.
    std::size_t outcome_count() const noexcept { return vocab_.size() + 1; }
    std::optional<Id> id(std::string_view token) const;

    /// P_style(word | history), word may be `kEndToken`.
    double conditional(std::span<const std::string> history, std::string_view word,
                       LmStyle style) const;

    CandidateDistribution masked_fill(std::span<const std::string> left,
                                      std::span<const std::string> right,
                                      LmStyle style) const override;
    SequenceScore score(std::span<const std::string> tokens) const override;
    CandidateDistribution next_distribution(std::span<const std::string> history,
                                            LmStyle style) const override;

    /// Header `#detox-ngram v1 order alpha`, a `#vocab` row, then
    /// `style TAB ngram TAB count` rows.
    void save(const std::filesystem::path& path) const;
    static NgramLm load(const std::filesystem::path& path);

private:
    NgramLm(std::size_t order, double alpha) : order_(order), alpha_(alpha) {}

    Id end_id() const noexcept { return static_cast<Id>(vocab_.size()); }
    Id start_id() const noexcept { return static_cast<Id>(vocab_.size() + 1); }
    static constexpr Id kUnknown = UINT32_MAX;

    const CountTable& table(LmStyle style) const noexcept;
    void add_ngram(LmStyle style, Key key, std::uint64_t count);
    Key context_of(std::span<const std::string> history) const;
    Key context_of(const Key& history) const;
    double prob(const CountTable& t, const Key& context, Id word) const;

    std::size_t order_;
    double alpha_;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, Id> index_;
    std::array<CountTable, 3> tables_;
};

/// Convenience wrappers matching the operation names used elsewhere.
inline NgramLm train_lm(const LabeledCorpus& corpus, std::size_t order = 3, double alpha = 0.1) {
    return NgramLm::train(corpus, order, alpha);
}

/// exp(−(1/N)·Σ ln P_any), N = tokens + 1. Throws DataError on an empty
/// sentence.
double perplexity(const ScoringLm& lm, const Sentence& sentence);

struct GenerationParams {
    std::size_t top_k = 3;
    double top_p = 0.95;
    double temperature = 50.0;
    std::size_t max_tokens = 40;
    std::uint64_t seed = 0;
};

/// Throws DataError for top_k = 0, top_p ∉ (0,1] or temperature ≤ 0.
void validate(const GenerationParams& params);

/// p_i ← p_i^{1/t}, renormalized. t may be +∞ (uniform).
CandidateDistribution apply_temperature(const CandidateDistribution& dist, double temperature);

/// Temperature, then the intersection of the top-k set and the nucleus (the
/// shortest prefix with cumulative mass ≥ top_p, at least one word),
/// renormalized.
CandidateDistribution filter_distribution(const CandidateDistribution& dist,
                                          const GenerationParams& params);

std::string filtered_sample(const CandidateDistribution& dist, const GenerationParams& params,
                            SplitMix64& rng);
/// Single draw from SplitMix64(params.seed).
std::string filtered_sample(const CandidateDistribution& dist, const GenerationParams& params);

/// Autoregressive continuation until the end marker or max_tokens. The
/// sampler is seeded once from params.seed.
std::vector<std::string> generate(const GenerativeLm& lm, std::span<const std::string> prompt,
                                  const GenerationParams& params, LmStyle style = LmStyle::any);

}  // namespace detox
