#pragma once

#include <span>
#include <string>
#include <vector>

#include "detox/baselines.hpp"
#include "detox/ngram_lm.hpp"
#include "detox/toxicity.hpp"

namespace detox {

struct CondBertConfig {
    /// λ in p(w) ← p(w)·exp(−λ·weight(w)) for lexicon words.
    double penalty = 1.5;
    std::size_t beam_width = 5;
    /// Longest multi-word replacement for a single mask.
    std::size_t max_length = 3;
    /// Style the fill-in distribution is conditioned on. `neutral` is the
    /// style-conditioned setup; `any` pools both corpora (the unconditioned
    /// setup).
    LmStyle style = LmStyle::neutral;
    /// Remove lexicon words from the candidates entirely.
    bool hard_ban = true;
};

void validate(const CondBertConfig& config);

/// len / Σ 1/p_i. Returns 0 for an empty span or any non-positive p.
double harmonic_mean(std::span<const double> probs);

struct BeamHypothesis {
    std::vector<std::string> tokens;
    std::vector<double> probs;
    double score = 0.0;

    BeamHypothesis extended(std::string token, double prob) const;
};

/// Ranking used for both pruning and the final answer: higher score, then
/// fewer tokens, then lexicographically smaller token sequence.
bool ranks_before(const BeamHypothesis& a, const BeamHypothesis& b);

/// Ascending indices of tokens whose normalized form is in the lexicon.
std::vector<std::size_t> find_mask_positions(const Sentence& x, const ToxicityLexicon& lexicon);

/// Applies the toxicity penalty (or the ban) to lexicon words and
/// renormalizes; banned words are removed. Throws DataError when no mass
/// survives.
CandidateDistribution penalized_distribution(const CandidateDistribution& dist,
                                             const ToxicityLexicon& lexicon, double penalty,
                                             bool hard_ban);

/// Beam search over replacements of length 1..max_length. Each step expands
/// every hypothesis with the top `beam_width` words of the penalized fill-in
/// distribution given `left + hypothesis` and `right`; the answer is the best
/// hypothesis of any length under `ranks_before`.
std::vector<std::string> beam_replace(std::span<const std::string> left,
                                      std::span<const std::string> right, const MaskedLm& lm,
                                      const CondBertConfig& config, const ToxicityLexicon& lexicon);

/// Masks are filled left to right; each replacement becomes context for the
/// masks after it. The right context of a mask stops at the next mask.
Sentence detoxify_condbert(const Sentence& x, const MaskedLm& lm, const ToxicityLexicon& lexicon,
                           const CondBertConfig& config);

class CondBertMethod final : public Detoxifier {
public:
    CondBertMethod(const MaskedLm& lm, const ToxicityLexicon& lexicon, CondBertConfig config);
    std::string name() const override { return "condBERT"; }
    Sentence transform(const Sentence& x) const override;

private:
    const MaskedLm& lm_;
    const ToxicityLexicon& lexicon_;
    CondBertConfig config_;
};

}  // namespace detox
