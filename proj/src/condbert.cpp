#include "detox/condbert.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "detox/error.hpp"

namespace detox {

void validate(const CondBertConfig& config) {
    if (!(config.penalty >= 0.0) || !std::isfinite(config.penalty))
        throw DataError("condBERT penalty must be a finite non-negative number");
    if (config.beam_width < 1) throw DataError("condBERT beam width must be at least 1");
    if (config.max_length < 1) throw DataError("condBERT max replacement length must be at least 1");
}

double harmonic_mean(std::span<const double> probs) {
    if (probs.empty()) return 0.0;
    double inv = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) return 0.0;
        inv += 1.0 / p;
    }
    return static_cast<double>(probs.size()) / inv;
}

BeamHypothesis BeamHypothesis::extended(std::string token, double prob) const {
    BeamHypothesis next = *this;
    next.tokens.push_back(std::move(token));
    next.probs.push_back(prob);
    next.score = harmonic_mean(next.probs);
    return next;
}

bool ranks_before(const BeamHypothesis& a, const BeamHypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
    return a.tokens < b.tokens;
}

std::vector<std::size_t> find_mask_positions(const Sentence& x, const ToxicityLexicon& lexicon) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < x.tokens.size(); ++i) {
        if (!x.tokens[i].norm.empty() && lexicon.contains(x.tokens[i].norm)) out.push_back(i);
    }
    return out;
}

CandidateDistribution penalized_distribution(const CandidateDistribution& dist,
                                             const ToxicityLexicon& lexicon, double penalty,
                                             bool hard_ban) {
    std::vector<Candidate> items;
    items.reserve(dist.size());
    for (const auto& c : dist.items()) {
        const auto w = lexicon.weight(normalize(c.word));
        if (!w) {
            items.push_back(c);
        } else if (!hard_ban) {
            items.push_back({c.word, c.prob * std::exp(-penalty * *w)});
        }
    }
    CandidateDistribution kept(std::move(items));
    if (kept.empty() || !(kept.total() > 0.0))
        throw DataError("toxicity penalty removed every candidate; the lexicon covers the vocabulary");
    return kept.normalized();
}

std::vector<std::string> beam_replace(std::span<const std::string> left,
                                      std::span<const std::string> right, const MaskedLm& lm,
                                      const CondBertConfig& config, const ToxicityLexicon& lexicon) {
    validate(config);
    std::vector<BeamHypothesis> beam{BeamHypothesis{}};
    std::optional<BeamHypothesis> best;
    std::vector<std::string> context(left.begin(), left.end());

    for (std::size_t step = 0; step < config.max_length && !beam.empty(); ++step) {
        std::vector<BeamHypothesis> expanded;
        for (const auto& hyp : beam) {
            context.resize(left.size());
            context.insert(context.end(), hyp.tokens.begin(), hyp.tokens.end());
            const auto dist = penalized_distribution(lm.masked_fill(context, right, config.style),
                                                     lexicon, config.penalty, config.hard_ban);
            const std::size_t take = std::min(config.beam_width, dist.size());
            for (std::size_t k = 0; k < take; ++k) expanded.push_back(hyp.extended(dist[k].word, dist[k].prob));
        }
        for (const auto& h : expanded) {
            if (!best || ranks_before(h, *best)) best = h;
        }
        std::sort(expanded.begin(), expanded.end(), ranks_before);
        if (expanded.size() > config.beam_width) expanded.resize(config.beam_width);
        beam = std::move(expanded);
    }
    return best ? best->tokens : std::vector<std::string>{};
}

Sentence detoxify_condbert(const Sentence& x, const MaskedLm& lm, const ToxicityLexicon& lexicon,
                           const CondBertConfig& config) {
    const auto positions = find_mask_positions(x, lexicon);
    if (positions.empty()) return x;
    std::vector<bool> masked(x.tokens.size(), false);
    for (auto p : positions) masked[p] = true;
    const auto folded = folded_tokens(x);

    std::vector<std::string> out_surface;
    std::vector<std::string> out_folded;
    for (std::size_t i = 0; i < x.tokens.size(); ++i) {
        if (!masked[i]) {
            out_surface.push_back(x.tokens[i].surface);
            out_folded.push_back(folded[i]);
            continue;
        }
        std::size_t stop = i + 1;
        while (stop < x.tokens.size() && !masked[stop]) ++stop;
        const std::span<const std::string> right(folded.data() + i + 1, stop - i - 1);
        for (auto& w : beam_replace(out_folded, right, lm, config, lexicon)) {
            out_surface.push_back(w);
            out_folded.push_back(std::move(w));
        }
    }
    return from_surfaces(out_surface);
}

CondBertMethod::CondBertMethod(const MaskedLm& lm, const ToxicityLexicon& lexicon,
                               CondBertConfig config)
    : lm_(lm), lexicon_(lexicon), config_(config) {
    validate(config_);
}

Sentence CondBertMethod::transform(const Sentence& x) const {
    return detoxify_condbert(x, lm_, lexicon_, config_);
}

}  // namespace detox
