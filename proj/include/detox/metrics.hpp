#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "detox/baselines.hpp"
#include "detox/embeddings.hpp"
#include "detox/ngram_lm.hpp"
#include "detox/toxicity.hpp"

namespace detox {

enum class OverlapMode { set, multiset };

/// |x ∩ y| / |x ∪ y| over non-empty normalized tokens. Both empty → 1,
/// exactly one empty → 0.
double word_overlap(const Sentence& x, const Sentence& y, OverlapMode mode = OverlapMode::set);

/// Sentence BLEU over case-folded tokens: geometric mean of clipped n-gram
/// precisions for n = 1..4 times min(1, exp(1 − |ref|/|hyp|)). A zero match
/// count for n ≥ 2 is smoothed to 1/(total+1); a zero unigram precision or an
/// empty hypothesis gives 0.
double bleu(const Sentence& reference, const Sentence& hypothesis);

/// Cosine of mean-pooled sentence vectors; 0 if either side has none.
double content_similarity(const Sentence& x, const Sentence& y, const EmbeddingTable& table);

/// Fraction of outputs the classifier puts below 0.5. Throws DataError on an
/// empty list.
double sta(std::span<const Sentence> outputs, const ToxicityModel& classifier);

/// exp(−Σ log_prob / Σ count) pooled over outputs. Throws DataError on an
/// empty list or an empty sentence.
double corpus_ppl(std::span<const Sentence> outputs, const ScoringLm& lm);

/// (max(STA,0)·max(CS,0)·max(1/PPL,0))^{1/3}. Throws DataError if ppl ≤ 0.
double gm(double sta, double cs, double ppl);

struct PairScores {
    double sta_neutral = 0.0;  // 1 if classified neutral
    double wo = 0.0;
    double bleu = 0.0;
    double cs = 0.0;
    double log_prob_sum = 0.0;
    std::size_t token_count = 1;
};

struct EvalComponents {
    const ToxicityModel& classifier;
    const EmbeddingTable& embeddings;
    const ScoringLm& lm;
    OverlapMode overlap = OverlapMode::set;
};

/// An empty output is scored on the end marker alone (token_count = 1).
PairScores score_pair(const Sentence& input, const Sentence& output, const EvalComponents& parts);

struct CorpusScores {
    double sta = 0.0;
    double cs = 0.0;
    double wo = 0.0;
    double bleu = 0.0;
    double ppl = 0.0;
};

CorpusScores aggregate(std::span<const PairScores> pairs);

struct BootstrapResult {
    double mean = 0.0;
    double std = 0.0;
};

/// Resample r (0-based) draws n pair indices with replacement from
/// SplitMix64(s_r), where s_r is the r-th output of SplitMix64(seed). GM is
/// recomputed from the resample's pooled STA, CS and PPL. Returns the mean
/// and population standard deviation (Welford) of the resampled GMs.
BootstrapResult bootstrap_gm(std::span<const PairScores> pairs, std::size_t resamples,
                             std::uint64_t seed);

struct EvalReport {
    std::string method;
    double sta = 0.0;
    double cs = 0.0;
    double wo = 0.0;
    double bleu = 0.0;
    double ppl = 0.0;
    double gm = 0.0;
    double gm_std = 0.0;
    std::size_t n = 0;
};

struct EvalOptions {
    std::size_t resamples = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

EvalReport evaluate_outputs(std::string method, std::span<const Sentence> inputs,
                            std::span<const Sentence> outputs, const EvalComponents& parts,
                            const EvalOptions& options = {});

/// Runs the method over every entry of `test` (a toxic-only split in the
/// standard setup) and evaluates.
EvalReport evaluate_method(const Detoxifier& method, const LabeledCorpus& test,
                           const EvalComponents& parts, const EvalOptions& options = {});

/// Aligned table in the column order Method STA CS WO BLEU PPL GM.
void write_table(std::ostream& out, std::span<const EvalReport> reports);
/// One `key=value` record per method.
void write_records(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace detox
