#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "detox/baselines.hpp"
#include "detox/data_io.hpp"
#include "detox/ngram_lm.hpp"
#include "detox/text.hpp"

namespace detox {

struct PromptTemplate {
    std::string paraphrase_prefix = "Перефразируй";
    std::string separator = ">>>";
};

/// Throws DataError if the separator is empty or occurs in any pair text.
void validate(const PromptTemplate& tmpl, const ParallelCorpus& pairs = {});

/// `{prefix}\n{x.raw} {sep}`
std::string build_zero_shot(const Sentence& x, const PromptTemplate& tmpl = {});

/// The first k pairs as `src {sep} tgt` lines, each newline-terminated,
/// followed by the zero-shot block for x. Throws DataError if k > |pairs|.
std::string build_few_shot(const ParallelCorpus& pairs, const Sentence& x, std::size_t k,
                           const PromptTemplate& tmpl = {});

/// One `src {sep} tgt` record per pair, corpus order.
std::vector<std::string> build_finetune_records(const ParallelCorpus& pairs,
                                                const PromptTemplate& tmpl = {});

/// Text after the last separator (whole string if none), leading whitespace
/// trimmed, cut at the first newline, trailing whitespace trimmed.
Sentence parse_generation(std::string_view output, const PromptTemplate& tmpl = {});

enum class PromptMode { zero_shot, few_shot, finetuned_sim };

struct PromptOptions {
    PromptMode mode = PromptMode::zero_shot;
    GenerationParams params;
    PromptTemplate tmpl;
    /// Number of pairs shown in few-shot mode.
    std::size_t shots = 3;
    LmStyle style = LmStyle::any;
};

/// Build prompt → tokenize (case-folded) → generate → parse. `pairs` is
/// required in few-shot mode. In `finetuned_sim` mode the prompt has the
/// zero-shot shape and `lm` is expected to have been trained on
/// `build_finetune_records` output.
Sentence detoxify_prompted(const Sentence& x, const GenerativeLm& lm, const PromptOptions& options,
                           const ParallelCorpus* pairs = nullptr);

/// Language model trained on the fine-tune records (all counted as neutral,
/// so the pooled table equals the neutral one).
NgramLm train_finetune_lm(const ParallelCorpus& pairs, std::size_t order = 3, double alpha = 0.1,
                          const PromptTemplate& tmpl = {});

class PromptMethod final : public Detoxifier {
public:
    PromptMethod(const GenerativeLm& lm, PromptOptions options, const ParallelCorpus* pairs = nullptr);
    std::string name() const override;
    Sentence transform(const Sentence& x) const override;

private:
    const GenerativeLm& lm_;
    PromptOptions options_;
    const ParallelCorpus* pairs_;
};

}  // namespace detox
