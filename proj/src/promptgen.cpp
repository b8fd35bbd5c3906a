#include "detox/promptgen.hpp"

#include "detox/error.hpp"

namespace detox {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim_left(std::string_view s) {
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    return s;
}

std::string_view trim_right(std::string_view s) {
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

}  // namespace

void validate(const PromptTemplate& tmpl, const ParallelCorpus& pairs) {
    if (tmpl.separator.empty()) throw DataError("prompt separator must not be empty");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].source.find(tmpl.separator) != std::string::npos ||
            pairs[i].target.find(tmpl.separator) != std::string::npos)
            throw DataError("parallel pair " + std::to_string(i + 1) + " contains the separator '" +
                            tmpl.separator + "'");
    }
}

std::string build_zero_shot(const Sentence& x, const PromptTemplate& tmpl) {
    return tmpl.paraphrase_prefix + "\n" + x.raw + " " + tmpl.separator;
}

std::string build_few_shot(const ParallelCorpus& pairs, const Sentence& x, std::size_t k,
                           const PromptTemplate& tmpl) {
    if (k > pairs.size())
        throw DataError("few-shot k = " + std::to_string(k) + " exceeds the " +
                        std::to_string(pairs.size()) + " available pairs");
    std::string out;
    for (std::size_t i = 0; i < k; ++i)
        out += pairs[i].source + " " + tmpl.separator + " " + pairs[i].target + "\n";
    return out + build_zero_shot(x, tmpl);
}

std::vector<std::string> build_finetune_records(const ParallelCorpus& pairs,
                                                const PromptTemplate& tmpl) {
    std::vector<std::string> records;
    records.reserve(pairs.size());
    for (const auto& p : pairs) records.push_back(p.source + " " + tmpl.separator + " " + p.target);
    return records;
}

Sentence parse_generation(std::string_view output, const PromptTemplate& tmpl) {
    std::string_view tail = output;
    if (!tmpl.separator.empty()) {
        if (const auto pos = output.rfind(tmpl.separator); pos != std::string_view::npos)
            tail = output.substr(pos + tmpl.separator.size());
    }
    tail = trim_left(tail);
    if (const auto nl = tail.find('\n'); nl != std::string_view::npos) tail = tail.substr(0, nl);
    return tokenize(trim_right(tail));
}

Sentence detoxify_prompted(const Sentence& x, const GenerativeLm& lm, const PromptOptions& options,
                           const ParallelCorpus* pairs) {
    std::string prompt;
    switch (options.mode) {
        case PromptMode::few_shot:
            if (!pairs) throw DataError("few-shot prompting requires a parallel corpus");
            prompt = build_few_shot(*pairs, x, options.shots, options.tmpl);
            break;
        case PromptMode::zero_shot:
        case PromptMode::finetuned_sim:
            prompt = build_zero_shot(x, options.tmpl);
            break;
    }
    const auto prompt_tokens = folded_tokens(tokenize(prompt));
    const auto continuation = generate(lm, prompt_tokens, options.params, options.style);
    return parse_generation(prompt + " " + join(continuation), options.tmpl);
}

NgramLm train_finetune_lm(const ParallelCorpus& pairs, std::size_t order, double alpha,
                          const PromptTemplate& tmpl) {
    validate(tmpl, pairs);
    LabeledCorpus corpus;
    for (auto& record : build_finetune_records(pairs, tmpl)) corpus.add(std::move(record), StyleLabel::neutral);
    return NgramLm::train(corpus, order, alpha);
}

PromptMethod::PromptMethod(const GenerativeLm& lm, PromptOptions options, const ParallelCorpus* pairs)
    : lm_(lm), options_(std::move(options)), pairs_(pairs) {
    validate(options_.params);
    if (options_.mode == PromptMode::few_shot) {
        if (!pairs_) throw DataError("few-shot prompting requires a parallel corpus");
        validate(options_.tmpl, *pairs_);
        if (options_.shots > pairs_->size())
            throw DataError("few-shot k exceeds the number of parallel pairs");
    } else {
        validate(options_.tmpl);
    }
}

std::string PromptMethod::name() const {
    switch (options_.mode) {
        case PromptMode::zero_shot:
            return "detoxGPT zero-shot";
        case PromptMode::few_shot:
            return "detoxGPT few-shot";
        case PromptMode::finetuned_sim:
            break;
    }
    return "detoxGPT fine-tuned";
}

Sentence PromptMethod::transform(const Sentence& x) const {
    return detoxify_prompted(x, lm_, options_, pairs_);
}

}  // namespace detox
