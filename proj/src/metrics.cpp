#include "detox/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "detox/error.hpp"
#include "detox/rng.hpp"

namespace detox {

double word_overlap(const Sentence& x, const Sentence& y, OverlapMode mode) {
    const auto a = norm_tokens(x);
    const auto b = norm_tokens(y);
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    if (mode == OverlapMode::set) {
        const std::set<std::string> sa(a.begin(), a.end());
        const std::set<std::string> sb(b.begin(), b.end());
        std::size_t common = 0;
        for (const auto& w : sa) common += sb.count(w);
        return static_cast<double>(common) / static_cast<double>(sa.size() + sb.size() - common);
    }
    std::map<std::string, std::size_t> ca, cb;
    for (const auto& w : a) ++ca[w];
    for (const auto& w : b) ++cb[w];
    std::size_t inter = 0, uni = 0;
    for (const auto& [w, n] : ca) {
        const auto it = cb.find(w);
        const std::size_t m = it == cb.end() ? 0 : it->second;
        inter += std::min(n, m);
        uni += std::max(n, m);
    }
    for (const auto& [w, m] : cb) {
        if (!ca.contains(w)) uni += m;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
    std::map<Gram, std::size_t> out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
        ++out[Gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return out;
}

}  // namespace

double bleu(const Sentence& reference, const Sentence& hypothesis) {
    const auto ref = folded_tokens(reference);
    const auto hyp = folded_tokens(hypothesis);
    if (hyp.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto hyp_counts = ngram_counts(hyp, n);
        const auto ref_counts = ngram_counts(ref, n);
        std::size_t matches = 0;
        std::size_t total = 0;
        for (const auto& [gram, c] : hyp_counts) {
            total += c;
            if (const auto it = ref_counts.find(gram); it != ref_counts.end())
                matches += std::min(c, it->second);
        }
        double p = 0.0;
        if (matches > 0) {
            p = static_cast<double>(matches) / static_cast<double>(total);
        } else if (n == 1) {
            return 0.0;
        } else {
            p = 1.0 / static_cast<double>(total + 1);
        }
        log_sum += std::log(p);
    }
    const double ratio = static_cast<double>(ref.size()) / static_cast<double>(hyp.size());
    const double bp = std::min(1.0, std::exp(1.0 - ratio));
    return std::clamp(bp * std::exp(log_sum / 4.0), 0.0, 1.0);
}

double content_similarity(const Sentence& x, const Sentence& y, const EmbeddingTable& table) {
    const auto u = sentence_vector(x, table);
    const auto v = sentence_vector(y, table);
    if (!u || !v) return 0.0;
    return cosine(*u, *v);
}

double sta(std::span<const Sentence> outputs, const ToxicityModel& classifier) {
    if (outputs.empty()) throw DataError("STA is undefined for an empty output list");
    std::size_t neutral = 0;
    for (const auto& s : outputs) neutral += is_toxic(classifier, s) ? 0 : 1;
    return static_cast<double>(neutral) / static_cast<double>(outputs.size());
}

double corpus_ppl(std::span<const Sentence> outputs, const ScoringLm& lm) {
    if (outputs.empty()) throw DataError("corpus perplexity is undefined for an empty output list");
    double log_prob = 0.0;
    std::size_t count = 0;
    for (const auto& s : outputs) {
        if (s.tokens.empty()) throw DataError("corpus perplexity: empty output sentence");
        const auto score = lm.score(folded_tokens(s));
        log_prob += score.log_prob;
        count += score.count;
    }
    return std::exp(-log_prob / static_cast<double>(count));
}

double gm(double sta, double cs, double ppl) {
    if (!(ppl > 0.0)) throw DataError("GM requires a positive perplexity");
    const double product = std::max(sta, 0.0) * std::max(cs, 0.0) * std::max(1.0 / ppl, 0.0);
    return std::cbrt(product);
}

PairScores score_pair(const Sentence& input, const Sentence& output, const EvalComponents& parts) {
    PairScores s;
    s.sta_neutral = is_toxic(parts.classifier, output) ? 0.0 : 1.0;
    s.wo = word_overlap(input, output, parts.overlap);
    s.bleu = bleu(input, output);
    s.cs = content_similarity(input, output, parts.embeddings);
    const auto lp = parts.lm.score(folded_tokens(output));
    s.log_prob_sum = lp.log_prob;
    s.token_count = lp.count;
    return s;
}

CorpusScores aggregate(std::span<const PairScores> pairs) {
    if (pairs.empty()) throw DataError("cannot aggregate an empty score list");
    CorpusScores c;
    double log_prob = 0.0;
    std::size_t count = 0;
    for (const auto& p : pairs) {
        c.sta += p.sta_neutral;
        c.cs += p.cs;
        c.wo += p.wo;
        c.bleu += p.bleu;
        log_prob += p.log_prob_sum;
        count += p.token_count;
    }
    const auto n = static_cast<double>(pairs.size());
    c.sta /= n;
    c.cs /= n;
    c.wo /= n;
    c.bleu /= n;
    c.ppl = std::exp(-log_prob / static_cast<double>(count));
    if (!std::isfinite(c.ppl) || !(c.ppl > 0.0))
        throw NumericError("corpus perplexity is not a finite positive number");
    return c;
}

BootstrapResult bootstrap_gm(std::span<const PairScores> pairs, std::size_t resamples,
                             std::uint64_t seed) {
    if (pairs.empty()) throw DataError("bootstrap requires at least one scored pair");
    if (resamples < 2) throw DataError("bootstrap requires at least two resamples");
    SplitMix64 master(seed);
    std::vector<PairScores> sample(pairs.size());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t r = 0; r < resamples; ++r) {
        SplitMix64 rng(master.next());
        for (auto& s : sample) s = pairs[rng.index_below(pairs.size())];
        const auto c = aggregate(sample);
        const double g = gm(c.sta, c.cs, c.ppl);
        const double delta = g - mean;
        mean += delta / static_cast<double>(r + 1);
        m2 += delta * (g - mean);
    }
    return {mean, std::sqrt(m2 / static_cast<double>(resamples))};
}

EvalReport evaluate_outputs(std::string method, std::span<const Sentence> inputs,
                            std::span<const Sentence> outputs, const EvalComponents& parts,
                            const EvalOptions& options) {
    if (inputs.size() != outputs.size())
        throw AlignmentError("inputs have " + std::to_string(inputs.size()) + " sentences, outputs " +
                             std::to_string(outputs.size()));
    if (inputs.empty()) throw DataError("nothing to evaluate");
    std::vector<PairScores> scores;
    scores.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) scores.push_back(score_pair(inputs[i], outputs[i], parts));
    const auto c = aggregate(scores);
    EvalReport report;
    report.method = std::move(method);
    report.sta = c.sta;
    report.cs = c.cs;
    report.wo = c.wo;
    report.bleu = c.bleu;
    report.ppl = c.ppl;
    report.gm = gm(c.sta, c.cs, c.ppl);
    report.gm_std = options.resamples >= 2 ? bootstrap_gm(scores, options.resamples, options.seed).std : 0.0;
    report.n = inputs.size();
    return report;
}

EvalReport evaluate_method(const Detoxifier& method, const LabeledCorpus& test,
                           const EvalComponents& parts, const EvalOptions& options) {
    std::vector<Sentence> inputs;
    inputs.reserve(test.size());
    for (const auto& e : test.entries()) inputs.push_back(tokenize(e.text));
    const auto outputs = transform_batch(method, inputs, options.threads);
    return evaluate_outputs(method.name(), inputs, outputs, parts, options);
}

void write_table(std::ostream& out, std::span<const EvalReport> reports) {
    std::size_t width = 6;
    for (const auto& r : reports) width = std::max(width, r.method.size());
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %6s %6s %6s %6s %9s %6s %8s\n", static_cast<int>(width),
                  "Method", "STA", "CS", "WO", "BLEU", "PPL", "GM", "GM_std");
    out << buf;
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%-*s %6.2f %6.2f %6.2f %6.2f %9.2f %6.2f %8.4f\n",
                      static_cast<int>(width), r.method.c_str(), r.sta, r.cs, r.wo, r.bleu, r.ppl,
                      r.gm, r.gm_std);
        out << buf;
    }
}

void write_records(std::ostream& out, std::span<const EvalReport> reports) {
    const auto old_precision = out.precision(17);
    for (const auto& r : reports) {
        out << "method=" << r.method << "\tsta=" << r.sta << "\tcs=" << r.cs << "\two=" << r.wo
            << "\tbleu=" << r.bleu << "\tppl=" << r.ppl << "\tgm=" << r.gm << "\tgm_std=" << r.gm_std
            << "\tn=" << r.n << '\n';
    }
    out.precision(old_precision);
}

}  // namespace detox
