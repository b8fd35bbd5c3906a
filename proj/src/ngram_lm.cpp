#include "detox/ngram_lm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "detox/error.hpp"

namespace detox {

std::string_view to_string(LmStyle style) noexcept {
    switch (style) {
        case LmStyle::toxic:
            return "toxic";
        case LmStyle::neutral:
            return "neutral";
        case LmStyle::any:
            break;
    }
    return "any";
}

std::optional<LmStyle> parse_lm_style(std::string_view text) noexcept {
    if (text == "toxic") return LmStyle::toxic;
    if (text == "neutral") return LmStyle::neutral;
    if (text == "any") return LmStyle::any;
    return std::nullopt;
}

LmStyle to_lm_style(StyleLabel label) noexcept {
    return label == StyleLabel::toxic ? LmStyle::toxic : LmStyle::neutral;
}

// --- CandidateDistribution ---------------------------------------------------

CandidateDistribution::CandidateDistribution(std::vector<Candidate> items) {
    std::erase_if(items, [](const Candidate& c) { return !(c.prob > 0.0); });
    std::sort(items.begin(), items.end(), [](const Candidate& a, const Candidate& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.word < b.word;
    });
    items_ = std::move(items);
}

double CandidateDistribution::total() const noexcept {
    double s = 0.0;
    for (const auto& c : items_) s += c.prob;
    return s;
}

double CandidateDistribution::probability(std::string_view word) const noexcept {
    for (const auto& c : items_) {
        if (c.word == word) return c.prob;
    }
    return 0.0;
}

CandidateDistribution CandidateDistribution::normalized() const {
    const double z = total();
    if (!(z > 0.0) || !std::isfinite(z))
        throw NumericError("candidate distribution has no probability mass");
    std::vector<Candidate> items = items_;
    for (auto& c : items) c.prob /= z;
    return CandidateDistribution(std::move(items));
}

// --- NgramLm -----------------------------------------------------------------

std::size_t NgramLm::KeyHash::operator()(const Key& key) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (Id id : key) {
        h ^= id;
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
}

namespace {

std::size_t style_slot(LmStyle style) noexcept { return static_cast<std::size_t>(style); }

}  // namespace

const NgramLm::CountTable& NgramLm::table(LmStyle style) const noexcept {
    return tables_[style_slot(style)];
}

void NgramLm::add_ngram(LmStyle style, Key key, std::uint64_t count) {
    auto& t = tables_[style_slot(style)];
    Key context(key.begin(), key.end() - 1);
    t.contexts[std::move(context)] += count;
    t.ngrams[std::move(key)] += count;
}

NgramLm NgramLm::train(const LabeledCorpus& corpus, std::size_t order, double alpha) {
    if (order < 1) throw DataError("n-gram order must be at least 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DataError("smoothing alpha must be positive");
    if (corpus.empty()) throw DataError("cannot train a language model on an empty corpus");

    std::vector<std::vector<std::string>> sentences;
    sentences.reserve(corpus.size());
    std::set<std::string> words;
    for (const auto& e : corpus.entries()) {
        sentences.push_back(folded_tokens(tokenize(e.text)));
        words.insert(sentences.back().begin(), sentences.back().end());
    }

    NgramLm lm(order, alpha);
    lm.vocab_.assign(words.begin(), words.end());
    for (std::size_t i = 0; i < lm.vocab_.size(); ++i) lm.index_.emplace(lm.vocab_[i], static_cast<Id>(i));

    for (std::size_t s = 0; s < sentences.size(); ++s) {
        Key seq(order - 1, lm.start_id());
        for (const auto& w : sentences[s]) seq.push_back(lm.index_.at(w));
        seq.push_back(lm.end_id());
        const auto style = to_lm_style(corpus.entries()[s].label);
        for (std::size_t i = order - 1; i < seq.size(); ++i) {
            Key key(seq.begin() + static_cast<std::ptrdiff_t>(i + 1 - order),
                    seq.begin() + static_cast<std::ptrdiff_t>(i + 1));
            lm.add_ngram(style, key, 1);
            lm.add_ngram(LmStyle::any, std::move(key), 1);
        }
    }
    return lm;
}

std::optional<NgramLm::Id> NgramLm::id(std::string_view token) const {
    if (token == kEndToken) return end_id();
    const auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

NgramLm::Key NgramLm::context_of(const Key& history) const {
    const std::size_t len = order_ - 1;
    Key ctx(len, start_id());
    const std::size_t take = std::min(len, history.size());
    std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(),
              ctx.end() - static_cast<std::ptrdiff_t>(take));
    return ctx;
}

NgramLm::Key NgramLm::context_of(std::span<const std::string> history) const {
    const std::size_t take = std::min(order_ - 1, history.size());
    Key ids;
    ids.reserve(take);
    for (const auto& w : history.subspan(history.size() - take)) {
        const auto i = id(w);
        ids.push_back(i && *i != end_id() ? *i : kUnknown);
    }
    return context_of(ids);
}

double NgramLm::prob(const CountTable& t, const Key& context, Id word) const {
    std::uint64_t c = 0;
    std::uint64_t cc = 0;
    if (const auto it = t.contexts.find(context); it != t.contexts.end()) cc = it->second;
    if (cc > 0 && word != kUnknown) {
        Key key = context;
        key.push_back(word);
        if (const auto it = t.ngrams.find(key); it != t.ngrams.end()) c = it->second;
    }
    return (static_cast<double>(c) + alpha_) /
           (static_cast<double>(cc) + alpha_ * static_cast<double>(outcome_count()));
}

double NgramLm::conditional(std::span<const std::string> history, std::string_view word,
                            LmStyle style) const {
    const auto w = id(word);
    return prob(table(style), context_of(history), w ? *w : kUnknown);
}

CandidateDistribution NgramLm::masked_fill(std::span<const std::string> left,
                                           std::span<const std::string> right,
                                           LmStyle style) const {
    const auto& t = table(style);
    const Key left_ctx = context_of(left);
    std::optional<Id> right_id;
    if (!right.empty()) {
        const auto r = id(right.front());
        right_id = r ? *r : kUnknown;
    }
    std::vector<Candidate> items;
    items.reserve(vocab_.size());
    double z = 0.0;
    for (Id w = 0; w < static_cast<Id>(vocab_.size()); ++w) {
        double p = prob(t, left_ctx, w);
        if (right_id) {
            Key hist = left_ctx;
            hist.push_back(w);
            p *= prob(t, context_of(hist), *right_id);
        }
        items.push_back({vocab_[w], p});
        z += p;
    }
    for (auto& c : items) c.prob /= z;
    return CandidateDistribution(std::move(items));
}

SequenceScore NgramLm::score(std::span<const std::string> tokens) const {
    const auto& t = table(LmStyle::any);
    Key ids;
    ids.reserve(tokens.size() + 1);
    for (const auto& w : tokens) {
        const auto i = id(w);
        ids.push_back(i && *i != end_id() ? *i : kUnknown);
    }
    ids.push_back(end_id());
    SequenceScore out;
    Key history;
    for (Id w : ids) {
        out.log_prob += std::log(prob(t, context_of(history), w));
        history.push_back(w);
        ++out.count;
    }
    return out;
}

CandidateDistribution NgramLm::next_distribution(std::span<const std::string> history,
                                                 LmStyle style) const {
    const auto& t = table(style);
    const Key ctx = context_of(history);
    std::vector<Candidate> items;
    items.reserve(vocab_.size() + 1);
    for (Id w = 0; w <= end_id(); ++w) {
        items.push_back({w == end_id() ? std::string(kEndToken) : vocab_[w], prob(t, ctx, w)});
    }
    return CandidateDistribution(std::move(items));
}

void NgramLm::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.precision(17);
    out << "#detox-ngram\tv1\t" << order_ << '\t' << alpha_ << '\n';
    out << "#vocab";
    for (const auto& w : vocab_) out << '\t' << w;
    out << '\n';
    auto name = [&](Id i) -> std::string_view {
        if (i == end_id()) return kEndToken;
        if (i == start_id()) return kStartToken;
        return vocab_[i];
    };
    for (auto style : {LmStyle::toxic, LmStyle::neutral, LmStyle::any}) {
        std::map<Key, std::uint64_t> sorted(table(style).ngrams.begin(), table(style).ngrams.end());
        for (const auto& [key, count] : sorted) {
            out << to_string(style) << '\t';
            for (std::size_t k = 0; k < key.size(); ++k) out << (k ? " " : "") << name(key[k]);
            out << '\t' << count << '\n';
        }
    }
    if (!out) throw IoError("write failed: " + path.string());
}

NgramLm NgramLm::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    const std::string ctx = path.string();
    std::string line;
    if (!std::getline(in, line)) throw DataError(ctx + ": empty language model file");
    std::istringstream header(line);
    std::string magic, version;
    std::size_t order = 0;
    double alpha = 0.0;
    if (!(header >> magic >> version >> order >> alpha) || magic != "#detox-ngram" ||
        version != "v1" || order < 1 || !(alpha > 0.0))
        throw DataError(ctx + ": not a #detox-ngram v1 file");
    NgramLm lm(order, alpha);
    if (!std::getline(in, line) || line.rfind("#vocab", 0) != 0)
        throw DataError(ctx + ": line 2 must be the #vocab row");
    {
        std::string_view rest = std::string_view(line).substr(6);
        while (!rest.empty()) {
            rest.remove_prefix(1);  // TAB
            const auto tab = rest.find('\t');
            lm.vocab_.emplace_back(rest.substr(0, tab));
            rest = tab == std::string_view::npos ? std::string_view{} : rest.substr(tab);
        }
        for (std::size_t i = 0; i < lm.vocab_.size(); ++i) {
            if (!lm.index_.emplace(lm.vocab_[i], static_cast<Id>(i)).second)
                throw DataError(ctx + ": duplicate vocabulary entry '" + lm.vocab_[i] + "'");
        }
    }
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = ctx + ": line " + std::to_string(lineno);
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) throw DataError(where + ": expected style<TAB>ngram<TAB>count");
        const auto style = parse_lm_style(std::string_view(line).substr(0, t1));
        if (!style) throw DataError(where + ": unknown style");
        std::istringstream grams(line.substr(t1 + 1, t2 - t1 - 1));
        Key key;
        std::string tok;
        while (grams >> tok) {
            if (tok == kStartToken) {
                key.push_back(lm.start_id());
            } else if (const auto i = lm.id(tok)) {
                key.push_back(*i);
            } else {
                throw DataError(where + ": token '" + tok + "' not in vocabulary");
            }
        }
        if (key.size() != order) throw DataError(where + ": n-gram length differs from order");
        std::uint64_t count = 0;
        const std::string_view num = std::string_view(line).substr(t2 + 1);
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), count);
        if (ec != std::errc{} || ptr != num.data() + num.size()) throw DataError(where + ": bad count");
        lm.add_ngram(*style, std::move(key), count);
    }
    return lm;
}

// --- scoring and sampling ----------------------------------------------------

double perplexity(const ScoringLm& lm, const Sentence& sentence) {
    if (sentence.tokens.empty()) throw DataError("perplexity is undefined for an empty sentence");
    const auto s = lm.score(folded_tokens(sentence));
    return std::exp(-s.log_prob / static_cast<double>(s.count));
}

void validate(const GenerationParams& params) {
    if (params.top_k < 1) throw DataError("top_k must be at least 1");
    if (!(params.top_p > 0.0 && params.top_p <= 1.0)) throw DataError("top_p must lie in (0, 1]");
    if (!(params.temperature > 0.0)) throw DataError("temperature must be positive");
}

CandidateDistribution apply_temperature(const CandidateDistribution& dist, double temperature) {
    if (!(temperature > 0.0)) throw DataError("temperature must be positive");
    if (dist.empty()) return dist;
    // Log domain: p^{1/t} / Σ p^{1/t} = exp((ln p − ln p_max)/t) / Σ(·).
    const double log_max = std::log(dist.argmax().prob);
    std::vector<Candidate> items;
    items.reserve(dist.size());
    for (const auto& c : dist.items()) {
        const double scaled = std::isinf(temperature) ? 0.0 : (std::log(c.prob) - log_max) / temperature;
        items.push_back({c.word, std::exp(scaled)});
    }
    return CandidateDistribution(std::move(items)).normalized();
}

CandidateDistribution filter_distribution(const CandidateDistribution& dist,
                                          const GenerationParams& params) {
    validate(params);
    if (dist.empty()) throw DataError("cannot sample from an empty distribution");
    const auto tempered = apply_temperature(dist, params.temperature);
    std::size_t nucleus = 0;
    double cumulative = 0.0;
    while (nucleus < tempered.size()) {
        cumulative += tempered[nucleus].prob;
        ++nucleus;
        if (cumulative >= params.top_p) break;
    }
    const std::size_t keep = std::min({params.top_k, nucleus, tempered.size()});
    std::vector<Candidate> items(tempered.items().begin(),
                                 tempered.items().begin() + static_cast<std::ptrdiff_t>(keep));
    return CandidateDistribution(std::move(items)).normalized();
}

std::string filtered_sample(const CandidateDistribution& dist, const GenerationParams& params,
                            SplitMix64& rng) {
    const auto filtered = filter_distribution(dist, params);
    const double u = rng.uniform();
    double cumulative = 0.0;
    for (const auto& c : filtered.items()) {
        cumulative += c.prob;
        if (u < cumulative) return c.word;
    }
    return filtered.items().back().word;
}

std::string filtered_sample(const CandidateDistribution& dist, const GenerationParams& params) {
    SplitMix64 rng(params.seed);
    return filtered_sample(dist, params, rng);
}

std::vector<std::string> generate(const GenerativeLm& lm, std::span<const std::string> prompt,
                                  const GenerationParams& params, LmStyle style) {
    validate(params);
    SplitMix64 rng(params.seed);
    std::vector<std::string> history(prompt.begin(), prompt.end());
    std::vector<std::string> out;
    while (out.size() < params.max_tokens) {
        auto word = filtered_sample(lm.next_distribution(history, style), params, rng);
        if (word == kEndToken) break;
        history.push_back(word);
        out.push_back(std::move(word));
    }
    return out;
}

}  // namespace detox
