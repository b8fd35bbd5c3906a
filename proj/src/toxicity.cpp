#include "detox/toxicity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "detox/error.hpp"

namespace detox {

namespace {

constexpr std::string_view kModelMagic = "detox-logreg";
constexpr std::string_view kModelVersion = "v1";
constexpr std::string_view kBiasKey = "@bias";

double parse_double(std::string_view text, const std::string& context) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw DataError(context + ": not a number: '" +
                                                          std::string(text) + "'");
    return value;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot(const SparseVector& x, std::span<const double> w) {
    double s = 0.0;
    for (const auto& [i, c] : x) s += w[i] * c;
    return s;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second)
            throw DataError("duplicate vocabulary word: " + words_[i]);
    }
}

Vocabulary Vocabulary::build(const LabeledCorpus& corpus, std::size_t min_count) {
    std::map<std::string, std::size_t> counts;
    for (const auto& e : corpus.entries()) {
        for (auto& w : norm_tokens(tokenize(e.text))) ++counts[std::move(w)];
    }
    std::vector<std::string> words;
    for (auto& [w, c] : counts) {
        if (c >= std::max<std::size_t>(min_count, 1)) words.push_back(w);
    }
    return Vocabulary(std::move(words));
}

std::optional<std::size_t> Vocabulary::index(std::string_view word) const {
    const auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

SparseVector featurize(const Sentence& sentence, const Vocabulary& vocab) {
    std::map<std::size_t, double> counts;
    for (const auto& t : sentence.tokens) {
        if (t.norm.empty()) continue;
        if (auto i = vocab.index(t.norm)) counts[*i] += 1.0;
    }
    return {counts.begin(), counts.end()};
}

ToxicityModel::ToxicityModel(Vocabulary vocab, std::vector<double> weights, double bias)
    : vocab_(std::move(vocab)), weights_(std::move(weights)), bias_(bias) {
    if (weights_.size() != vocab_.size())
        throw DataError("weight vector length does not match vocabulary size");
    if (!std::isfinite(bias_) ||
        !std::all_of(weights_.begin(), weights_.end(), [](double w) { return std::isfinite(w); }))
        throw NumericError("toxicity model has non-finite parameters");
}

std::optional<double> ToxicityModel::weight(std::string_view word) const {
    if (auto i = vocab_.index(word)) return weights_[*i];
    return std::nullopt;
}

double ToxicityModel::logit(const Sentence& sentence) const {
    return bias_ + dot(featurize(sentence, vocab_), weights_);
}

void ToxicityModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << kModelMagic << '\t' << kModelVersion << '\t' << vocab_.size() << '\n';
    out << kBiasKey << '\t' << format_double(bias_) << '\n';
    for (std::size_t i = 0; i < vocab_.size(); ++i)
        out << vocab_.word(i) << '\t' << format_double(weights_[i]) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

ToxicityModel ToxicityModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    const std::string ctx = path.string();
    std::string line;
    if (!std::getline(in, line)) throw DataError(ctx + ": empty model file");
    std::istringstream header(line);
    std::string magic, version;
    std::size_t declared = 0;
    if (!(header >> magic >> version >> declared) || magic != kModelMagic ||
        version != kModelVersion)
        throw DataError(ctx + ": not a " + std::string(kModelMagic) + " " +
                        std::string(kModelVersion) + " file");
    if (!std::getline(in, line) || line.rfind(std::string(kBiasKey) + "\t", 0) != 0)
        throw DataError(ctx + ": line 2 must be the bias row");
    const double bias = parse_double(std::string_view(line).substr(kBiasKey.size() + 1), ctx);

    std::vector<std::string> words;
    std::vector<double> weights;
    std::size_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw DataError(ctx + ": line " + std::to_string(lineno) + ": expected word<TAB>weight");
        words.push_back(line.substr(0, tab));
        weights.push_back(parse_double(std::string_view(line).substr(tab + 1),
                                       ctx + ": line " + std::to_string(lineno)));
    }
    if (words.size() != declared)
        throw DataError(ctx + ": header declares " + std::to_string(declared) + " words, found " +
                        std::to_string(words.size()));
    return ToxicityModel(Vocabulary(std::move(words)), std::move(weights), bias);
}

Dataset make_dataset(const LabeledCorpus& corpus, const Vocabulary& vocab) {
    Dataset data;
    data.features.reserve(corpus.size());
    data.labels.reserve(corpus.size());
    for (const auto& e : corpus.entries()) {
        data.features.push_back(featurize(tokenize(e.text), vocab));
        data.labels.push_back(e.label == StyleLabel::toxic ? 1.0 : 0.0);
    }
    return data;
}

LossGradient loss_and_gradient(const Dataset& data, std::span<const double> weights, double bias,
                               double l2) {
    LossGradient out;
    out.weight_grad.assign(weights.size(), 0.0);
    const auto n = static_cast<double>(data.labels.size());
    for (std::size_t k = 0; k < data.labels.size(); ++k) {
        const auto& x = data.features[k];
        const double y = data.labels[k];
        const double z = bias + dot(x, weights);
        // log1p(exp(·)) overflows to +inf once |z| passes ~709, which is how
        // a divergent learning rate surfaces.
        out.loss += y > 0.5 ? std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        const double r = sigmoid(z) - y;
        for (const auto& [i, c] : x) out.weight_grad[i] += r * c;
        out.bias_grad += r;
    }
    out.loss /= n;
    out.bias_grad /= n;
    double sq = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        out.weight_grad[i] = out.weight_grad[i] / n + l2 * weights[i];
        sq += weights[i] * weights[i];
    }
    out.loss += 0.5 * l2 * sq;
    return out;
}

ToxicityModel train(const LabeledCorpus& corpus, const TrainConfig& config) {
    if (!(config.learning_rate > 0.0)) throw DataError("learning_rate must be positive");
    if (!(config.l2 >= 0.0)) throw DataError("l2 must be non-negative");
    if (corpus.count(StyleLabel::toxic) == 0 || corpus.count(StyleLabel::neutral) == 0)
        throw DataError("training corpus must contain both toxic and neutral entries");

    auto vocab = Vocabulary::build(corpus, config.min_count);
    const auto data = make_dataset(corpus, vocab);
    std::vector<double> w(vocab.size(), 0.0);
    double b = 0.0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto g = loss_and_gradient(data, w, b, config.l2);
        if (!std::isfinite(g.loss))
            throw NumericError("logistic regression loss became non-finite at epoch " +
                               std::to_string(epoch) + "; lower the learning rate");
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * g.weight_grad[i];
        b -= config.learning_rate * g.bias_grad;
    }
    const auto final_loss = loss_and_gradient(data, w, b, config.l2).loss;
    if (!std::isfinite(final_loss))
        throw NumericError("logistic regression loss became non-finite; lower the learning rate");
    return ToxicityModel(std::move(vocab), std::move(w), b);
}

double predict_proba(const ToxicityModel& model, const Sentence& sentence) {
    return sigmoid(model.logit(sentence));
}

bool is_toxic(const ToxicityModel& model, const Sentence& sentence) {
    return predict_proba(model, sentence) >= 0.5;
}

double f1(const ToxicityModel& model, const LabeledCorpus& corpus) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& e : corpus.entries()) {
        const bool predicted = is_toxic(model, tokenize(e.text));
        const bool actual = e.label == StyleLabel::toxic;
        if (predicted && actual) ++tp;
        if (predicted && !actual) ++fp;
        if (!predicted && actual) ++fn;
    }
    const auto denom = 2 * tp + fp + fn;
    if (denom == 0) return 0.0;
    return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

ToxicityLexicon::ToxicityLexicon(WordWeights words, double threshold)
    : words_(std::move(words)), threshold_(threshold) {}

bool ToxicityLexicon::contains(std::string_view norm) const { return words_.contains(norm); }

std::optional<double> ToxicityLexicon::weight(std::string_view norm) const {
    const auto it = words_.find(norm);
    if (it == words_.end()) return std::nullopt;
    return it->second;
}

void ToxicityLexicon::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    for (const auto& [w, v] : words_) out << w << '\t' << format_double(v) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

ToxicityLexicon ToxicityLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    WordWeights words;
    std::string line;
    std::size_t lineno = 0;
    double lowest = std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        const std::string ctx = path.string() + ": line " + std::to_string(lineno);
        // A bare word (manual list style) gets weight 1.
        const double v = tab == std::string::npos
                             ? 1.0
                             : parse_double(std::string_view(line).substr(tab + 1), ctx);
        auto w = normalize(std::string_view(line).substr(0, tab));
        if (w.empty()) throw DataError(ctx + ": empty lexicon word");
        words[std::move(w)] = v;
        lowest = std::min(lowest, v);
    }
    const double threshold = words.empty() ? std::numeric_limits<double>::infinity()
                                           : std::nextafter(lowest, -std::numeric_limits<double>::infinity());
    return ToxicityLexicon(std::move(words), threshold);
}

ToxicityLexicon ToxicityLexicon::from_words(std::span<const std::string> words, double weight) {
    WordWeights map;
    for (const auto& w : words) {
        auto n = normalize(w);
        if (!n.empty()) map[std::move(n)] = weight;
    }
    return ToxicityLexicon(std::move(map), -std::numeric_limits<double>::infinity());
}

double default_threshold(const ToxicityModel& model, double fraction) {
    std::vector<double> sorted(model.weights().begin(), model.weights().end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size()))));
    if (k >= sorted.size()) return -std::numeric_limits<double>::infinity();
    return sorted[k];
}

ToxicityLexicon extract_lexicon(const ToxicityModel& model, double threshold,
                                std::span<const std::string> manual) {
    WordWeights words;
    const auto weights = model.weights();
    double max_weight = 0.0;
    if (!weights.empty()) max_weight = *std::max_element(weights.begin(), weights.end());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > threshold) words.emplace(model.vocabulary().word(i), weights[i]);
    }
    for (const auto& m : manual) {
        auto n = normalize(m);
        if (n.empty()) continue;
        auto [it, inserted] = words.emplace(std::move(n), max_weight);
        if (!inserted) it->second = std::max(it->second, max_weight);
    }
    return ToxicityLexicon(std::move(words), threshold);
}

}  // namespace detox
