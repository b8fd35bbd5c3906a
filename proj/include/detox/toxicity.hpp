#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "detox/data_io.hpp"
#include "detox/text.hpp"

namespace detox {

/// Dense indices over normalized tokens, assigned in lexicographic order so
/// the same corpus always yields the same vocabulary.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> words);

    static Vocabulary build(const LabeledCorpus& corpus, std::size_t min_count);

    std::optional<std::size_t> index(std::string_view word) const;
    const std::string& word(std::size_t i) const { return words_.at(i); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// (index, count) pairs sorted by index.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

SparseVector featurize(const Sentence& sentence, const Vocabulary& vocab);

struct TrainConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 300;
    double l2 = 1e-4;
    /// Training is deterministic from zero initialization; the seed is kept
    /// for interface stability and recorded in the model header.
    std::uint64_t seed = 0;
    std::size_t min_count = 1;
};

class ToxicityModel {
public:
    ToxicityModel() = default;
    ToxicityModel(Vocabulary vocab, std::vector<double> weights, double bias);

    const Vocabulary& vocabulary() const noexcept { return vocab_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double bias() const noexcept { return bias_; }

    /// Weight of a normalized word, nullopt if out of vocabulary.
    std::optional<double> weight(std::string_view word) const;

    double logit(const Sentence& sentence) const;

    void save(const std::filesystem::path& path) const;
    static ToxicityModel load(const std::filesystem::path& path);

private:
    Vocabulary vocab_;
    std::vector<double> weights_;
    double bias_ = 0.0;
};

/// Featurized corpus, toxic = 1.
struct Dataset {
    std::vector<SparseVector> features;
    std::vector<double> labels;
};

Dataset make_dataset(const LabeledCorpus& corpus, const Vocabulary& vocab);

struct LossGradient {
    double loss = 0.0;
    std::vector<double> weight_grad;
    double bias_grad = 0.0;
};

/// Mean binary cross-entropy plus (l2/2)·‖w‖² (bias unpenalized) and its
/// exact gradient.
LossGradient loss_and_gradient(const Dataset& data, std::span<const double> weights, double bias,
                               double l2);

/// Full-batch gradient descent from zero. Throws DataError on a single-class
/// corpus and NumericError when the loss becomes non-finite.
ToxicityModel train(const LabeledCorpus& corpus, const TrainConfig& config);

double predict_proba(const ToxicityModel& model, const Sentence& sentence);
bool is_toxic(const ToxicityModel& model, const Sentence& sentence);

/// F1 of the toxic class at threshold 0.5; zero denominators give 0.
double f1(const ToxicityModel& model, const LabeledCorpus& corpus);

using WordWeights = std::map<std::string, double, std::less<>>;

class ToxicityLexicon {
public:
    ToxicityLexicon() = default;
    ToxicityLexicon(WordWeights words, double threshold);

    bool contains(std::string_view norm) const;
    std::optional<double> weight(std::string_view norm) const;
    const WordWeights& words() const noexcept { return words_; }
    double threshold() const noexcept { return threshold_; }
    std::size_t size() const noexcept { return words_.size(); }
    bool empty() const noexcept { return words_.empty(); }

    /// Rows of `word TAB weight`.
    void save(const std::filesystem::path& path) const;
    static ToxicityLexicon load(const std::filesystem::path& path);

    /// Words normalized; each gets `weight`.
    static ToxicityLexicon from_words(std::span<const std::string> words, double weight = 1.0);

private:
    WordWeights words_;
    double threshold_ = -std::numeric_limits<double>::infinity();
};

/// Threshold that admits the top `fraction` of the vocabulary by weight
/// (at least one word).
double default_threshold(const ToxicityModel& model, double fraction = 0.01);

/// {w : weight(w) > threshold} ∪ manual; manual entries are normalized and
/// weighted with the largest model weight.
ToxicityLexicon extract_lexicon(const ToxicityModel& model, double threshold,
                                std::span<const std::string> manual = {});

}  // namespace detox
