#include "detox/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "detox/error.hpp"
#include "detox/rng.hpp"

namespace detox::synthetic {

namespace {

struct Frame {
    std::string_view lead;
    std::string_view head;
    std::string_view tail;
};

constexpr std::array<Frame, 4> kFrames{{
    {"ну", "ты", "человек"},
    {"какой", "же", "парень"},
    {"он", "просто", "сосед"},
    {"она", "очень", "девушка"},
}};

struct Draft {
    std::vector<std::string> words;
    std::size_t slot = 0;
};

Draft draft(const Spec& spec, SplitMix64& rng, std::string_view slot_word) {
    const auto& fillers = filler_words();
    if (spec.max_fillers < spec.min_fillers || spec.max_fillers > fillers.size())
        throw DataError("synthetic spec: invalid filler range");
    const std::size_t m = spec.min_fillers + rng.index_below(spec.max_fillers - spec.min_fillers + 1);
    std::vector<std::size_t> pool(fillers.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    for (std::size_t i = 0; i < m; ++i) std::swap(pool[i], pool[i + rng.index_below(pool.size() - i)]);

    const auto& frame = kFrames[rng.index_below(kFrames.size())];
    const std::size_t at = rng.index_below(m + 1);
    Draft d;
    for (std::size_t i = 0; i < m; ++i) {
        if (i == at) {
            d.words.emplace_back(frame.lead);
            d.words.emplace_back(frame.head);
            d.slot = d.words.size();
            d.words.emplace_back(slot_word);
            d.words.emplace_back(frame.tail);
        }
        d.words.push_back(fillers[pool[i]]);
    }
    if (at == m) {
        d.words.emplace_back(frame.lead);
        d.words.emplace_back(frame.head);
        d.slot = d.words.size();
        d.words.emplace_back(slot_word);
        d.words.emplace_back(frame.tail);
    }
    return d;
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out.push_back(' ');
        out += w;
    }
    return out;
}

const std::string& pick(const std::vector<std::string>& words, SplitMix64& rng) {
    return words[rng.index_below(words.size())];
}

}  // namespace

const std::vector<std::string>& toxic_words() {
    static const std::vector<std::string> words{"дурак", "идиот", "тупой", "урод", "козел", "дебил"};
    return words;
}

const std::vector<std::string>& polite_words() {
    static const std::vector<std::string> words{"хороший", "умный", "добрый", "славный", "милый", "честный"};
    return words;
}

const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words{
        "вчера", "сегодня", "завтра", "утром", "вечером", "дома", "на", "работе", "в", "городе",
        "мы", "видели", "говорили", "про", "новый", "фильм", "книгу", "погоду", "машину", "магазин",
        "снова", "опять", "тоже", "уже", "еще", "когда", "потом", "здесь", "там", "всегда",
        "иногда", "часто", "долго", "быстро", "тихо", "громко", "вместе", "рядом", "около", "после",
        "перед", "между", "через", "летом", "зимой", "весной", "осенью", "днем", "ночью", "наконец",
        "кстати", "вообще", "конечно", "наверное", "возможно", "почти", "совсем", "немного", "много",
        "мало", "сразу", "пока", "затем", "обычно", "случайно", "специально", "спокойно", "поздно",
        "рано", "недавно"};
    return words;
}

LabeledCorpus labeled_corpus(const Spec& spec) {
    SplitMix64 rng(spec.seed);
    std::vector<bool> toxic(spec.neutral + spec.toxic, false);
    std::fill(toxic.begin(), toxic.begin() + static_cast<std::ptrdiff_t>(spec.toxic), true);
    for (std::size_t i = toxic.size(); i > 1; --i) {
        const std::size_t j = rng.index_below(i);
        const bool tmp = toxic[i - 1];
        toxic[i - 1] = toxic[j];
        toxic[j] = tmp;
    }
    LabeledCorpus corpus;
    for (bool t : toxic) {
        const auto& slot = pick(t ? toxic_words() : polite_words(), rng);
        corpus.add(join(draft(spec, rng, slot).words), t ? StyleLabel::toxic : StyleLabel::neutral);
    }
    return corpus;
}

std::vector<std::string> toxic_sentences(std::size_t count, const Spec& spec, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(join(draft(spec, rng, pick(toxic_words(), rng)).words));
    return out;
}

ParallelCorpus parallel_pairs(std::size_t count, const Spec& spec, std::uint64_t seed) {
    SplitMix64 rng(seed);
    ParallelCorpus pairs;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        auto d = draft(spec, rng, pick(toxic_words(), rng));
        auto source = join(d.words);
        d.words[d.slot] = pick(polite_words(), rng);
        pairs.push_back({std::move(source), join(d.words)});
    }
    return pairs;
}

EmbeddingTable embeddings(std::size_t dim, std::uint64_t seed) {
    SplitMix64 rng(seed);
    EmbeddingTable table(dim);
    std::vector<double> v(dim);
    auto add = [&](const std::string& w) {
        // Sum of uniforms: cheap, symmetric, roughly normal.
        for (auto& x : v) x = rng.uniform() + rng.uniform() + rng.uniform() - 1.5;
        table.set(w, v);
    };
    for (const auto& w : filler_words()) add(w);
    for (const auto& w : toxic_words()) add(w);
    for (const auto& w : polite_words()) add(w);
    for (const auto& f : kFrames) {
        add(std::string(f.lead));
        add(std::string(f.head));
        add(std::string(f.tail));
    }
    return table;
}

}  // namespace detox::synthetic
