// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "detox/baselines.hpp"
#include "detox/condbert.hpp"
#include "detox/metrics.hpp"
#include "detox/promptgen.hpp"
#include "detox/synthetic.hpp"
#include "support/oracles.hpp"

using namespace detox;
using Tokens = std::vector<std::string>;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void require(Outcome& o, bool ok, const std::string& what) {
    if (!ok && o.pass) {
        o.pass = false;
        o.detail = what;
    }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

std::string join(const Tokens& t) {
    std::string s;
    for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
    return s;
}

// 1
Outcome gm_rows() {
    Outcome o;
    struct Row {
        const char* name;
        double sta, cs, ppl, reference;
    };
    const Row rows[]{{"Retrieve", 0.91, 0.85, 65.74, 0.22},
                     {"detoxGPT-large fine-tuned", 0.61, 0.77, 36.92, 0.23},
                     {"condBERT Geotrend fine-tuned", 0.66, 0.86, 209.95, 0.14}};
    for (const auto& r : rows) {
        const double g = gm(r.sta, r.cs, r.ppl);
        require(o, std::abs(g - r.reference) <= 0.01, std::string(r.name) + fmt(": gm %.4f vs %.2f", g, r.reference));
        o.detail += (o.detail.empty() ? "" : ", ") + fmt("%.4f", g);
    }
    return o;
}

// 2
Outcome duplicate_identities() {
    Outcome o;
    const auto train = synthetic::labeled_corpus({.neutral = 300, .toxic = 100, .min_fillers = 4, .max_fillers = 10, .seed = 12});
    const auto clf = detox::train(train, TrainConfig{});
    const auto lm = NgramLm::train(train, 3, 0.1);
    const auto table = synthetic::embeddings(16, 3);
    LabeledCorpus test;
    for (const auto& s : synthetic::toxic_sentences(100, {.min_fillers = 2, .max_fillers = 12}, 44)) test.add(s, StyleLabel::toxic);
    const auto r = evaluate_method(DuplicateMethod{}, test, {clf, table, lm}, {.resamples = 100, .seed = 1});
    require(o, r.n == 100, "expected 100 sentences");
    require(o, r.wo == 1.0 && r.bleu == 1.0 && std::abs(r.cs - 1.0) <= 1e-12,
            fmt("WO %.17g BLEU %.17g CS %.17g", r.wo, r.bleu, r.cs));
    if (o.pass) o.detail = fmt("WO %.2f BLEU %.2f CS %.2f", r.wo, r.bleu, r.cs);
    return o;
}

// 3
Outcome delete_vs_condbert() {
    Outcome o;
    const synthetic::Spec spec;  // 3000 neutral, 700 toxic
    const auto train = synthetic::labeled_corpus(spec);
    const auto clf = detox::train(train, TrainConfig{});
    const auto lexicon = extract_lexicon(clf, default_threshold(clf), synthetic::toxic_words());
    const auto masked = NgramLm::train(train, 3, 0.1);

    synthetic::Spec scoring_spec = spec;
    scoring_spec.seed = 2;
    const auto scorer = NgramLm::train(synthetic::labeled_corpus(scoring_spec), 3, 0.1);

    std::vector<Sentence> inputs;
    for (const auto& s : synthetic::toxic_sentences(500, spec, 3)) inputs.push_back(tokenize(s));
    const auto deleted = transform_batch(DeleteMethod(lexicon), inputs, 0);
    const auto replaced = transform_batch(CondBertMethod(masked, lexicon, CondBertConfig{}), inputs, 0);

    auto mean_wo = [&](const std::vector<Sentence>& out) {
        double s = 0;
        for (std::size_t i = 0; i < out.size(); ++i) s += word_overlap(inputs[i], out[i]);
        return s / static_cast<double>(out.size());
    };
    const double sta_del = sta(deleted, clf), sta_cb = sta(replaced, clf);
    const double wo_del = mean_wo(deleted), wo_cb = mean_wo(replaced);
    const double ppl_del = corpus_ppl(deleted, scorer), ppl_cb = corpus_ppl(replaced, scorer);
    require(o, sta_del >= 0.95, fmt("Delete STA %.4f < 0.95", sta_del));
    require(o, sta_cb >= 0.95, fmt("condBERT STA %.4f < 0.95", sta_cb));
    require(o, wo_cb >= wo_del - 0.05, fmt("condBERT WO %.4f < Delete WO %.4f - 0.05", wo_cb, wo_del));
    require(o, ppl_cb <= ppl_del, fmt("condBERT PPL %.3f > Delete PPL %.3f", ppl_cb, ppl_del));
    if (o.pass) {
        o.detail = fmt("STA %.3f/%.3f WO %.3f/%.3f", sta_del, sta_cb, wo_del, wo_cb) +
                   fmt(" PPL %.2f/%.2f (Delete/condBERT)", ppl_del, ppl_cb);
    }
    return o;
}

// 4
Outcome logistic_regression() {
    Outcome o;
    const auto corpus = synthetic::labeled_corpus({.neutral = 120, .toxic = 60, .min_fillers = 4, .max_fillers = 10, .seed = 5});
    const auto vocab = Vocabulary::build(corpus, 1);
    const auto data = make_dataset(corpus, vocab);
    SplitMix64 rng(2);
    const double h = 1e-5;
    double worst = 0;
    for (int point = 0; point < 10; ++point) {
        std::vector<double> w(vocab.size());
        for (auto& x : w) x = 2.0 * rng.uniform() - 1.0;
        const double b = 2.0 * rng.uniform() - 1.0;
        const auto g = loss_and_gradient(data, w, b, 1e-3);
        for (std::size_t j = 0; j <= w.size(); ++j) {
            auto wp = w, wm = w;
            double bp = b, bm = b;
            if (j < w.size()) {
                wp[j] += h;
                wm[j] -= h;
            } else {
                bp += h;
                bm -= h;
            }
            const double fd = (loss_and_gradient(data, wp, bp, 1e-3).loss - loss_and_gradient(data, wm, bm, 1e-3).loss) / (2 * h);
            const double an = j < w.size() ? g.weight_grad[j] : g.bias_grad;
            const double rel = std::abs(fd - an) / std::max(1e-8, std::abs(fd) + std::abs(an));
            worst = std::max(worst, rel);
        }
    }
    require(o, worst <= 1e-5, fmt("gradient relative error %.3g", worst));

    const auto big = synthetic::labeled_corpus({.neutral = 1500, .toxic = 500, .min_fillers = 6, .max_fillers = 14, .seed = 8});
    const auto split = stratified_holdout(big, 0.2, 3);
    const double score = f1(detox::train(split.train, TrainConfig{}), split.test);
    require(o, score >= 0.95, fmt("held-out F1 %.4f", score));
    if (o.pass) o.detail = fmt("max rel err %.2g, held-out F1 %.4f", worst, score);
    return o;
}

// 5
Outcome beam_oracle() {
    Outcome o;
    SplitMix64 rng(505);
    int matched = 0;
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t v = 2 + rng.index_below(7);
        Tokens vocab;
        for (std::size_t i = 0; i < v; ++i) vocab.push_back("w" + std::to_string(i));
        LabeledCorpus corpus;
        for (int s = 0; s < 6; ++s) {
            Tokens sent(1 + rng.index_below(5));
            for (auto& t : sent) t = vocab[rng.index_below(v)];
            corpus.add(join(sent), rng.index_below(2) ? StyleLabel::toxic : StyleLabel::neutral);
        }
        for (const auto& w : vocab) corpus.add(w, StyleLabel::neutral);  // every word seen
        const auto lm = NgramLm::train(corpus, 2 + rng.index_below(2), 0.05 + rng.uniform());

        WordWeights toxic{{vocab[rng.index_below(v)], 0.5 + rng.uniform()}};
        const ToxicityLexicon lex(toxic, 0.0);
        CondBertConfig cfg;
        cfg.beam_width = v;
        cfg.max_length = 1 + rng.index_below(2);
        cfg.hard_ban = rng.index_below(2) == 0;
        cfg.penalty = 3.0 * rng.uniform();
        cfg.style = rng.index_below(2) ? LmStyle::neutral : LmStyle::any;
        const Tokens left{vocab[rng.index_below(v)]};
        const Tokens right{vocab[rng.index_below(v)]};

        auto penalized = [&](const Tokens& l) {
            std::map<std::string, double> out;
            double z = 0;
            const auto dist = lm.masked_fill(l, right, cfg.style);
            for (const auto& c : dist.items()) {
                double p = c.prob;
                if (const auto it = toxic.find(c.word); it != toxic.end()) {
                    if (cfg.hard_ban) continue;
                    p *= std::exp(-cfg.penalty * it->second);
                }
                out[c.word] = p;
                z += p;
            }
            for (auto& [w, p] : out) p /= z;
            return out;
        };
        std::vector<oracle::Scored> all;
        for (const auto& [w1, p1] : penalized(left)) {
            all.push_back({{w1}, p1});
            if (cfg.max_length < 2) continue;
            for (const auto& [w2, p2] : penalized({left[0], w1})) all.push_back({{w1, w2}, oracle::harmonic({p1, p2})});
        }
        const auto best = *std::min_element(all.begin(), all.end(), oracle::better);
        if (beam_replace(left, right, lm, cfg, lex) == best.tokens) ++matched;
    }
    require(o, matched == 200, fmt("%g of 200 instances matched", matched));
    if (o.pass) o.detail = "200/200 instances match exhaustive enumeration";
    return o;
}

// 6
Outcome retrieve_oracle() {
    Outcome o;
    SplitMix64 rng(606);
    int matched = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t dim = 2 + rng.index_below(15);
        const std::size_t words = 5 + rng.index_below(60);
        EmbeddingTable table(dim);
        std::map<std::string, std::vector<double>> vecs;
        Tokens vocab;
        for (std::size_t i = 0; i < words; ++i) {
            std::vector<double> v(dim);
            for (auto& x : v) x = 2.0 * rng.uniform() - 1.0;
            vocab.push_back("t" + std::to_string(i));
            vecs[vocab.back()] = v;
            table.set(vocab.back(), v);
        }
        auto mean = [&](const Tokens& s) {
            std::vector<double> m(dim, 0.0);
            for (const auto& w : s)
                for (std::size_t k = 0; k < dim; ++k) m[k] += vecs[w][k];
            for (auto& x : m) x /= static_cast<double>(s.size());
            return m;
        };
        auto random_sentence = [&] {
            Tokens s(1 + rng.index_below(6));
            for (auto& w : s) w = vocab[rng.index_below(words)];
            return s;
        };
        const std::size_t n = 1 + rng.index_below(1000);
        std::vector<std::string> cands;
        std::vector<std::vector<double>> cand_vecs;
        for (std::size_t i = 0; i < n; ++i) {
            const auto s = random_sentence();
            cands.push_back(join(s));
            cand_vecs.push_back(mean(s));
        }
        const auto index = RetrieveIndex::build(cands, table);
        const auto query = random_sentence();
        const auto expected = oracle::nearest(mean(query), cand_vecs);
        if (nearest_neighbor(tokenize(join(query)), index, table) == cands[expected]) ++matched;
    }
    require(o, matched == 100, fmt("%g of 100 indexes matched", matched));
    if (o.pass) o.detail = "100/100 indexes match the brute-force scan";
    return o;
}

// 7
Outcome perplexity_oracle() {
    Outcome o;
    SplitMix64 rng(707);
    double worst = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t v = 2 + rng.index_below(9);
        Tokens vocab;
        for (std::size_t i = 0; i < v; ++i) vocab.push_back("v" + std::to_string(i));
        auto sentence = [&] {
            Tokens s(1 + rng.index_below(6));
            for (auto& w : s) w = vocab[rng.index_below(v)];
            return s;
        };
        std::vector<Tokens> train;
        LabeledCorpus corpus;
        for (std::size_t i = 0, n = 1 + rng.index_below(6); i < n; ++i) {
            train.push_back(sentence());
            corpus.add(join(train.back()), rng.index_below(2) ? StyleLabel::toxic : StyleLabel::neutral);
        }
        const std::size_t order = 1 + rng.index_below(3);
        const double alpha = 0.01 + rng.uniform();
        const auto lm = NgramLm::train(corpus, order, alpha);
        const oracle::CountingLm ref(train, order, alpha);
        std::vector<Sentence> outputs;
        double lp = 0;
        std::size_t count = 0;
        for (int i = 0; i < 5; ++i) {
            const auto s = sentence();
            outputs.push_back(tokenize(join(s)));
            const auto [l, c] = ref.log_prob(s);
            lp += l;
            count += c;
        }
        const double expected = std::exp(-lp / static_cast<double>(count));
        worst = std::max(worst, std::abs(corpus_ppl(outputs, lm) - expected));
    }
    require(o, worst <= 1e-9, fmt("max |PPL - oracle| %.3g", worst));

    // Uniform models over V' = 2..12 outcomes: one sentence with every word
    // once. exp(log(1/V')) is not exact in binary floating point for every
    // V', so equality is checked to 4 ulps (relative 1e-15).
    double worst_uniform = 0;
    for (std::size_t k = 1; k <= 11; ++k) {
        Tokens words;
        for (std::size_t i = 0; i < k; ++i) words.push_back("u" + std::to_string(i));
        LabeledCorpus uniform;
        uniform.add(join(words), StyleLabel::neutral);
        const auto lm = NgramLm::train(uniform, 1, 0.1 * static_cast<double>(k));
        const std::vector<Sentence> outs{tokenize(join(words)), tokenize(words.front()), tokenize(words.back() + " " + words.front())};
        const double vp = static_cast<double>(lm.outcome_count());
        const double rel = std::abs(corpus_ppl(outs, lm) - vp) / vp;
        worst_uniform = std::max(worst_uniform, rel);
    }
    require(o, worst_uniform <= 1e-15, fmt("uniform PPL relative error %.3g", worst_uniform));
    if (o.pass) o.detail = fmt("max |PPL - oracle| %.2g, uniform PPL relative error %.2g", worst, worst_uniform);
    return o;
}

// 8
Outcome sampling_contracts() {
    Outcome o;
    SplitMix64 rng(808);
    for (int i = 0; i < 200; ++i) {
        std::vector<Candidate> items;
        const auto n = 1 + rng.index_below(12);
        for (std::size_t k = 0; k < n; ++k) items.push_back({"w" + std::to_string(k), 0.001 + rng.uniform()});
        const auto d = CandidateDistribution(items).normalized();

        GenerationParams one;
        one.top_k = 1;
        one.seed = rng.next();
        require(o, filtered_sample(d, one) == d.argmax().word, "top_k = 1 missed the argmax");

        GenerationParams open;
        open.top_k = n;
        open.top_p = 1.0;
        open.temperature = 1.0;
        const auto f = filter_distribution(d, open);
        for (const auto& c : d.items())
            require(o, std::abs(f.probability(c.word) - c.prob) <= 1e-12, "unfiltered distribution changed");

        const double t = std::exp(8.0 * rng.uniform() - 4.0);
        require(o, apply_temperature(d, t).argmax().word == d.argmax().word, "temperature moved the argmax");
    }
    GenerationParams flat;
    flat.top_k = 2;
    flat.top_p = 1.0;
    flat.temperature = std::numeric_limits<double>::infinity();
    const CandidateDistribution two({{"a", 0.9}, {"b", 0.1}});
    SplitMix64 draws(8);
    int a = 0;
    for (int i = 0; i < 10000; ++i) a += filtered_sample(two, flat, draws) == "a";
    const double freq = a / 10000.0;
    require(o, freq >= 0.48 && freq <= 0.52, fmt("flattened frequency %.4f", freq));
    if (o.pass) o.detail = fmt("flattened frequency of \"a\" %.4f", freq);
    return o;
}

// 9
Outcome prompt_formats() {
    Outcome o;
    const auto x = tokenize("ты дурак");
    require(o, build_zero_shot(x) == "Перефразируй\nты дурак >>>", "zero-shot golden");
    const ParallelCorpus pairs{{"он идиот", "он хороший"}, {"она тупая", "она умная"}, {"ты урод", "ты молодец"}};
    require(o, build_few_shot(pairs, x, 2) == "он идиот >>> он хороший\nона тупая >>> она умная\nПерефразируй\nты дурак >>>",
            "few-shot golden");
    require(o, build_few_shot(pairs, x, 0) == build_zero_shot(x), "k = 0 reduction");
    require(o, build_finetune_records(pairs) == Tokens{"он идиот >>> он хороший", "она тупая >>> она умная", "ты урод >>> ты молодец"},
            "fine-tune records golden");
    const auto lm = train_finetune_lm(pairs, 3, 0.1);
    PromptOptions opts;
    opts.mode = PromptMode::finetuned_sim;
    opts.params.top_k = 1;
    for (const auto& [src, tgt] : pairs) {
        const auto out = detoxify_prompted(tokenize(src), lm, opts).raw;
        require(o, out == tgt, "fine-tuned output \"" + out + "\" for \"" + src + "\"");
    }
    if (o.pass) o.detail = "golden prompts byte-exact, 3/3 targets reproduced";
    return o;
}

// 10
Outcome bootstrap_checks() {
    Outcome o;
    const std::vector<PairScores> constant(7, PairScores{1.0, 0.4, 0.3, 0.7, -5.5, 3});
    require(o, bootstrap_gm(constant, 500, 3).std == 0.0, "constant sample std is not 0");

    SplitMix64 rng(1010);
    std::vector<PairScores> pairs;
    for (int i = 0; i < 3; ++i)
        pairs.push_back({static_cast<double>(rng.index_below(2)), rng.uniform(), rng.uniform(), 2.0 * rng.uniform() - 0.5,
                         -10.0 * rng.uniform() - 0.1, 1 + rng.index_below(6)});
    const auto a = bootstrap_gm(pairs, 1000, 99);
    const auto b = bootstrap_gm(pairs, 1000, 99);
    require(o, a.mean == b.mean && a.std == b.std, "bootstrap is not seed-deterministic");
    std::vector<oracle::Pair> ref;
    for (const auto& p : pairs) ref.push_back({p.sta_neutral, p.cs, p.log_prob_sum, p.token_count});
    const auto [mean, sd] = oracle::bootstrap(ref, 1000, 99);
    require(o, std::abs(a.std - sd) <= 1e-12 && std::abs(a.mean - mean) <= 1e-12,
            fmt("dual implementations differ: std %.17g vs %.17g", a.std, sd));
    if (o.pass) o.detail = fmt("std %.6f, |diff| %.2g", a.std, std::abs(a.std - sd));
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "GM reproduces reference rows within 0.01", 1, gm_rows},
        {2, "Duplicate row identities WO = BLEU = CS = 1", 1, duplicate_identities},
        {3, "Delete vs condBERT on the planted-lexicon corpus", 30, delete_vs_condbert},
        {4, "logistic regression gradient and held-out F1", 10, logistic_regression},
        {5, "beam search equals exhaustive enumeration", 10, beam_oracle},
        {6, "retrieve equals brute-force scan", 10, retrieve_oracle},
        {7, "perplexity equals chain-rule oracle", 5, perplexity_oracle},
        {8, "sampling contracts", 5, sampling_contracts},
        {9, "prompt formats and fine-tune reproduction", 5, prompt_formats},
        {10, "bootstrap determinism and dual implementation", 5, bootstrap_checks},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (out.pass && secs > c.budget_seconds) {
            out.pass = false;
            out.detail += fmt(" (over the %.0f s budget)", c.budget_seconds);
        }
        failed += !out.pass;
        std::printf("[%s] %2d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str(), secs);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
