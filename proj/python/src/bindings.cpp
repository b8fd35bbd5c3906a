#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "detox/baselines.hpp"
#include "detox/condbert.hpp"
#include "detox/error.hpp"
#include "detox/metrics.hpp"
#include "detox/promptgen.hpp"

namespace py = pybind11;
using namespace detox;

namespace {

std::vector<Sentence> sentences(const std::vector<std::string>& lines) {
    std::vector<Sentence> out;
    out.reserve(lines.size());
    for (const auto& l : lines) out.push_back(tokenize(l));
    return out;
}

std::vector<std::string> raws(const std::vector<Sentence>& xs) {
    std::vector<std::string> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(x.raw);
    return out;
}

std::vector<std::string> run_batch(const Detoxifier& m, const std::vector<std::string>& lines, unsigned threads) {
    const auto in = sentences(lines);
    std::vector<Sentence> out;
    {
        py::gil_scoped_release release;
        out = transform_batch(m, in, threads);
    }
    return raws(out);
}

/// Prompt method that owns its demonstration pairs.
class OwnedPrompt final : public Detoxifier {
public:
    OwnedPrompt(const NgramLm& lm, PromptOptions options, ParallelCorpus pairs)
        : pairs_(std::make_unique<ParallelCorpus>(std::move(pairs))), method_(lm, options, pairs_.get()) {}
    std::string name() const override { return method_.name(); }
    Sentence transform(const Sentence& x) const override { return method_.transform(x); }

private:
    std::unique_ptr<ParallelCorpus> pairs_;
    PromptMethod method_;
};

}  // namespace

PYBIND11_MODULE(_detox, m) {
    m.doc() = "Russian text detoxification toolkit";

    auto base = py::register_exception<Error>(m, "DetoxError");
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());
    py::register_exception<AlignmentError>(m, "AlignmentError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    // text
    m.def("tokenize", [](const std::string& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& t : tokenize(s).tokens) out.emplace_back(t.surface, t.norm);
        return out;
    }, "Split a sentence into (surface, norm) pairs.");
    m.def("normalize", &normalize);

    // data_io
    m.def("load_labeled_corpus", [](const std::filesystem::path& p, const std::string& fmt) {
        std::vector<std::pair<std::string, std::string>> out;
        const auto corpus = load_labeled_corpus(p, fmt == "csv" ? CorpusFormat::csv : CorpusFormat::tsv);
        for (const auto& e : corpus.entries())
            out.emplace_back(e.text, std::string(to_string(e.label)));
        return out;
    }, py::arg("path"), py::arg("format") = "tsv");
    m.def("load_parallel_corpus", [](const std::filesystem::path& p) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : load_parallel_corpus(p)) out.emplace_back(e.source, e.target);
        return out;
    });

    py::class_<LabeledCorpus>(m, "LabeledCorpus")
        .def(py::init<>())
        .def(py::init([](const std::vector<std::pair<std::string, std::string>>& rows) {
            LabeledCorpus c;
            for (const auto& [text, label] : rows) {
                const auto l = parse_label(label);
                if (!l) throw DataError("unknown label: " + label);
                c.add(text, *l);
            }
            return c;
        }))
        .def_static("load", [](const std::filesystem::path& p, const std::string& fmt) {
            return load_labeled_corpus(p, fmt == "csv" ? CorpusFormat::csv : CorpusFormat::tsv);
        }, py::arg("path"), py::arg("format") = "tsv")
        .def("__len__", &LabeledCorpus::size)
        .def("texts", [](const LabeledCorpus& c, const std::string& label) {
            const auto l = parse_label(label);
            if (!l) throw DataError("unknown label: " + label);
            return c.texts(*l);
        })
        .def("split", [](const LabeledCorpus& c, std::size_t test_size, std::uint64_t seed) {
            auto s = split_corpus(c, {test_size, seed});
            return py::make_tuple(std::move(s.train), std::move(s.test));
        }, py::arg("test_size"), py::arg("seed") = 0);

    // toxicity
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("l2", &TrainConfig::l2)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("min_count", &TrainConfig::min_count);

    py::class_<ToxicityModel>(m, "ToxicityModel")
        .def_static("train", &train, py::arg("corpus"), py::arg("config") = TrainConfig{})
        .def_static("load", &ToxicityModel::load)
        .def("save", &ToxicityModel::save)
        .def("weight", &ToxicityModel::weight)
        .def_property_readonly("bias", &ToxicityModel::bias)
        .def("predict_proba", [](const ToxicityModel& mdl, const std::string& s) { return predict_proba(mdl, tokenize(s)); })
        .def("is_toxic", [](const ToxicityModel& mdl, const std::string& s) { return is_toxic(mdl, tokenize(s)); })
        .def("f1", &f1);

    py::class_<ToxicityLexicon>(m, "ToxicityLexicon")
        .def_static("extract", [](const ToxicityModel& mdl, std::optional<double> threshold, double top_fraction,
                                  const std::vector<std::string>& manual) {
            return extract_lexicon(mdl, threshold ? *threshold : default_threshold(mdl, top_fraction), manual);
        }, py::arg("model"), py::arg("threshold") = py::none(), py::arg("top_fraction") = 0.01,
           py::arg("manual") = std::vector<std::string>{})
        .def_static("from_words", &ToxicityLexicon::from_words, py::arg("words"), py::arg("weight") = 1.0)
        .def_static("load", &ToxicityLexicon::load)
        .def("save", &ToxicityLexicon::save)
        .def("__contains__", &ToxicityLexicon::contains)
        .def("__len__", &ToxicityLexicon::size)
        .def("weight", &ToxicityLexicon::weight)
        .def_property_readonly("words", [](const ToxicityLexicon& l) {
            return std::map<std::string, double>(l.words().begin(), l.words().end());
        })
        .def_property_readonly("threshold", &ToxicityLexicon::threshold);

    // embeddings
    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def(py::init<std::size_t>())
        .def_static("load", &EmbeddingTable::load)
        .def("save", &EmbeddingTable::save)
        .def("set", [](EmbeddingTable& t, std::string w, const std::vector<double>& v) { return t.set(std::move(w), v); })
        .def("get", [](const EmbeddingTable& t, const std::string& w) -> std::optional<std::vector<double>> {
            const auto v = t.find(w);
            if (!v) return std::nullopt;
            return std::vector<double>(v->begin(), v->end());
        })
        .def_property_readonly("dim", &EmbeddingTable::dim)
        .def("__len__", &EmbeddingTable::size)
        .def("sentence_vector", [](const EmbeddingTable& t, const std::string& s) { return sentence_vector(tokenize(s), t); });

    m.def("cosine", [](const std::vector<double>& u, const std::vector<double>& v) { return cosine(u, v); });

    py::class_<RetrieveIndex>(m, "RetrieveIndex")
        .def_static("build", py::overload_cast<std::span<const std::string>, const EmbeddingTable&>(&RetrieveIndex::build))
        .def_static("build_neutral", py::overload_cast<const LabeledCorpus&, const EmbeddingTable&>(&RetrieveIndex::build))
        .def_static("load", &RetrieveIndex::load)
        .def("save", &RetrieveIndex::save)
        .def("__len__", &RetrieveIndex::size)
        .def("sentence", &RetrieveIndex::sentence)
        .def("nearest", [](const RetrieveIndex& idx, const std::string& s, const EmbeddingTable& t) {
            return nearest_neighbor(tokenize(s), idx, t);
        });

    // ngram_lm
    py::class_<GenerationParams>(m, "GenerationParams")
        .def(py::init<>())
        .def_readwrite("top_k", &GenerationParams::top_k)
        .def_readwrite("top_p", &GenerationParams::top_p)
        .def_readwrite("temperature", &GenerationParams::temperature)
        .def_readwrite("max_tokens", &GenerationParams::max_tokens)
        .def_readwrite("seed", &GenerationParams::seed);

    py::class_<NgramLm>(m, "NgramLm")
        .def_static("train", &NgramLm::train, py::arg("corpus"), py::arg("order") = 3, py::arg("alpha") = 0.1)
        .def_static("load", &NgramLm::load)
        .def("save", &NgramLm::save)
        .def_property_readonly("order", &NgramLm::order)
        .def_property_readonly("alpha", &NgramLm::alpha)
        .def_property_readonly("vocabulary", &NgramLm::vocabulary)
        .def("conditional", [](const NgramLm& lm, const std::vector<std::string>& h, const std::string& w, const std::string& style) {
            const auto st = parse_lm_style(style);
            if (!st) throw DataError("unknown style: " + style);
            return lm.conditional(h, w, *st);
        }, py::arg("history"), py::arg("word"), py::arg("style") = "any")
        .def("masked_fill", [](const NgramLm& lm, const std::vector<std::string>& l, const std::vector<std::string>& r,
                               const std::string& style) {
            const auto st = parse_lm_style(style);
            if (!st) throw DataError("unknown style: " + style);
            std::vector<std::pair<std::string, double>> out;
            const auto dist = lm.masked_fill(l, r, *st);
            for (const auto& c : dist.items()) out.emplace_back(c.word, c.prob);
            return out;
        }, py::arg("left"), py::arg("right"), py::arg("style") = "neutral")
        .def("perplexity", [](const NgramLm& lm, const std::string& s) { return perplexity(lm, tokenize(s)); });

    // methods
    py::class_<Detoxifier>(m, "Detoxifier")
        .def_property_readonly("name", &Detoxifier::name)
        .def("__call__", [](const Detoxifier& d, const std::string& s) { return d.transform(tokenize(s)).raw; })
        .def("transform_batch", &run_batch, py::arg("lines"), py::arg("threads") = 1);

    py::class_<DuplicateMethod, Detoxifier>(m, "DuplicateMethod").def(py::init<>());
    py::class_<DeleteMethod, Detoxifier>(m, "DeleteMethod")
        .def(py::init([](const ToxicityLexicon& l) { return std::make_unique<DeleteMethod>(l); }), py::keep_alive<1, 2>());
    py::class_<RetrieveMethod, Detoxifier>(m, "RetrieveMethod")
        .def(py::init<const RetrieveIndex&, const EmbeddingTable&>(), py::keep_alive<1, 2>(), py::keep_alive<1, 3>());

    py::class_<CondBertConfig>(m, "CondBertConfig")
        .def(py::init<>())
        .def_readwrite("penalty", &CondBertConfig::penalty)
        .def_readwrite("beam_width", &CondBertConfig::beam_width)
        .def_readwrite("max_length", &CondBertConfig::max_length)
        .def_readwrite("hard_ban", &CondBertConfig::hard_ban)
        .def_property("style", [](const CondBertConfig& c) { return std::string(to_string(c.style)); },
                      [](CondBertConfig& c, const std::string& s) {
                          const auto st = parse_lm_style(s);
                          if (!st) throw DataError("unknown style: " + s);
                          c.style = *st;
                      });
    py::class_<CondBertMethod, Detoxifier>(m, "CondBertMethod")
        .def(py::init([](const NgramLm& lm, const ToxicityLexicon& lex, const CondBertConfig& cfg) {
            validate(cfg);
            return std::make_unique<CondBertMethod>(lm, lex, cfg);
        }), py::arg("lm"), py::arg("lexicon"), py::arg("config") = CondBertConfig{}, py::keep_alive<1, 2>(), py::keep_alive<1, 3>());

    // promptgen
    m.def("build_zero_shot", [](const std::string& s) { return build_zero_shot(tokenize(s)); });
    m.def("build_few_shot", [](const ParallelCorpus& pairs, const std::string& s, std::size_t k) {
        return build_few_shot(pairs, tokenize(s), k);
    });
    m.def("parse_generation", [](const std::string& s) { return parse_generation(s).raw; });
    m.def("build_finetune_records", [](const ParallelCorpus& pairs) { return build_finetune_records(pairs); });
    m.def("train_finetune_lm", [](const ParallelCorpus& pairs, std::size_t order, double alpha) {
        return train_finetune_lm(pairs, order, alpha);
    }, py::arg("pairs"), py::arg("order") = 3, py::arg("alpha") = 0.1);

    py::class_<ParallelPair>(m, "ParallelPair")
        .def(py::init<std::string, std::string>())
        .def_readwrite("source", &ParallelPair::source)
        .def_readwrite("target", &ParallelPair::target);

    py::class_<OwnedPrompt, Detoxifier>(m, "PromptMethod")
        .def(py::init([](const NgramLm& lm, const std::string& mode, const GenerationParams& params, std::size_t shots,
                         const ParallelCorpus& pairs) {
            PromptOptions o;
            if (mode == "zero") o.mode = PromptMode::zero_shot;
            else if (mode == "few") o.mode = PromptMode::few_shot;
            else if (mode == "ft") o.mode = PromptMode::finetuned_sim;
            else throw DataError("unknown prompt mode: " + mode);
            validate(params);
            o.params = params;
            o.shots = shots;
            if (o.mode == PromptMode::few_shot) validate(o.tmpl, pairs);
            return std::make_unique<OwnedPrompt>(lm, o, pairs);
        }), py::arg("lm"), py::arg("mode") = "zero", py::arg("params") = GenerationParams{}, py::arg("shots") = 3,
            py::arg("pairs") = ParallelCorpus{}, py::keep_alive<1, 2>());

    // metrics
    m.def("word_overlap", [](const std::string& a, const std::string& b, bool multiset) {
        return word_overlap(tokenize(a), tokenize(b), multiset ? OverlapMode::multiset : OverlapMode::set);
    }, py::arg("x"), py::arg("y"), py::arg("multiset") = false);
    m.def("bleu", [](const std::string& ref, const std::string& hyp) { return bleu(tokenize(ref), tokenize(hyp)); });
    m.def("content_similarity", [](const std::string& a, const std::string& b, const EmbeddingTable& t) {
        return content_similarity(tokenize(a), tokenize(b), t);
    });
    m.def("gm", &gm, py::arg("sta"), py::arg("cs"), py::arg("ppl"));

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("method", &EvalReport::method)
        .def_readonly("sta", &EvalReport::sta)
        .def_readonly("cs", &EvalReport::cs)
        .def_readonly("wo", &EvalReport::wo)
        .def_readonly("bleu", &EvalReport::bleu)
        .def_readonly("ppl", &EvalReport::ppl)
        .def_readonly("gm", &EvalReport::gm)
        .def_readonly("gm_std", &EvalReport::gm_std)
        .def_readonly("n", &EvalReport::n);

    m.def("evaluate", [](const std::string& name, const std::vector<std::string>& inputs, const std::vector<std::string>& outputs,
                         const ToxicityModel& clf, const EmbeddingTable& table, const NgramLm& lm, std::size_t resamples,
                         std::uint64_t seed, bool multiset) {
        const auto xs = sentences(inputs);
        const auto ys = sentences(outputs);
        const EvalComponents parts{clf, table, lm, multiset ? OverlapMode::multiset : OverlapMode::set};
        EvalOptions opts;
        opts.resamples = resamples;
        opts.seed = seed;
        return evaluate_outputs(name, xs, ys, parts, opts);
    }, py::arg("name"), py::arg("inputs"), py::arg("outputs"), py::arg("classifier"), py::arg("embeddings"), py::arg("lm"),
       py::arg("resamples") = 1000, py::arg("seed") = 0, py::arg("multiset") = false);

    m.def("format_table", [](const std::vector<EvalReport>& reports) {
        std::ostringstream out;
        write_table(out, reports);
        return out.str();
    });
}
