#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "detox/baselines.hpp"
#include "detox/condbert.hpp"
#include "detox/error.hpp"
#include "detox/metrics.hpp"
#include "detox/promptgen.hpp"
#include "detox/synthetic.hpp"

namespace fs = std::filesystem;
using namespace detox;

namespace {

void log(const std::string& msg) { std::cerr << "detox: " << msg << '\n'; }

void require_flag(const std::string& value, const std::string& flag, const std::string& method) {
    if (value.empty()) throw DataError("method " + method + " requires " + flag);
}

CorpusFormat parse_format(const std::string& s) { return s == "csv" ? CorpusFormat::csv : CorpusFormat::tsv; }

LmStyle parse_style(const std::string& s) {
    const auto style = parse_lm_style(s);
    if (!style) throw DataError("unknown style: " + s);
    return *style;
}

std::vector<Sentence> read_sentences(const fs::path& path) {
    std::vector<Sentence> out;
    for (const auto& line : load_lines(path, false)) out.push_back(tokenize(line));
    return out;
}

void write_sentences(const std::vector<Sentence>& sentences, const fs::path& path) {
    std::vector<std::string> lines;
    lines.reserve(sentences.size());
    for (const auto& s : sentences) lines.push_back(s.raw);
    save_lines(lines, path);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

// ---- train-classifier -----------------------------------------------------

struct ClassifierArgs {
    std::string corpus, format = "tsv", out, lexicon_out, manual;
    double holdout = 0.2;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    double top_fraction = 0.01;
    TrainConfig train;
};

int train_classifier(const ClassifierArgs& a) {
    const auto corpus = load_labeled_corpus(a.corpus, parse_format(a.format));
    const auto split = stratified_holdout(corpus, a.holdout, a.train.seed);
    const auto model = train(split.train, a.train);
    std::printf("held-out F1 %.4f (train %zu, held-out %zu)\n", f1(model, split.test), split.train.size(),
                split.test.size());
    model.save(a.out);
    if (!a.lexicon_out.empty()) {
        std::vector<std::string> manual;
        if (!a.manual.empty()) manual = load_lines(a.manual);
        const double tau = std::isnan(a.threshold) ? default_threshold(model, a.top_fraction) : a.threshold;
        const auto lex = extract_lexicon(model, tau, manual);
        lex.save(a.lexicon_out);
        std::printf("lexicon %zu words (threshold %.6g)\n", lex.size(), tau);
    }
    return 0;
}

// ---- detox -----------------------------------------------------------------

struct DetoxArgs {
    std::string method, input, output;
    std::string lexicon, lemmas, index, embeddings, lm, pairs;
    CondBertConfig condbert;
    std::string condbert_style = "neutral";
    bool soft_penalty = false;
    GenerationParams gen;
    std::size_t shots = 3;
    std::string prompt_style = "any";
    unsigned threads = 1;
};

/// Loads whatever the method needs and keeps it alive for the transform.
struct MethodBundle {
    std::optional<ToxicityLexicon> lexicon;
    std::optional<LemmaTable> lemmas;
    std::optional<RetrieveIndex> index;
    std::optional<EmbeddingTable> embeddings;
    std::optional<NgramLm> lm;
    ParallelCorpus pairs;
    std::unique_ptr<Detoxifier> method;
};

std::unique_ptr<MethodBundle> make_method(const DetoxArgs& a) {
    auto b = std::make_unique<MethodBundle>();
    const auto& m = a.method;
    if (m == "duplicate") {
        b->method = std::make_unique<DuplicateMethod>();
    } else if (m == "delete") {
        require_flag(a.lexicon, "--lexicon", m);
        b->lexicon = ToxicityLexicon::load(a.lexicon);
        if (!a.lemmas.empty()) b->lemmas = LemmaTable::load(a.lemmas);
        b->method = std::make_unique<DeleteMethod>(*b->lexicon, b->lemmas ? &*b->lemmas : nullptr);
    } else if (m == "retrieve") {
        require_flag(a.index, "--index", m);
        require_flag(a.embeddings, "--embeddings", m);
        b->index = RetrieveIndex::load(a.index);
        b->embeddings = EmbeddingTable::load(a.embeddings);
        b->method = std::make_unique<RetrieveMethod>(*b->index, *b->embeddings);
    } else if (m == "condbert") {
        require_flag(a.lexicon, "--lexicon", m);
        require_flag(a.lm, "--lm", m);
        b->lexicon = ToxicityLexicon::load(a.lexicon);
        b->lm = NgramLm::load(a.lm);
        auto cfg = a.condbert;
        cfg.style = parse_style(a.condbert_style);
        cfg.hard_ban = !a.soft_penalty;
        validate(cfg);
        b->method = std::make_unique<CondBertMethod>(*b->lm, *b->lexicon, cfg);
    } else if (m == "prompt-zero" || m == "prompt-few" || m == "prompt-ft") {
        require_flag(a.lm, "--lm", m);
        PromptOptions opts;
        opts.mode = m == "prompt-zero" ? PromptMode::zero_shot
                    : m == "prompt-few" ? PromptMode::few_shot
                                        : PromptMode::finetuned_sim;
        opts.params = a.gen;
        opts.shots = a.shots;
        opts.style = parse_style(a.prompt_style);
        if (opts.mode == PromptMode::few_shot) {
            require_flag(a.pairs, "--pairs", m);
            b->pairs = load_parallel_corpus(a.pairs);
            validate(opts.tmpl, b->pairs);
        }
        b->lm = NgramLm::load(a.lm);
        b->method = std::make_unique<PromptMethod>(*b->lm, opts, &b->pairs);
    } else {
        throw DataError("unknown method: " + m);
    }
    return b;
}

int run_detox(const DetoxArgs& a) {
    if (a.method == "duplicate") {
        // Raw passthrough: the output file is the input file.
        std::ifstream in(a.input, std::ios::binary);
        if (!in) throw IoError("cannot open " + a.input);
        std::ostringstream buf;
        buf << in.rdbuf();
        write_text(a.output, buf.str());
        return 0;
    }
    const auto bundle = make_method(a);
    const auto inputs = read_sentences(a.input);
    write_sentences(transform_batch(*bundle->method, inputs, a.threads), a.output);
    log(bundle->method->name() + ": " + std::to_string(inputs.size()) + " sentences");
    return 0;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    std::string inputs, classifier, embeddings, lm, table_out, records_out;
    std::vector<std::string> outputs;  // NAME=PATH
    std::string overlap = "set";
    EvalOptions options;
};

int run_evaluate(const EvaluateArgs& a) {
    const auto classifier = ToxicityModel::load(a.classifier);
    const auto table = EmbeddingTable::load(a.embeddings);
    const auto lm = NgramLm::load(a.lm);
    const EvalComponents parts{classifier, table, lm, a.overlap == "multiset" ? OverlapMode::multiset : OverlapMode::set};
    const auto inputs = read_sentences(a.inputs);

    std::vector<EvalReport> reports;
    for (const auto& spec : a.outputs) {
        const auto eq = spec.find('=');
        const std::string name = eq == std::string::npos ? fs::path(spec).stem().string() : spec.substr(0, eq);
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        const auto outputs = read_sentences(path);
        if (outputs.size() != inputs.size())
            throw AlignmentError(path + " has " + std::to_string(outputs.size()) + " lines, " + a.inputs + " has " +
                                 std::to_string(inputs.size()));
        reports.push_back(evaluate_outputs(name, inputs, outputs, parts, a.options));
    }
    write_table(std::cout, reports);
    if (!a.table_out.empty()) {
        std::ostringstream s;
        write_table(s, reports);
        write_text(a.table_out, s.str());
    }
    if (!a.records_out.empty()) {
        std::ostringstream s;
        write_records(s, reports);
        write_text(a.records_out, s.str());
    }
    return 0;
}

// ---- make-demo and pipeline -------------------------------------------------

struct DemoArgs {
    std::string out_dir;
    std::size_t neutral = 3000, toxic = 700, pairs = 200, dim = 50;
    std::size_t min_fillers = 16, max_fillers = 20;
    std::uint64_t seed = 1;
};

int make_demo(const DemoArgs& a) {
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    synthetic::Spec spec{a.neutral, a.toxic, a.min_fillers, a.max_fillers, a.seed};
    save_labeled_corpus(synthetic::labeled_corpus(spec), dir / "corpus.tsv");
    save_parallel_corpus(synthetic::parallel_pairs(a.pairs, spec, a.seed + 1), dir / "pairs.tsv");
    synthetic::embeddings(a.dim, a.seed + 2).save(dir / "embeddings.vec");
    save_lines(synthetic::toxic_words(), dir / "manual_lexicon.txt");
    std::printf("wrote corpus.tsv, pairs.tsv, embeddings.vec, manual_lexicon.txt to %s\n", dir.string().c_str());
    return 0;
}

struct PipelineArgs {
    std::string corpus, format = "tsv", embeddings, pairs, manual, work_dir = "detox-run";
    std::size_t test_size = 500, order = 3;
    double alpha = 0.1;
    std::uint64_t seed = 1;
    std::size_t resamples = 1000;
    unsigned threads = 0;
    GenerationParams gen;
    CondBertConfig condbert;
};

int run_pipeline(const PipelineArgs& a) {
    const fs::path dir(a.work_dir);
    fs::create_directories(dir);
    const auto corpus = load_labeled_corpus(a.corpus, parse_format(a.format));
    const auto split = split_corpus(corpus, {a.test_size, a.seed});
    save_labeled_corpus(split.train, dir / "train.tsv");
    save_labeled_corpus(split.test, dir / "test.tsv");

    const auto holdout = stratified_holdout(split.train, 0.2, a.seed);
    const auto probe = train(holdout.train, TrainConfig{});
    log("classifier held-out F1 " + std::to_string(f1(probe, holdout.test)));
    const auto classifier = train(split.train, TrainConfig{});
    classifier.save(dir / "classifier.tsv");
    std::vector<std::string> manual;
    if (!a.manual.empty()) manual = load_lines(a.manual);
    const auto lexicon = extract_lexicon(classifier, default_threshold(classifier), manual);
    lexicon.save(dir / "lexicon.tsv");
    log("lexicon " + std::to_string(lexicon.size()) + " words");

    const auto lm = NgramLm::train(split.train, a.order, a.alpha);
    lm.save(dir / "lm.tsv");
    const auto table = EmbeddingTable::load(a.embeddings);
    for (const auto& w : table.warnings()) log(w);
    const auto index = RetrieveIndex::build(split.train, table);
    index.save(dir / "index.tsv");

    ParallelCorpus pairs;
    if (!a.pairs.empty()) pairs = load_parallel_corpus(a.pairs);
    std::optional<NgramLm> ft;
    if (!pairs.empty()) {
        save_lines(build_finetune_records(pairs), dir / "finetune_records.txt");
        ft = train_finetune_lm(pairs, a.order, a.alpha);
    }

    std::vector<std::unique_ptr<Detoxifier>> methods;
    methods.push_back(std::make_unique<DuplicateMethod>());
    methods.push_back(std::make_unique<DeleteMethod>(lexicon));
    methods.push_back(std::make_unique<RetrieveMethod>(index, table));
    methods.push_back(std::make_unique<CondBertMethod>(lm, lexicon, a.condbert));
    PromptOptions zero;
    zero.params = a.gen;
    zero.params.seed = a.seed;
    methods.push_back(std::make_unique<PromptMethod>(lm, zero));
    if (!pairs.empty()) {
        PromptOptions few = zero;
        few.mode = PromptMode::few_shot;
        few.shots = std::min<std::size_t>(few.shots, pairs.size());
        methods.push_back(std::make_unique<PromptMethod>(lm, few, &pairs));
        PromptOptions tuned = zero;
        tuned.mode = PromptMode::finetuned_sim;
        methods.push_back(std::make_unique<PromptMethod>(*ft, tuned));
    }

    std::vector<Sentence> inputs;
    for (const auto& e : split.test.entries()) inputs.push_back(tokenize(e.text));
    save_lines(split.test.texts(StyleLabel::toxic), dir / "inputs.txt");
    const EvalComponents parts{classifier, table, lm};
    const EvalOptions options{a.resamples, a.seed, a.threads};
    std::vector<EvalReport> reports;
    for (const auto& m : methods) {
        const auto outputs = transform_batch(*m, inputs, a.threads);
        std::string file = m->name();
        for (auto& c : file) c = (std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_');
        write_sentences(outputs, dir / ("out_" + file + ".txt"));
        reports.push_back(evaluate_outputs(m->name(), inputs, outputs, parts, options));
        log("evaluated " + m->name());
    }
    write_table(std::cout, reports);
    std::ostringstream table_text, records;
    write_table(table_text, reports);
    write_records(records, reports);
    write_text(dir / "report.txt", table_text.str());
    write_text(dir / "report.tsv", records.str());
    return 0;
}

void add_generation_flags(CLI::App* cmd, GenerationParams& g, bool with_seed = true) {
    cmd->add_option("--top-k", g.top_k, "Top-k filter size")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--top-p", g.top_p, "Nucleus mass in (0, 1]")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--temperature", g.temperature, "Sampling temperature (> 0)")->capture_default_str();
    cmd->add_option("--max-tokens", g.max_tokens, "Generation length limit")->capture_default_str();
    if (with_seed) cmd->add_option("--seed", g.seed, "Sampling seed")->capture_default_str();
}

void add_condbert_flags(CLI::App* cmd, CondBertConfig& c) {
    cmd->add_option("--penalty", c.penalty, "Toxicity penalty lambda")->capture_default_str();
    cmd->add_option("--beam", c.beam_width, "Beam width")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--max-length", c.max_length, "Longest multi-word replacement")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Text detoxification toolkit: baselines, condBERT, prompt-based generation and evaluation."};
    app.require_subcommand(1);

    ClassifierArgs cls;
    auto* c_cls = app.add_subcommand("train-classifier", "Train the logistic-regression toxicity classifier");
    c_cls->add_option("--corpus", cls.corpus, "Labeled corpus (header with text and label columns)")->required();
    c_cls->add_option("--format", cls.format, "tsv or csv")->capture_default_str()->check(CLI::IsMember({"tsv", "csv"}));
    c_cls->add_option("--out", cls.out, "Model output path")->required();
    c_cls->add_option("--lexicon-out", cls.lexicon_out, "Also write the extracted toxicity lexicon");
    c_cls->add_option("--manual-words", cls.manual, "Extra toxic words, one per line");
    c_cls->add_option("--threshold", cls.threshold, "Lexicon weight threshold (default: top fraction)");
    c_cls->add_option("--top-fraction", cls.top_fraction, "Fraction of the vocabulary admitted to the lexicon")
        ->capture_default_str();
    c_cls->add_option("--holdout", cls.holdout, "Fraction held out for F1")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    c_cls->add_option("--lr", cls.train.learning_rate, "Learning rate")->capture_default_str();
    c_cls->add_option("--epochs", cls.train.epochs, "Gradient steps")->capture_default_str();
    c_cls->add_option("--l2", cls.train.l2, "L2 strength")->capture_default_str();
    c_cls->add_option("--min-count", cls.train.min_count, "Vocabulary frequency cut-off")->capture_default_str();
    c_cls->add_option("--seed", cls.train.seed, "Hold-out seed")->capture_default_str();

    std::string lm_corpus, lm_out, lm_format = "tsv";
    std::size_t lm_order = 3;
    double lm_alpha = 0.1;
    auto* c_lm = app.add_subcommand("train-lm", "Train the style-conditioned n-gram language model");
    c_lm->add_option("--corpus", lm_corpus, "Labeled corpus")->required();
    c_lm->add_option("--format", lm_format, "tsv or csv")->capture_default_str()->check(CLI::IsMember({"tsv", "csv"}));
    c_lm->add_option("--out", lm_out, "Model output path")->required();
    c_lm->add_option("--order", lm_order, "n-gram order")->capture_default_str();
    c_lm->add_option("--alpha", lm_alpha, "Add-alpha smoothing")->capture_default_str();

    std::string idx_corpus, idx_emb, idx_out, idx_format = "tsv";
    auto* c_idx = app.add_subcommand("build-index", "Index the neutral sentences of a corpus for Retrieve");
    c_idx->add_option("--corpus", idx_corpus, "Labeled corpus")->required();
    c_idx->add_option("--format", idx_format, "tsv or csv")->capture_default_str()->check(CLI::IsMember({"tsv", "csv"}));
    c_idx->add_option("--embeddings", idx_emb, "Word vectors in text format")->required();
    c_idx->add_option("--out", idx_out, "Index output path")->required();

    std::string sp_corpus, sp_train, sp_test, sp_format = "tsv";
    SplitSpec sp;
    auto* c_split = app.add_subcommand("split", "Draw a toxic-only test set");
    c_split->add_option("--corpus", sp_corpus, "Labeled corpus")->required();
    c_split->add_option("--format", sp_format, "tsv or csv")->capture_default_str()->check(CLI::IsMember({"tsv", "csv"}));
    c_split->add_option("--test-size", sp.test_size, "Number of toxic test sentences")->required();
    c_split->add_option("--seed", sp.seed, "Sampling seed")->capture_default_str();
    c_split->add_option("--train-out", sp_train, "Train split output")->required();
    c_split->add_option("--test-out", sp_test, "Test split output")->required();

    std::string ft_pairs, ft_out;
    auto* c_ft = app.add_subcommand("finetune-records", "Write fine-tuning records, one per line");
    c_ft->add_option("--pairs", ft_pairs, "Parallel corpus (source TAB target)")->required();
    c_ft->add_option("--out", ft_out, "Records output path")->required();

    DetoxArgs dx;
    auto* c_dx = app.add_subcommand("detox", "Detoxify one sentence per line");
    c_dx->add_option("--method", dx.method, "Method")
        ->required()
        ->check(CLI::IsMember({"duplicate", "delete", "retrieve", "condbert", "prompt-zero", "prompt-few", "prompt-ft"}));
    c_dx->add_option("--input", dx.input, "Input sentences")->required();
    c_dx->add_option("--output", dx.output, "Output sentences")->required();
    c_dx->add_option("--lexicon", dx.lexicon, "Toxicity lexicon (delete, condbert)");
    c_dx->add_option("--lemmas", dx.lemmas, "Lemma table surface TAB lemma (delete)");
    c_dx->add_option("--index", dx.index, "Retrieve index");
    c_dx->add_option("--embeddings", dx.embeddings, "Word vectors (retrieve)");
    c_dx->add_option("--lm", dx.lm, "n-gram model (condbert, prompt-*)");
    c_dx->add_option("--pairs", dx.pairs, "Parallel corpus (prompt-few)");
    c_dx->add_option("--style", dx.condbert_style, "condBERT fill-in style: neutral or any")
        ->capture_default_str()
        ->check(CLI::IsMember({"neutral", "any", "toxic"}));
    c_dx->add_flag("--soft-penalty", dx.soft_penalty, "Penalize lexicon words instead of banning them");
    add_condbert_flags(c_dx, dx.condbert);
    add_generation_flags(c_dx, dx.gen);
    c_dx->add_option("--shots", dx.shots, "Few-shot example count")->capture_default_str();
    c_dx->add_option("--prompt-style", dx.prompt_style, "Count table used for generation")
        ->capture_default_str()
        ->check(CLI::IsMember({"neutral", "any", "toxic"}));
    c_dx->add_option("--threads", dx.threads, "Worker threads (0 = all cores)")->capture_default_str();

    EvaluateArgs ev;
    auto* c_ev = app.add_subcommand("evaluate", "Score aligned output files against their inputs");
    c_ev->add_option("--inputs", ev.inputs, "Input sentences")->required();
    c_ev->add_option("--output", ev.outputs, "NAME=PATH of an output file (repeatable)")->required();
    c_ev->add_option("--classifier", ev.classifier, "Classifier model")->required();
    c_ev->add_option("--embeddings", ev.embeddings, "Word vectors")->required();
    c_ev->add_option("--lm", ev.lm, "Scoring n-gram model")->required();
    c_ev->add_option("--overlap", ev.overlap, "WO semantics: set or multiset")
        ->capture_default_str()
        ->check(CLI::IsMember({"set", "multiset"}));
    c_ev->add_option("--resamples", ev.options.resamples, "Bootstrap resamples")->capture_default_str();
    c_ev->add_option("--seed", ev.options.seed, "Bootstrap seed")->capture_default_str();
    c_ev->add_option("--table-out", ev.table_out, "Write the aligned table here");
    c_ev->add_option("--records-out", ev.records_out, "Write key=value records here");

    DemoArgs demo;
    auto* c_demo = app.add_subcommand("make-demo", "Write a synthetic corpus, pairs, embeddings and word list");
    c_demo->add_option("--out-dir", demo.out_dir, "Output directory")->required();
    c_demo->add_option("--neutral", demo.neutral, "Neutral sentences")->capture_default_str();
    c_demo->add_option("--toxic", demo.toxic, "Toxic sentences")->capture_default_str();
    c_demo->add_option("--pairs", demo.pairs, "Parallel pairs")->capture_default_str();
    c_demo->add_option("--dim", demo.dim, "Embedding dimension")->capture_default_str();
    c_demo->add_option("--min-fillers", demo.min_fillers, "Shortest filler run")->capture_default_str();
    c_demo->add_option("--max-fillers", demo.max_fillers, "Longest filler run")->capture_default_str();
    c_demo->add_option("--seed", demo.seed, "Generator seed")->capture_default_str();

    PipelineArgs pl;
    auto* c_pl = app.add_subcommand("pipeline", "Train everything, run every method and evaluate");
    c_pl->add_option("--corpus", pl.corpus, "Labeled corpus")->required();
    c_pl->add_option("--format", pl.format, "tsv or csv")->capture_default_str()->check(CLI::IsMember({"tsv", "csv"}));
    c_pl->add_option("--embeddings", pl.embeddings, "Word vectors")->required();
    c_pl->add_option("--pairs", pl.pairs, "Parallel corpus for few-shot and fine-tuned prompting");
    c_pl->add_option("--manual-words", pl.manual, "Extra toxic words, one per line");
    c_pl->add_option("--work-dir", pl.work_dir, "Directory for artifacts and reports")->capture_default_str();
    c_pl->add_option("--test-size", pl.test_size, "Toxic test sentences")->capture_default_str();
    c_pl->add_option("--order", pl.order, "n-gram order")->capture_default_str();
    c_pl->add_option("--alpha", pl.alpha, "Add-alpha smoothing")->capture_default_str();
    c_pl->add_option("--seed", pl.seed, "Master seed (split and bootstrap)")->capture_default_str();
    c_pl->add_option("--resamples", pl.resamples, "Bootstrap resamples")->capture_default_str();
    c_pl->add_option("--threads", pl.threads, "Worker threads (0 = all cores)")->capture_default_str();
    add_condbert_flags(c_pl, pl.condbert);
    add_generation_flags(c_pl, pl.gen, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ErrorKind::data);
    }

    try {
        if (*c_cls) return train_classifier(cls);
        if (*c_lm) {
            NgramLm::train(load_labeled_corpus(lm_corpus, parse_format(lm_format)), lm_order, lm_alpha).save(lm_out);
            return 0;
        }
        if (*c_idx) {
            const auto table = EmbeddingTable::load(idx_emb);
            for (const auto& w : table.warnings()) log(w);
            const auto index = RetrieveIndex::build(load_labeled_corpus(idx_corpus, parse_format(idx_format)), table);
            index.save(idx_out);
            std::printf("indexed %zu neutral sentences\n", index.size());
            return 0;
        }
        if (*c_split) {
            const auto s = split_corpus(load_labeled_corpus(sp_corpus, parse_format(sp_format)), sp);
            save_labeled_corpus(s.train, sp_train);
            save_labeled_corpus(s.test, sp_test);
            std::printf("train %zu, test %zu\n", s.train.size(), s.test.size());
            return 0;
        }
        if (*c_ft) {
            const auto pairs = load_parallel_corpus(ft_pairs);
            validate(PromptTemplate{}, pairs);
            save_lines(build_finetune_records(pairs), ft_out);
            return 0;
        }
        if (*c_dx) return run_detox(dx);
        if (*c_ev) return run_evaluate(ev);
        if (*c_demo) return make_demo(demo);
        if (*c_pl) return run_pipeline(pl);
    } catch (const Error& e) {
        log(std::string("error: ") + e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        log(std::string("error: ") + e.what());
        return static_cast<int>(ErrorKind::data);
    }
    return 0;
}
