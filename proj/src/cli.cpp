#include "leakcred/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leakcred/analytics.hpp"
#include "leakcred/annotation.hpp"
#include "leakcred/chronology.hpp"
#include "leakcred/corpus.hpp"
#include "leakcred/credibility.hpp"
#include "leakcred/entity.hpp"
#include "leakcred/error.hpp"
#include "leakcred/matching.hpp"

namespace leakcred::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void PipelineConfig::validate() const {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw InvalidArgument("--threshold must lie in (0, 1]");
    if (!(percentile > 0.0 && percentile < 100.0))
        throw InvalidArgument("--percentile must lie in (0, 100)");
    if (!parse_metric(metric)) throw InvalidArgument("--metric must be jaccard or cosine");
    if (!parse_format(format)) throw InvalidArgument("--format must be jsonl or tsv");
    if (!(timeout_seconds > 0.0)) throw InvalidArgument("--timeout must be positive");
    if (metric == "cosine" && vectors.empty())
        throw InvalidArgument("--metric cosine needs --vectors");
}

namespace {

struct Io {
    std::ostream& out;
    std::ostream& err;
};

/// Raised for missing inputs detected after parsing.
struct UsageError : Error {
    using Error::Error;
};

std::vector<StopwordSet> stopword_sets(const PipelineConfig& c) {
    std::vector<StopwordSet> sets{builtin_general_stopwords(), seed_custom_stopwords()};
    for (const auto& p : c.stopwords) sets.push_back(StopwordSet::load(p));
    return sets;
}

std::optional<VectorTable> load_vectors(const PipelineConfig& c) {
    if (c.vectors.empty()) return std::nullopt;
    return VectorTable::load(c.vectors);
}

Duration timeout_of(const PipelineConfig& c) {
    return Duration{static_cast<Duration::rep>(c.timeout_seconds * 1000.0)};
}

void require(const fs::path& p, const char* flag) {
    if (p.empty()) throw UsageError(std::string("missing required ") + flag);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// ---- stages -------------------------------------------------------------

struct IngestInput {
    fs::path path;
    HeadlineKind kind;
};

int stage_ingest(const std::vector<IngestInput>& inputs, InputFormat format, const fs::path& out_path,
                 bool append, Io io) {
    Corpus corpus;
    if (append && fs::exists(out_path)) corpus = read_corpus(out_path);
    int code = kOk;
    for (const auto& in : inputs) {
        auto result = ingest(in.path, format, in.kind, std::move(corpus));
        corpus = std::move(result.corpus);
        for (const auto& r : result.rejected)
            io.err << in.path.string() << ":" << r.line << ": rejected: " << r.reason << '\n';
        if (result.duplicates > 0)
            io.err << in.path.string() << ": dropped " << result.duplicates << " duplicate(s)\n";
        if (!result.rejected.empty()) code = kPartial;
    }
    ensure_parent(out_path);
    write_corpus(corpus, out_path);
    return code;
}

int stage_train(const fs::path& templates, const fs::path& gazetteer_path, const fs::path& out_path,
                const fs::path& training_out, Io io) {
    const auto tmpl = load_templates(templates);
    const auto gazetteer = Gazetteer::load(gazetteer_path);
    const auto examples = expand_templates(tmpl, gazetteer);
    const auto patterns = learn_patterns(examples);
    ensure_parent(out_path);
    patterns.save(out_path);
    if (!training_out.empty()) {
        std::ofstream out(training_out, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + training_out.string());
        write_training_set(examples, out);
    }
    io.err << "generated " << examples.size() << " training headlines from " << tmpl.size()
           << " templates and " << gazetteer.size() << " names; " << patterns.size()
           << " patterns\n";
    return kOk;
}

int stage_extract(const fs::path& corpus_path, const fs::path& gazetteer_path,
                  const fs::path& patterns_path, const PipelineConfig& cfg, const fs::path& out_path,
                  Io io) {
    const auto corpus = read_corpus(corpus_path);
    const auto gazetteer = Gazetteer::load(gazetteer_path);
    const auto patterns = patterns_path.empty() ? PatternSet{} : PatternSet::load(patterns_path);
    const Recognizer recognizer(gazetteer, patterns, stopword_sets(cfg));
    const auto spans = recognize_corpus(corpus, recognizer);
    ensure_parent(out_path);
    save_spans(spans, out_path);
    io.err << spans.size() << " of " << corpus.size() << " headlines carry a product name\n";
    return kOk;
}

int stage_bin(const fs::path& corpus_path, const fs::path& spans_path, const PipelineConfig& cfg,
              const fs::path& out_path, Io io) {
    const auto corpus = read_corpus(corpus_path);
    const auto spans = load_spans(spans_path);
    const auto vectors = load_vectors(cfg);
    const Similarity sim(*parse_metric(cfg.metric), vectors ? &*vectors : nullptr);
    const auto result = bin(corpus, spans, sim, cfg.threshold, stopword_sets(cfg));
    ensure_parent(out_path);
    save_bins(result.bins, out_path);
    io.err << result.bins.size() << " bins, " << result.unbinned << " unbinned headlines\n";
    return kOk;
}

EstimatorRegistry build_registry(const PipelineConfig& cfg) {
    EstimatorRegistry registry;
    if (!cfg.estimators.empty()) registry = EstimatorRegistry::load(cfg.estimators);
    int i = 0;
    for (const auto& p : cfg.fixtures) {
        registry.add(EstimatorConfig{"fixture-" + std::to_string(++i), EstimatorKind::fixture_file,
                                     p, {}, {}});
    }
    i = 0;
    for (const auto& p : cfg.backlinks) {
        registry.add(EstimatorConfig{"backlink-" + std::to_string(++i),
                                     EstimatorKind::backlink_stub, p, {}, {}});
    }
    if (registry.empty()) throw UsageError("no estimators: give --fixtures, --backlinks or --estimators");
    return registry;
}

int stage_date(const fs::path& corpus_path, const PipelineConfig& cfg, const fs::path& out_path,
               Io io) {
    auto corpus = read_corpus(corpus_path);
    const auto registry = build_registry(cfg);
    const auto report = date_corpus(corpus, registry, timeout_of(cfg));
    ensure_parent(out_path);
    write_corpus(corpus, out_path);
    io.err << report.estimated << " headlines dated, " << report.undatable_ids.size()
           << " undatable, " << report.failures << " estimator failures\n";
    for (const auto& id : report.undatable_ids) io.err << "undatable: " << id << '\n';
    return kOk;
}

void print_score(std::ostream& out, const std::string& blog, const Score& s) {
    out << blog << '\t' << s.n << '\t' << s.sum << '\t' << render_score(s);
    if (!s.scored()) out << "\tunscored";
    out << '\n';
}

struct ScoreInputs {
    fs::path corpus;
    fs::path bins;
    fs::path truth;
    fs::path truth_out;
    fs::path events_out;
    std::vector<std::string> blogs;
};

int stage_score(const ScoreInputs& in, const PipelineConfig& cfg, const fs::path& ledger_dir, Io io) {
    std::vector<TruthAssignment> assignments;
    if (!in.truth.empty()) {
        assignments = load_truth(in.truth);
    } else if (!in.corpus.empty() || !in.bins.empty()) {
        require(in.corpus, "--corpus");
        require(in.bins, "--bins");
        const auto corpus = read_corpus(in.corpus);
        const auto bins = load_bins(in.bins);
        assignments = assign_all(bins, corpus, TruthOptions{cfg.defer_undefined});
    }
    if (!in.truth_out.empty()) {
        ensure_parent(in.truth_out);
        save_truth(assignments, in.truth_out);
    }

    std::map<std::string, std::vector<const TruthAssignment*>> by_blog;
    for (const auto& a : assignments) by_blog[a.blog].push_back(&a);

    std::vector<ScoreEvent> events;
    std::map<std::string, Score> scores;
    if (!by_blog.empty()) fs::create_directories(ledger_dir);
    for (const auto& [blog, rows] : by_blog) {
        const auto path = ledger_path(ledger_dir, blog);
        LedgerLock lock(path);
        CredibilityLedger ledger = fs::exists(path) ? load_ledger(path) : CredibilityLedger(blog);
        if (ledger.blog() != blog)
            throw Error(path.string() + " belongs to blog '" + ledger.blog() + "'");
        std::size_t deferred = 0;
        for (const auto* a : rows) {
            if (a->t + a->f == 0) {
                ++deferred;
                continue;
            }
            const auto before = ledger.audit().size();
            auto ev = ledger.update(*a);
            if (ledger.audit().size() != before) events.push_back(std::move(ev));
        }
        persist(ledger, path);
        scores[blog] = ledger.score();
        if (deferred > 0) io.err << blog << ": " << deferred << " undecided claim(s) deferred\n";
    }

    std::set<std::string> wanted(in.blogs.begin(), in.blogs.end());
    for (const auto& [blog, s] : scores) wanted.insert(blog);
    if (wanted.empty() && fs::is_directory(ledger_dir)) {
        for (const auto& entry : fs::directory_iterator(ledger_dir)) {
            const auto name = entry.path().filename().string();
            if (name.size() > 12 && name.ends_with(".ledger.json")) {
                const auto ledger = load_ledger(entry.path());
                scores[ledger.blog()] = ledger.score();
                wanted.insert(ledger.blog());
            }
        }
    }
    for (const auto& blog : wanted) {
        if (!scores.contains(blog)) {
            const auto path = ledger_path(ledger_dir, blog);
            scores[blog] = fs::exists(path) ? load_ledger(path).score() : Score{};
        }
    }
    if (wanted.empty()) print_score(io.out, "-", Score{});
    for (const auto& blog : wanted) print_score(io.out, blog, scores[blog]);

    if (!in.events_out.empty()) {
        std::ofstream out(in.events_out, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + in.events_out.string());
        for (const auto& ev : events) {
            out << json{{"blog", ev.blog},
                        {"product_key", ev.product_key},
                        {"cause", to_string(ev.cause)},
                        {"prior_score", ev.prior.value()},
                        {"new_score", ev.next.value()}}
                       .dump()
                << '\n';
        }
    }
    return kOk;
}

json stats_json(const Corpus& corpus, HeadlineKind kind) {
    const bool any = std::any_of(corpus.headlines().begin(), corpus.headlines().end(),
                                 [kind](const Headline& h) { return h.kind == kind; });
    if (!any) return nullptr;
    const auto s = length_stats(corpus, kind);
    return json{{"mean", s.mean},
                {"median", s.median},
                {"std_dev", s.std_dev},
                {"std_dev_kind", "population"},
                {"n", s.n},
                {"unit", "words"}};
}

json profile_json(const VerbProfile& p) {
    json j = json::object();
    for (auto tag : kVerbTags) j[std::string(to_string(tag))] = p.counts.at(tag);
    return j;
}

int stage_report(const fs::path& corpus_path, const PipelineConfig& cfg, const fs::path& out_path,
                 Io io) {
    const auto corpus = read_corpus(corpus_path);
    json doc;
    doc["length_stats"] = json{{"leak", stats_json(corpus, HeadlineKind::leak)},
                               {"press_release", stats_json(corpus, HeadlineKind::press_release)}};
    if (!cfg.lexicon.empty()) {
        const auto lexicon = ValenceLexicon::load(cfg.lexicon);
        const auto s = sentiment_mean(corpus, lexicon);
        doc["sentiment"] = json{{"lexicon_id", s.lexicon_id},
                                {"alpha", kSentimentAlpha},
                                {"per_source_mean", s.per_source_mean},
                                {"per_kind_mean", s.per_kind_mean}};
    } else {
        doc["sentiment"] = nullptr;
    }
    const VerbTagger tagger;
    doc["verb_profile"] = json{
        {"unit", "token"},
        {"leak", profile_json(verb_profile(corpus, tagger, HeadlineKind::leak))},
        {"press_release", profile_json(verb_profile(corpus, tagger, HeadlineKind::press_release))},
        {"all", profile_json(verb_profile(corpus, tagger))}};
    const auto text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        io.out << text;
    } else {
        ensure_parent(out_path);
        write_text(out_path, text);
    }
    return kOk;
}

struct AgreeInputs {
    std::vector<fs::path> annotations;
    fs::path spans;
    fs::path out;
};

int stage_agree(const AgreeInputs& in, const PipelineConfig& cfg, Io io) {
    if (in.annotations.empty() || in.annotations.size() > 2)
        throw UsageError("--annotations takes one or two files");
    std::vector<AnnotationRecord> all;
    std::vector<AnnotationRecord> first, second;
    if (in.annotations.size() == 2) {
        first = load_annotations(in.annotations[0]);
        second = load_annotations(in.annotations[1]);
        all = first;
        all.insert(all.end(), second.begin(), second.end());
        // The same annotator id in both files still counts as two annotators.
        for (std::size_t i = first.size(); i < all.size(); ++i) all[i].annotator += "#2";
    } else {
        all = load_annotations(in.annotations[0]);
        std::set<std::string> annotators;
        for (const auto& r : all) annotators.insert(r.annotator);
        if (annotators.size() != 2)
            throw InvalidArgument("a single annotation file must hold exactly two annotators");
        for (const auto& r : all) (r.annotator == *annotators.begin() ? first : second).push_back(r);
    }
    const auto report = kappa(first, second);
    json doc{{"n", report.n}, {"pr_a", report.pr_a}, {"pr_e", report.pr_e}, {"kappa", report.kappa}};

    if (!in.spans.empty()) {
        const auto spans = load_spans(in.spans);
        const auto vectors = load_vectors(cfg);
        const Similarity sim(*parse_metric(cfg.metric), vectors ? &*vectors : nullptr);
        const auto stops = stopword_sets(cfg);
        const auto result = evaluate(spans, all, sim, stops, cfg.threshold);
        std::vector<double> scores;
        json rows = json::array();
        for (const auto& h : result.per_headline) {
            scores.push_back(h.similarity);
            rows.push_back(json{{"headline_id", h.headline_id},
                                {"similarity", h.similarity},
                                {"correct", h.correct}});
        }
        doc["evaluation"] = json{{"metric", cfg.metric},
                                 {"threshold", cfg.threshold},
                                 {"agreed", result.agreed},
                                 {"correct", result.correct},
                                 {"accuracy", result.accuracy},
                                 {"percentile", cfg.percentile},
                                 {"percentile_threshold", percentile_threshold(scores, cfg.percentile)},
                                 {"per_headline", rows}};
    }
    const auto text = doc.dump(2) + "\n";
    if (in.out.empty()) {
        io.out << text;
    } else {
        ensure_parent(in.out);
        write_text(in.out, text);
    }
    return kOk;
}

int stage_pipeline(PipelineConfig cfg, Io io) {
    if (cfg.leak_files.empty()) throw UsageError("missing required --leaks");
    if (cfg.pr_files.empty()) throw UsageError("missing required --press-releases");
    require(cfg.gazetteer, "--gazetteer");
    const fs::path w = cfg.work_dir;
    fs::create_directories(w);
    const fs::path ledger_dir = cfg.ledger_dir.empty() ? w / "ledgers" : cfg.ledger_dir;

    // Step I: collect headlines and extract product names.
    std::vector<IngestInput> inputs;
    for (const auto& p : cfg.leak_files) inputs.push_back({p, HeadlineKind::leak});
    for (const auto& p : cfg.pr_files) inputs.push_back({p, HeadlineKind::press_release});
    int code = stage_ingest(inputs, *parse_format(cfg.format), w / "corpus.jsonl", false, io);
    fs::path patterns;
    if (!cfg.templates.empty()) {
        patterns = w / "patterns.json";
        stage_train(cfg.templates, cfg.gazetteer, patterns, {}, io);
    }
    stage_extract(w / "corpus.jsonl", cfg.gazetteer, patterns, cfg, w / "spans.json", io);
    if (!cfg.annotations.empty()) stage_agree({cfg.annotations, w / "spans.json", w / "agreement.json"}, cfg, io);

    // Step II: bin leak and press-release headlines per product.
    stage_bin(w / "corpus.jsonl", w / "spans.json", cfg, w / "bins.json", io);

    // Step III: date first appearances and score each blog.
    stage_date(w / "corpus.jsonl", cfg, w / "dated.jsonl", io);
    ScoreInputs score_in;
    score_in.corpus = w / "dated.jsonl";
    score_in.bins = w / "bins.json";
    score_in.truth_out = w / "truth.csv";
    score_in.events_out = w / "events.jsonl";
    stage_score(score_in, cfg, ledger_dir, io);

    stage_report(w / "dated.jsonl", cfg, w / "report.json", io);
    return code;
}

// ---- command line -------------------------------------------------------

void add_similarity_options(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--metric", cfg.metric, "jaccard or cosine")
        ->check(CLI::IsMember({"jaccard", "cosine"}));
    cmd->add_option("--threshold", cfg.threshold, "similarity threshold in (0, 1]");
    cmd->add_option("--vectors", cfg.vectors, "word vector file (cosine)");
}

void add_stopword_option(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--stopwords", cfg.stopwords, "extra custom stopword file(s)");
}

void add_dating_options(CLI::App* cmd, PipelineConfig& cfg) {
    cmd->add_option("--fixtures", cfg.fixtures, "url<TAB>time fixture file(s)");
    cmd->add_option("--backlinks", cfg.backlinks, "url<TAB>time backlink file(s)");
    cmd->add_option("--estimators", cfg.estimators, "estimator registry JSON");
    cmd->add_option("--timeout", cfg.timeout_seconds, "per-estimator timeout in seconds");
}

void print_error(Io io, bool json_errors, const std::string& msg, int code) {
    if (json_errors) io.err << json{{"error", msg}, {"exit_code", code}}.dump() << '\n';
    else io.err << "leakcred: " << msg << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Io io{out, err};
    PipelineConfig cfg;
    bool json_errors = false;

    CLI::App app{"Leak-blog credibility pipeline", "leakcred"};
    app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
    app.add_flag("--json-errors", json_errors, "report errors as JSON on stderr");
    app.require_subcommand(1, 1);
    app.fallthrough();

    // ingest
    fs::path in_file, out_file;
    std::string kind_name;
    bool append = false;
    auto* ingest_cmd = app.add_subcommand("ingest", "read a headline file into a corpus");
    ingest_cmd->add_option("--input", in_file, "headline file")->required();
    ingest_cmd->add_option("--kind", kind_name, "leak or press_release")
        ->required()
        ->check(CLI::IsMember({"leak", "press_release"}));
    ingest_cmd->add_option("--format", cfg.format, "jsonl or tsv")
        ->check(CLI::IsMember({"jsonl", "tsv"}));
    ingest_cmd->add_option("--out", out_file, "corpus JSONL")->required();
    ingest_cmd->add_flag("--append", append, "add to an existing corpus file");

    // train
    fs::path training_out;
    auto* train_cmd = app.add_subcommand("train", "learn context patterns from templates");
    train_cmd->add_option("--templates", cfg.templates)->required();
    train_cmd->add_option("--gazetteer", cfg.gazetteer)->required();
    train_cmd->add_option("--out", out_file, "pattern JSON")->required();
    train_cmd->add_option("--training-out", training_out, "write the synthetic training set");

    // extract
    fs::path corpus_file, patterns_file, spans_file, bins_file;
    auto* extract_cmd = app.add_subcommand("extract", "recognize product names");
    extract_cmd->add_option("--corpus", corpus_file)->required();
    extract_cmd->add_option("--gazetteer", cfg.gazetteer)->required();
    extract_cmd->add_option("--patterns", patterns_file);
    extract_cmd->add_option("--out", out_file, "span JSON")->required();
    add_stopword_option(extract_cmd, cfg);

    // bin
    auto* bin_cmd = app.add_subcommand("bin", "group headlines per product");
    bin_cmd->add_option("--corpus", corpus_file)->required();
    bin_cmd->add_option("--spans", spans_file)->required();
    bin_cmd->add_option("--out", out_file, "bin JSON")->required();
    add_similarity_options(bin_cmd, cfg);
    add_stopword_option(bin_cmd, cfg);

    // date
    auto* date_cmd = app.add_subcommand("date", "estimate first appearance of every URL");
    date_cmd->add_option("--corpus", corpus_file)->required();
    date_cmd->add_option("--out", out_file, "dated corpus JSONL")->required();
    add_dating_options(date_cmd, cfg);

    // score
    ScoreInputs score_in;
    fs::path ledger_dir;
    auto* score_cmd = app.add_subcommand("score", "update and print blog credibility scores");
    score_cmd->add_option("--ledger-dir", ledger_dir)->required();
    score_cmd->add_option("--corpus", score_in.corpus, "dated corpus");
    score_cmd->add_option("--bins", score_in.bins);
    score_cmd->add_option("--truth", score_in.truth, "truth CSV instead of corpus and bins");
    score_cmd->add_option("--truth-out", score_in.truth_out);
    score_cmd->add_option("--events-out", score_in.events_out);
    score_cmd->add_option("--blog", score_in.blogs, "blog(s) to print");
    score_cmd->add_flag("--defer-undefined", cfg.defer_undefined,
                        "leave leaks without a press release undecided");

    // report
    auto* report_cmd = app.add_subcommand("report", "corpus analytics as JSON");
    report_cmd->add_option("--corpus", corpus_file)->required();
    report_cmd->add_option("--lexicon", cfg.lexicon, "word<TAB>valence file");
    report_cmd->add_option("--out", out_file);

    // agree
    AgreeInputs agree_in;
    auto* agree_cmd = app.add_subcommand("agree", "inter-annotator agreement and NER accuracy");
    agree_cmd->add_option("--annotations", agree_in.annotations)->required();
    agree_cmd->add_option("--spans", agree_in.spans, "predicted spans to evaluate");
    agree_cmd->add_option("--percentile", cfg.percentile);
    agree_cmd->add_option("--out", agree_in.out);
    add_similarity_options(agree_cmd, cfg);
    add_stopword_option(agree_cmd, cfg);

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "run every stage in order");
    pipe_cmd->add_option("--leaks", cfg.leak_files)->required();
    pipe_cmd->add_option("--press-releases", cfg.pr_files)->required();
    pipe_cmd->add_option("--format", cfg.format)->check(CLI::IsMember({"jsonl", "tsv"}));
    pipe_cmd->add_option("--gazetteer", cfg.gazetteer)->required();
    pipe_cmd->add_option("--templates", cfg.templates);
    pipe_cmd->add_option("--lexicon", cfg.lexicon);
    pipe_cmd->add_option("--annotations", cfg.annotations);
    pipe_cmd->add_option("--percentile", cfg.percentile);
    pipe_cmd->add_option("--work-dir", cfg.work_dir);
    pipe_cmd->add_option("--ledger-dir", cfg.ledger_dir);
    pipe_cmd->add_flag("--defer-undefined", cfg.defer_undefined);
    add_similarity_options(pipe_cmd, cfg);
    add_stopword_option(pipe_cmd, cfg);
    add_dating_options(pipe_cmd, cfg);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        json_errors = json_errors || std::find(args.begin(), args.end(), "--json-errors") != args.end();
        print_error(io, json_errors, e.what(), kUsage);
        return kUsage;
    }

    try {
        cfg.validate();
        if (ingest_cmd->parsed()) {
            return stage_ingest({{in_file, *parse_kind(kind_name)}}, *parse_format(cfg.format),
                                out_file, append, io);
        }
        if (train_cmd->parsed())
            return stage_train(cfg.templates, cfg.gazetteer, out_file, training_out, io);
        if (extract_cmd->parsed())
            return stage_extract(corpus_file, cfg.gazetteer, patterns_file, cfg, out_file, io);
        if (bin_cmd->parsed()) return stage_bin(corpus_file, spans_file, cfg, out_file, io);
        if (date_cmd->parsed()) return stage_date(corpus_file, cfg, out_file, io);
        if (score_cmd->parsed()) return stage_score(score_in, cfg, ledger_dir, io);
        if (report_cmd->parsed()) return stage_report(corpus_file, cfg, out_file, io);
        if (agree_cmd->parsed()) return stage_agree(agree_in, cfg, io);
        if (pipe_cmd->parsed()) return stage_pipeline(cfg, io);
    } catch (const UsageError& e) {
        print_error(io, json_errors, e.what(), kUsage);
        return kUsage;
    } catch (const InvalidArgument& e) {
        print_error(io, json_errors, e.what(), kUsage);
        return kUsage;
    } catch (const std::exception& e) {
        print_error(io, json_errors, e.what(), kFatal);
        return kFatal;
    }
    return kUsage;
}

}  // namespace leakcred::cli
