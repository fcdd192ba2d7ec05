// Runs every acceptance criterion and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "leakcred/analytics.hpp"
#include "leakcred/annotation.hpp"
#include "leakcred/chronology.hpp"
#include "leakcred/cli.hpp"
#include "leakcred/credibility.hpp"
#include "leakcred/entity.hpp"
#include "leakcred/similarity.hpp"
#include "support.hpp"

using namespace leakcred;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- 1 ------------------------------------------------------------------

Verdict aggregation() {
    Verdict v;
    support::Rng rng(101);
    std::vector<std::vector<TimestampEstimate>> lists(10'000);
    for (auto& l : lists) {
        l.resize(support::uniform(rng, 1, 16));
        for (std::size_t k = 0; k < l.size(); ++k) {
            l[k].url = "https://x.example/";
            l[k].estimator_id = "e" + std::to_string(k);
            l[k].time = make_timestamp(2010, 1, 1) + std::chrono::seconds(support::uniform(rng, 0, 400'000'000));
        }
    }
    const auto t0 = Clock::now();
    for (const auto& l : lists) {
        const auto got = aggregate(l);
        Timestamp best = l[0].time;
        for (const auto& e : l)
            if (e.time < best) best = e.time;
        v.require(got && got->time == best, "aggregate differs from brute-force minimum");
    }
    const double s = seconds_since(t0);
    v.require(s < 1.0, "took " + fmt("%.3f s", s));
    if (v.pass) v.detail = "10000 lists, " + fmt("%.3f s", s);
    return v;
}

// ---- 2 ------------------------------------------------------------------

TruthAssignment claim(const std::string& key, bool t) {
    return TruthAssignment{"blog", key, t ? 1 : 0, t ? 0 : 1, make_timestamp(2018, 1, 1), make_timestamp(2018, 2, 1)};
}

Verdict score_bounds() {
    Verdict v;
    support::Rng rng(202);
    for (int round = 0; round < 200; ++round) {
        const int n = support::uniform(rng, 1, 1000);
        CredibilityLedger l("blog");
        std::map<std::string, bool> truth;
        for (int i = 0; i < n * 2; ++i) {
            const auto key = "p" + std::to_string(support::uniform(rng, 0, n - 1));
            const bool t = support::uniform(rng, 0, 1);
            truth[key] = t;
            l.update(claim(key, t));
        }
        // Batch oracle in plain integers.
        long long sum = 0;
        for (const auto& [k, t] : truth) sum += t ? 1 : -2;
        const Score s = l.score();
        v.require(s.sum == sum && s.n == truth.size(), "incremental (sum, n) differs from batch");
        v.require(s == l.recompute(), "recompute differs");
        v.require(s.sum >= -2 * static_cast<long long>(s.n) && s.sum <= static_cast<long long>(s.n),
                  "score outside [-2, 1]");
    }
    if (v.pass) v.detail = "200 random ledgers, exact (sum, n) match";
    return v;
}

// ---- 3 ------------------------------------------------------------------

std::vector<AnnotationRecord> annotator(const std::string& who, const std::vector<int>& verdicts) {
    std::vector<AnnotationRecord> out;
    for (std::size_t i = 0; i < verdicts.size(); ++i)
        out.push_back({"h" + std::to_string(i), who, verdicts[i], std::nullopt});
    return out;
}

Verdict kappa_checks() {
    Verdict v;
    const auto r = kappa(annotator("a", {1, 1, 1, 0}), annotator("b", {1, 1, 0, 0}));
    v.require(r.pr_a == 0.75 && r.pr_e == 0.5 && r.kappa == 0.5, "hand case differs");
    support::Rng rng(303);
    for (int i = 0; i < 1000; ++i) {
        const int n = support::uniform(rng, 2, 60);
        std::vector<int> x(n), y(n);
        for (auto& e : x) e = support::uniform(rng, 0, 1);
        for (auto& e : y) e = support::uniform(rng, 0, 1);
        x[0] = 0;
        x[1] = 1;
        const auto a = annotator("a", x);
        const auto b = annotator("b", y);
        v.require(kappa(a, b).kappa == kappa(b, a).kappa, "kappa not symmetric");
        v.require(kappa(a, a).kappa == 1.0, "kappa(x, x) != 1");
    }
    if (v.pass) v.detail = "hand case exact, 1000 random pairs";
    return v;
}

// ---- 4, 9 ---------------------------------------------------------------

std::string demo(const std::string& name) { return (support::demo_dir() / name).string(); }

std::vector<std::string> demo_pipeline(const fs::path& work) {
    return {"pipeline",       "--leaks",       demo("leaks.jsonl"),   "--press-releases",
            demo("press_releases.jsonl"),      "--gazetteer",         demo("gazetteer.tsv"),
            "--templates",    demo("templates.txt"),                  "--fixtures",
            demo("fixtures.tsv"),              "--lexicon",           demo("lexicon.tsv"),
            "--annotations",  demo("annotations.csv"),                "--work-dir",
            work.string()};
}

int run_quiet(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

Verdict first_appearance_replay() {
    Verdict v;
    support::TempDir dir;
    const auto t0 = Clock::now();
    const int code = run_quiet(demo_pipeline(dir / "work"));
    const double s = seconds_since(t0);
    v.require(code == 0, "pipeline exit code " + std::to_string(code));
    if (!v.pass) return v;
    const auto ledger = load_ledger(ledger_path(dir / "work" / "ledgers", "androidpolice"));
    const std::pair<const char*, std::pair<const char*, const char*>> expected[] = {
        {"galaxy s10", {"2018-07-07T07:54:44Z", "2019-02-20T08:59:56Z"}},
        {"galaxy s9", {"2017-12-15T04:55:38Z", "2018-02-25T15:29:23Z"}},
        {"galaxy s8", {"2017-01-31T09:22:28Z", "2017-02-25T13:54:13Z"}},
    };
    for (const auto& [key, times] : expected) {
        const auto it = ledger.entries().find(key);
        v.require(it != ledger.entries().end() && it->second.t == 1 && it->second.f == 0,
                  std::string("no t=1 entry for ") + key);
    }
    // The truth file must carry the first-appearance pairs as dated.
    const auto truth = load_truth(dir / "work" / "truth.csv");
    for (const auto& [key, times] : expected) {
        const bool found = std::any_of(truth.begin(), truth.end(), [&](const TruthAssignment& a) {
            return a.blog == "androidpolice" && a.product_key == key &&
                   a.first_leak_time == parse_rfc3339(times.first) &&
                   a.first_pr_time == parse_rfc3339(times.second);
        });
        v.require(found, std::string("first appearance pair differs for ") + key);
    }
    v.require(ledger.score().value() > 0.0, "score not positive");
    v.require(s < 5.0, "pipeline took " + fmt("%.2f s", s));
    if (v.pass) v.detail = "score " + render_score(ledger.score()) + ", " + fmt("%.2f s", s);
    return v;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = support::read_file(e.path());
    return files;
}

Verdict determinism() {
    Verdict v;
    support::TempDir dir;
    v.require(run_quiet(demo_pipeline(dir / "a")) == 0 && run_quiet(demo_pipeline(dir / "b")) == 0,
              "pipeline failed");
    if (!v.pass) return v;
    const auto a = snapshot(dir / "a");
    const auto b = snapshot(dir / "b");
    v.require(a.size() >= 9, "missing artifacts");
    v.require(a == b, "artifacts differ between runs");
    if (v.pass) v.detail = std::to_string(a.size()) + " artifacts byte-identical";
    return v;
}

// ---- 5, 6 ---------------------------------------------------------------

const std::vector<std::string> kTemplates = {
    "XXX release date, specs and price",
    "First look at the XXX",
    "Hands on with the XXX camera",
    "XXX leaked with slim bezels",
    "Renders show XXX in three colors",
    "XXX spotted on Geekbench with 8GB RAM",
    "Here is our best look yet at XXX",
    "XXX battery capacity confirmed by certification",
    "Retail box of XXX surfaces online",
    "XXX appears in benchmark listing",
    "Case maker reveals design of XXX",
    "XXX gets FCC approval ahead of launch",
    "Carrier listing points to XXX pricing",
    "XXX firmware hints at dual SIM support",
    "Photos of XXX prototype surface in China",
    "XXX passes through TENAA with full specs",
    "Screen protector confirms notch on XXX",
    "XXX pricing in Europe revealed",
    "Dummy units show off XXX from all sides",
    "XXX may arrive sooner than expected",
};

std::vector<std::string> product_names() {
    const std::vector<std::string> brands{"Galaxy", "Pixel", "iPhone", "Xperia", "Moto",
                                          "Mate", "OnePlus", "Redmi", "Nokia", "Zenfone"};
    const std::vector<std::string> suffixes{"", " Pro", " Lite", " Max", ""};
    std::vector<std::string> names;
    for (int i = 0; i < 50; ++i) {
        const char letter = static_cast<char>('A' + (i * 7) % 26);
        names.push_back(brands[i % 10] + " " + letter + std::to_string(10 + i) + suffixes[i % 5]);
    }
    return names;
}

Gazetteer gazetteer_of(const std::vector<std::string>& names, std::size_t from, std::size_t to) {
    Gazetteer g;
    for (std::size_t i = from; i < to; ++i) g.add(names[i], (i % 2 ? "Alpha_sp" : "Beta_sp"));
    return g;
}

Verdict gazetteer_consistency() {
    Verdict v;
    const auto names = product_names();
    const auto g = gazetteer_of(names, 0, names.size());
    std::vector<Template> templates;
    for (const auto& t : kTemplates) templates.push_back(Template::make(t));
    const auto examples = expand_templates(templates, g);
    v.require(examples.size() == 1000, "expected 1000 synthetic headlines");
    const PatternSet none;
    const Recognizer r(g, none);
    std::size_t gold = 0, predicted = 0, hit = 0;
    for (const auto& ex : examples) {
        const auto spans = r.recognize(ex.id, ex.text);
        gold += ex.gold.size();
        predicted += spans.size();
        for (const auto& s : spans)
            for (const auto& gs : ex.gold)
                if (s.start == gs.start && s.end == gs.end && s.label == gs.label) ++hit;
    }
    const double recall = static_cast<double>(hit) / gold;
    const double precision = predicted ? static_cast<double>(hit) / predicted : 0.0;
    v.require(recall == 1.0 && precision == 1.0,
              "recall " + fmt("%.4f", recall) + ", precision " + fmt("%.4f", precision));
    if (v.pass) v.detail = "1000 headlines, recall 1, precision 1";
    return v;
}

Verdict novel_names() {
    Verdict v;
    const auto names = product_names();
    const Gazetteer train_names = gazetteer_of(names, 0, 25);
    const Gazetteer held_out = gazetteer_of(names, 25, 50);
    std::vector<Template> seen;
    for (std::size_t i = 0; i < 10; ++i) seen.push_back(Template::make(kTemplates[i]));

    const auto t0 = Clock::now();
    const auto patterns = learn_patterns(expand_templates(seen, train_names));
    const Recognizer r(train_names, patterns);

    // 10^4 headlines drawn from seen templates and held-out names.
    const auto pool = expand_templates(seen, held_out);
    support::Rng rng(606);
    std::size_t hit = 0;
    const std::size_t total = 10'000;
    for (std::size_t i = 0; i < total; ++i) {
        const auto& ex = pool[support::uniform(rng, 0, int(pool.size()) - 1)];
        const auto& g = ex.gold.front();
        for (const auto& s : r.recognize(ex.id, ex.text))
            if (s.start == g.start && s.end == g.end) ++hit;
    }
    const double s = seconds_since(t0);
    const double recall = static_cast<double>(hit) / total;
    v.require(recall >= 0.80, "recall " + fmt("%.4f", recall));
    v.require(s < 30.0, "took " + fmt("%.2f s", s));
    v.detail = "recall " + fmt("%.4f", recall) + " on 10000 headlines, " + fmt("%.2f s", s);
    return v;
}

// ---- 7 ------------------------------------------------------------------

Verdict similarity_threshold() {
    Verdict v;
    const std::vector<std::string> a{"galaxy", "s10"}, b{"galaxy", "s10", "5g"};
    const auto r = jaccard_ratio(a, b);
    v.require(r.num == 2 && r.den == 3 && r.value() == 2.0 / 3.0, "Jaccard is not 2/3");
    support::Rng rng(707);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> scores(support::uniform(rng, 1, 200));
        for (auto& x : scores) x = u(rng);
        const double p = 0.1 + u(rng) * 99.8;
        auto sorted = scores;
        std::sort(sorted.begin(), sorted.end());
        // Smallest value with at least p% of the list at or below it.
        double oracle = sorted.back();
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            if (100.0 * static_cast<double>(k + 1) >= p * static_cast<double>(sorted.size()) - 1e-9) {
                oracle = sorted[k];
                break;
            }
        }
        v.require(percentile_threshold(scores, p) == oracle, "nearest rank differs from oracle");
    }
    if (v.pass) v.detail = "2/3 exact, 1000 random lists";
    return v;
}

// ---- 8 ------------------------------------------------------------------

Verdict analytics_oracle() {
    Verdict v;
    support::Rng rng(808);
    const std::vector<std::string> vocab{"Galaxy", "S10", "leak", "shows", "new", "design", "for",
                                         "the", "Pixel", "3", "XL", "gets", "5G", "in", "2019"};
    for (int round = 0; round < 20; ++round) {
        Corpus c;
        std::vector<double> lengths;
        const int n = support::uniform(rng, 1, 10'000);
        for (int i = 0; i < n; ++i) {
            const int len = support::uniform(rng, 1, 25);
            std::string text;
            for (int k = 0; k < len; ++k) text += vocab[support::uniform(rng, 0, int(vocab.size()) - 1)] + " ";
            c.add(Headline{"", "blog", HeadlineKind::leak, "https://x.example/" + std::to_string(i), text, {}, {}});
            lengths.push_back(len);
        }
        double sum = 0;
        for (double l : lengths) sum += l;
        const double mean = sum / n;
        double var = 0;
        for (double l : lengths) var += (l - mean) * (l - mean);
        const double sd = std::sqrt(var / n);
        std::sort(lengths.begin(), lengths.end());
        const double median = n % 2 ? lengths[n / 2] : (lengths[n / 2 - 1] + lengths[n / 2]) / 2;
        const auto s = length_stats(c, HeadlineKind::leak);
        auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
        v.require(close(s.mean, mean) && close(s.std_dev, sd) && close(s.median, median),
                  "length statistics differ from naive recomputation");
    }

    const auto lexicon = ValenceLexicon::load(demo("lexicon.tsv"));
    Corpus fixture;
    const char* prs[] = {"Samsung unveils the amazing Galaxy S10 with a great display",
                         "The best Galaxy camera yet, reimagined",
                         "Innovative Galaxy S9 brings an amazing experience"};
    const char* leaks[] = {"Galaxy S10 render shows three cameras", "Galaxy S9 spec sheet surfaces",
                           "Galaxy S8 photo appears online"};
    int i = 0;
    for (const char* t : prs)
        fixture.add(Headline{"", "maker", HeadlineKind::press_release, "https://m.example/" + std::to_string(i++), t, {}, {}});
    for (const char* t : leaks)
        fixture.add(Headline{"", "blog", HeadlineKind::leak, "https://b.example/" + std::to_string(i++), t, {}, {}});
    const auto report = sentiment_mean(fixture, lexicon);
    const double pr = report.per_kind_mean.at("press_release");
    const double leak = report.per_kind_mean.at("leak");
    v.require(pr > leak, "press-release mean " + fmt("%.4f", pr) + " not above leak mean " + fmt("%.4f", leak));
    if (v.pass) v.detail = "20 random corpora; sentiment press_release " + fmt("%.4f", pr) + " > leak " + fmt("%.4f", leak);
    return v;
}

// ---- 10 -----------------------------------------------------------------

Verdict persistence() {
    Verdict v;
    support::TempDir dir;
    support::Rng rng(1010);
    for (int round = 0; round < 1000; ++round) {
        CredibilityLedger l("blog-" + std::to_string(round % 7));
        const int steps = support::uniform(rng, 0, 40);
        for (int i = 0; i < steps; ++i) {
            TruthAssignment a = claim("product " + std::to_string(support::uniform(rng, 0, 15)), support::uniform(rng, 0, 1));
            a.blog = l.blog();
            a.first_leak_time = make_timestamp(2015, 1, 1) + std::chrono::seconds(support::uniform(rng, 0, 300'000'000));
            if (support::uniform(rng, 0, 3)) a.first_pr_time = make_timestamp(2015, 1, 1) + std::chrono::seconds(support::uniform(rng, 0, 300'000'000));
            else a.first_pr_time.reset();
            l.update(a);
        }
        const auto path = dir / ("l" + std::to_string(round) + ".json");
        persist(l, path);
        v.require(load_ledger(path) == l, "round-trip differs");
    }

    CredibilityLedger l("blog");
    l.update(claim("a", true));
    l.update(claim("b", false));
    persist(l, dir / "good.json");
    const auto good = support::read_file(dir / "good.json");
    std::vector<std::string> corrupt{"", "{}", "null", good.substr(0, good.size() - 3)};
    for (std::size_t cut = 1; cut < good.size(); cut += 37) corrupt.push_back(good.substr(0, cut));
    auto edit = [&](const std::string& from, const std::string& to) {
        auto s = good;
        if (auto pos = s.find(from); pos != std::string::npos) s.replace(pos, from.size(), to);
        return s;
    };
    corrupt.push_back(edit("\"sum\": -1", "\"sum\": 1"));
    corrupt.push_back(edit("\"f\": 1", "\"f\": 7"));
    corrupt.push_back(edit("\"new_false\"", "\"new_true\""));
    std::size_t rejected = 0;
    for (const auto& c : corrupt) {
        support::write_file(dir / "bad.json", c);
        try {
            load_ledger(dir / "bad.json");
        } catch (const std::exception&) {
            ++rejected;
        }
    }
    v.require(rejected == corrupt.size(),
              std::to_string(corrupt.size() - rejected) + " corrupt file(s) loaded");
    if (v.pass) v.detail = "1000 round-trips exact, " + std::to_string(corrupt.size()) + " corrupt files rejected";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"1 aggregation equals brute-force minimum", aggregation},
        {"2 score bounds and incremental exactness", score_bounds},
        {"3 kappa hand case, symmetry, self agreement", kappa_checks},
        {"4 first-appearance replay on demo data", first_appearance_replay},
        {"5 gazetteer self-consistency", gazetteer_consistency},
        {"6 novel-name fallback recall", novel_names},
        {"7 Jaccard and nearest-rank threshold", similarity_threshold},
        {"8 length statistics and sentiment direction", analytics_oracle},
        {"9 pipeline determinism", determinism},
        {"10 ledger persistence and corrupt files", persistence},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << name;
        if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
        std::cout << '\n';
        failed += !v.pass;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
