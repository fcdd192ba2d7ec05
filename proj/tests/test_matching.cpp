#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "leakcred/matching.hpp"
#include "support.hpp"

using namespace leakcred;

namespace {

const std::vector<StopwordSet>& stops() {
    static const std::vector<StopwordSet> s{builtin_general_stopwords(), seed_custom_stopwords()};
    return s;
}

struct Fixture {
    Corpus corpus;
    SpanTable spans;

    void add(const std::string& id, const std::string& source, HeadlineKind kind, const std::string& surface,
             std::optional<Timestamp> t = std::nullopt, const std::string& label = "Samsung_sp") {
        corpus.add(Headline{id, source, kind, "https://x.example/" + id, surface + " news", t, {}});
        spans[id].push_back(EntitySpan{id, 0, surface.size(), surface, label, SpanOrigin::gazetteer});
    }
};

BinningResult run_bin(const Fixture& f, double threshold = 0.5) {
    return bin(f.corpus, f.spans, Similarity(Metric::jaccard), threshold, stops());
}

ProductBin product(const std::string& key, std::vector<std::string> leaks, std::vector<std::string> prs) {
    return ProductBin{key, "Samsung_sp", std::move(leaks), std::move(prs)};
}

}  // namespace

TEST_CASE("similar surfaces share a bin") {
    Fixture f;
    f.add("l1", "ap", HeadlineKind::leak, "Galaxy S10");
    f.add("p1", "samsung", HeadlineKind::press_release, "Galaxy S10 5G");
    f.add("l2", "ap", HeadlineKind::leak, "iPhone XR", std::nullopt, "Apple_sp");
    const auto r = run_bin(f);
    REQUIRE(r.bins.size() == 2);
    CHECK(r.bins[0].product_key == "galaxy s10");
    CHECK(r.bins[0].leak_ids == std::vector<std::string>{"l1"});
    CHECK(r.bins[0].pr_ids == std::vector<std::string>{"p1"});
    CHECK(r.bins[1].product_key == "iphone xr");
    CHECK(r.bins[1].label == "Apple_sp");
    CHECK(r.unbinned == 0);
}

TEST_CASE("empty corpus gives no bins") {
    CHECK(run_bin(Fixture{}).bins.empty());
}

TEST_CASE("headlines without spans are unbinned") {
    Fixture f;
    f.add("l1", "ap", HeadlineKind::leak, "Galaxy S10");
    f.corpus.add(Headline{"l2", "ap", HeadlineKind::leak, "https://x.example/l2", "nothing here", {}, {}});
    const auto r = run_bin(f);
    CHECK(r.bins.size() == 1);
    CHECK(r.unbinned == 1);
}

TEST_CASE("bin files round-trip") {
    const std::vector<ProductBin> bins{product("galaxy s10", {"a", "b"}, {"c"}), product("pixel 3", {}, {"d"})};
    support::TempDir dir;
    save_bins(bins, dir / "b.json");
    CHECK(load_bins(dir / "b.json") == bins);
}

TEST_CASE("truth from first appearances") {
    Fixture f;
    f.add("l10", "ap", HeadlineKind::leak, "Galaxy S10", parse_rfc3339("2018-07-07T07:54:44Z"));
    f.add("l10b", "ap", HeadlineKind::leak, "Galaxy S10", parse_rfc3339("2019-01-01T00:00:00Z"));
    f.add("p10", "samsung", HeadlineKind::press_release, "Galaxy S10", parse_rfc3339("2019-02-20T08:59:56Z"));
    f.add("l8", "ap", HeadlineKind::leak, "Galaxy S8", parse_rfc3339("2017-01-31T09:22:28Z"));
    f.add("p8", "samsung", HeadlineKind::press_release, "Galaxy S8", parse_rfc3339("2017-02-25T13:54:13Z"));
    f.add("lx", "ap", HeadlineKind::leak, "Galaxy X", parse_rfc3339("2018-01-01T00:00:00Z"));
    const auto bins = run_bin(f).bins;
    REQUIRE(bins.size() == 3);

    const auto s10 = assign_truth(bins[0], f.corpus, "ap");
    REQUIRE(s10);
    CHECK(s10->t == 1);
    CHECK(s10->f == 0);
    CHECK(s10->first_leak_time == parse_rfc3339("2018-07-07T07:54:44Z"));

    const auto s8 = assign_truth(bins[1], f.corpus, "ap");
    CHECK(s8->t == 1);

    const auto x = assign_truth(bins[2], f.corpus, "ap");
    CHECK(x->t == 0);
    CHECK(x->f == 1);
    const auto deferred = assign_truth(bins[2], f.corpus, "ap", TruthOptions{true});
    CHECK(deferred->t + deferred->f == 0);

    CHECK_FALSE(assign_truth(bins[0], f.corpus, "other-blog"));
    CHECK(assign_all(bins, f.corpus).size() == 3);
}

TEST_CASE("equal times are not a leak") {
    Fixture f;
    const auto t = make_timestamp(2019, 2, 20, 8, 59, 56);
    f.add("l", "ap", HeadlineKind::leak, "Galaxy S10", t);
    f.add("p", "samsung", HeadlineKind::press_release, "Galaxy S10", t);
    const auto a = assign_truth(run_bin(f).bins[0], f.corpus, "ap");
    CHECK(a->t == 0);
    CHECK(a->f == 1);
}

TEST_CASE("truth csv round-trips") {
    const std::vector<TruthAssignment> rows{
        {"ap", "galaxy s10", 1, 0, make_timestamp(2018, 7, 7, 7, 54, 44), make_timestamp(2019, 2, 20, 8, 59, 56)},
        {"ap", "galaxy x, fold", 0, 1, make_timestamp(2018, 1, 1), std::nullopt},
    };
    support::TempDir dir;
    save_truth(rows, dir / "t.csv");
    CHECK(load_truth(dir / "t.csv") == rows);
}

namespace {

Fixture random_fixture(support::Rng& rng) {
    static const std::vector<std::string> names{"Galaxy S10", "Galaxy S10 5G", "Galaxy S9", "Galaxy S9 Plus",
                                                "Pixel 3", "Pixel 3 XL", "iPhone XR", "Galaxy Note 9"};
    Fixture f;
    const int n = support::uniform(rng, 0, 30);
    for (int i = 0; i < n; ++i) {
        const bool leak = support::uniform(rng, 0, 2) > 0;
        const auto t = make_timestamp(2017, 1, 1) + std::chrono::hours(support::uniform(rng, 0, 20000));
        f.add("h" + std::to_string(i), leak ? (support::uniform(rng, 0, 1) ? "ap" : "sm") : "maker",
              leak ? HeadlineKind::leak : HeadlineKind::press_release,
              names[support::uniform(rng, 0, int(names.size()) - 1)], t);
    }
    return f;
}

}  // namespace

TEST_CASE("property: binning is a permutation-invariant partition") {
    support::Rng rng(31);
    for (int round = 0; round < 300; ++round) {
        const auto f = random_fixture(rng);
        const double threshold = support::uniform(rng, 1, 10) / 10.0;
        const auto r = run_bin(f, threshold);
        std::multiset<std::string> seen;
        for (const auto& b : r.bins) {
            seen.insert(b.leak_ids.begin(), b.leak_ids.end());
            seen.insert(b.pr_ids.begin(), b.pr_ids.end());
        }
        CHECK(seen.size() == f.corpus.size());
        CHECK(std::set<std::string>(seen.begin(), seen.end()).size() == seen.size());

        std::vector<Headline> hs = f.corpus.headlines();
        std::shuffle(hs.begin(), hs.end(), rng);
        Corpus shuffled;
        for (auto& h : hs) shuffled.add(h);
        CHECK(bin(shuffled, f.spans, Similarity(Metric::jaccard), threshold, stops()).bins == r.bins);
    }
}

TEST_CASE("property: truth flags are exclusive and flip with precedence") {
    support::Rng rng(37);
    for (int i = 0; i < 2000; ++i) {
        const auto tl = make_timestamp(2018, 1, 1) + std::chrono::minutes(support::uniform(rng, 0, 1000));
        const auto tp = make_timestamp(2018, 1, 1) + std::chrono::minutes(support::uniform(rng, 0, 1000));
        Fixture f;
        f.add("l", "ap", HeadlineKind::leak, "Pixel 3", tl);
        f.add("p", "google", HeadlineKind::press_release, "Pixel 3", tp);
        const auto a = assign_truth(run_bin(f).bins[0], f.corpus, "ap");
        REQUIRE(a);
        CHECK(a->t + a->f <= 1);
        CHECK(a->t == (tl < tp ? 1 : 0));

        Fixture g;
        g.add("l", "ap", HeadlineKind::leak, "Pixel 3", tp);
        g.add("p", "google", HeadlineKind::press_release, "Pixel 3", tl);
        const auto b = assign_truth(run_bin(g).bins[0], g.corpus, "ap");
        if (tl < tp) CHECK(b->f == 1);
        if (tp < tl) CHECK(b->t == 1);
    }
}
