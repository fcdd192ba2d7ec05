#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "leakcred/credibility.hpp"
#include "leakcred/error.hpp"
#include "support.hpp"

using namespace leakcred;

namespace {

TruthAssignment claim(const std::string& key, int t, int f, const std::string& blog = "ap") {
    return TruthAssignment{blog, key, t, f, make_timestamp(2018, 7, 7), make_timestamp(2019, 2, 20)};
}

CredibilityLedger ledger_of(const std::vector<std::pair<int, int>>& tf) {
    CredibilityLedger l("ap");
    for (std::size_t i = 0; i < tf.size(); ++i) l.update(claim("p" + std::to_string(i), tf[i].first, tf[i].second));
    return l;
}

}  // namespace

TEST_CASE("score bounds by hand") {
    CHECK(ledger_of({{1, 0}, {1, 0}, {1, 0}, {1, 0}}).score().value() == 1.0);
    CHECK(ledger_of({{0, 1}, {0, 1}}).score().value() == -2.0);
    CHECK(ledger_of({{1, 0}, {1, 0}, {0, 1}}).score().value() == 0.0);
    CHECK(ledger_of({}).score() == Score{});
    CHECK_FALSE(ledger_of({}).score().scored());
    CHECK(render_score(Score{}) == "0");
    CHECK(render_score(Score{1, 3}) == "0.3333333333333333");
    CHECK(render_score(Score{-1, 2}) == "-0.5");
}

TEST_CASE("updates") {
    CredibilityLedger l("ap");
    auto e1 = l.update(claim("A", 1, 0));
    CHECK(e1.cause == ScoreCause::new_true);
    CHECK(e1.next.value() == 1.0);
    CHECK(e1.decided_at == make_timestamp(2019, 2, 20));
    auto e2 = l.update(claim("B", 0, 1));
    CHECK(e2.cause == ScoreCause::new_false);
    CHECK(l.score().value() == -0.5);
    CHECK(l.audit().size() == 2);

    CredibilityLedger single("ap");
    single.update(claim("A", 1, 0));
    auto rev = single.update(claim("A", 0, 1));
    CHECK(rev.cause == ScoreCause::revision);
    CHECK(single.score().value() == -2.0);
    CHECK(single.score().n == 1);

    auto same = single.update(claim("A", 0, 1));
    CHECK(same.prior == same.next);
    CHECK(single.audit().size() == 2);
}

TEST_CASE("invalid updates") {
    CredibilityLedger l("ap");
    CHECK_THROWS_AS(l.update(claim("A", 1, 0, "other")), InvalidArgument);
    CHECK_THROWS_AS(l.update(claim("A", 1, 1)), InvalidArgument);
    CHECK_THROWS_AS(l.update(claim("A", 0, 0)), InvalidArgument);
    CHECK_THROWS_AS(l.update(claim("A", 2, 0)), InvalidArgument);
    CHECK(l.audit().empty());
}

TEST_CASE("persist and load") {
    support::TempDir dir;
    auto l = ledger_of({{1, 0}, {0, 1}, {1, 0}});
    l.update(claim("p1", 1, 0));
    const auto path = ledger_path(dir.path(), "ap");
    persist(l, path);
    CHECK(load_ledger(path) == l);
    CHECK(path.filename() == "ap.ledger.json");
    CHECK(ledger_path(dir.path(), "a/b c").filename() == "a_b_c.ledger.json");
}

TEST_CASE("persist refuses to drop history") {
    support::TempDir dir;
    const auto path = dir / "ap.ledger.json";
    auto l = ledger_of({{1, 0}, {1, 0}});
    persist(l, path);
    CHECK_THROWS(persist(ledger_of({{0, 1}}), path));
    l.update(claim("p9", 0, 1));
    CHECK_NOTHROW(persist(l, path));
}

TEST_CASE("corrupt ledgers fail closed") {
    support::TempDir dir;
    const auto good = dir / "good.json";
    persist(ledger_of({{1, 0}, {0, 1}}), good);
    const auto text = support::read_file(good);

    const auto bad = dir / "bad.json";
    auto expect_failure = [&](const std::string& content) {
        support::write_file(bad, content);
        CHECK_THROWS_AS(load_ledger(bad), ParseError);
    };
    expect_failure("");
    expect_failure("{");
    expect_failure(text.substr(0, text.size() / 2));
    expect_failure("[]");
    auto replace = [&](const std::string& from, const std::string& to) {
        auto s = text;
        const auto pos = s.find(from);
        REQUIRE(pos != std::string::npos);
        s.replace(pos, from.size(), to);
        return s;
    };
    expect_failure(replace("\"t\": 1", "\"t\": 2"));
    expect_failure(replace("\"sum\": -1", "\"sum\": 0"));
    expect_failure(replace("\"cause\": \"new_true\"", "\"cause\": \"maybe\""));
    expect_failure(replace("\"t\": 0,\n      \"f\": 1", "\"t\": 0,\n      \"f\": 0"));
    CHECK_THROWS(load_ledger(dir / "missing.json"));
}

TEST_CASE("the lock admits one holder") {
    support::TempDir dir;
    const auto path = dir / "ap.ledger.json";
    {
        LedgerLock first(path);
        CHECK_THROWS_AS(LedgerLock second(path), BusyError);

        const pid_t child = ::fork();
        if (child == 0) {
            try {
                LedgerLock other(path);
                ::_exit(0);
            } catch (const BusyError&) {
                ::_exit(7);
            }
        }
        int status = 0;
        ::waitpid(child, &status, 0);
        CHECK(WEXITSTATUS(status) == 7);
    }
    CHECK_NOTHROW(LedgerLock again(path));
}

TEST_CASE("property: incremental score matches batch recomputation") {
    support::Rng rng(41);
    for (int round = 0; round < 300; ++round) {
        CredibilityLedger l("ap");
        const int steps = support::uniform(rng, 0, 300);
        for (int i = 0; i < steps; ++i) {
            const bool t = support::uniform(rng, 0, 1);
            const Score before = l.score();
            l.update(claim("p" + std::to_string(support::uniform(rng, 0, 80)), t, !t));
            CHECK(l.score() == l.recompute());
            if (l.score().scored()) {
                CHECK(l.score().value() >= -2.0);
                CHECK(l.score().value() <= 1.0);
            }
            (void)before;
        }
        // Entry order does not matter: replay in shuffled order.
        std::vector<std::pair<std::string, LedgerEntry>> entries(l.entries().begin(), l.entries().end());
        std::shuffle(entries.begin(), entries.end(), rng);
        CredibilityLedger replay("ap");
        for (const auto& [k, e] : entries) replay.update(claim(k, e.t, e.f));
        CHECK(replay.score() == l.score());
    }
}

TEST_CASE("property: new true claims never lower the score, false never raise it") {
    support::Rng rng(43);
    for (int round = 0; round < 1000; ++round) {
        std::vector<std::pair<int, int>> tf(support::uniform(rng, 0, 50));
        for (auto& x : tf) {
            x.first = support::uniform(rng, 0, 1);
            x.second = 1 - x.first;
        }
        auto l = ledger_of(tf);
        const double before = l.score().value();
        auto up = l;
        up.update(claim("new", 1, 0));
        auto down = l;
        down.update(claim("new", 0, 1));
        if (l.score().scored()) {
            CHECK(up.score().value() >= before);
            CHECK(down.score().value() <= before);
        }
        const bool all_true = std::all_of(tf.begin(), tf.end(), [](auto x) { return x.first == 1; });
        const bool all_false = std::all_of(tf.begin(), tf.end(), [](auto x) { return x.second == 1; });
        if (!tf.empty() && all_true) CHECK(l.score().value() > 0);
        if (!tf.empty() && all_false) CHECK(l.score().value() < 0);
    }
}
