#include "leakcred/credibility.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <json.hpp>

#include "leakcred/error.hpp"

namespace leakcred {

using json = nlohmann::ordered_json;

std::string render_score(const Score& s) {
    if (!s.scored()) return "0";
    // %.17g round-trips; try shorter forms first.
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, s.value());
        if (std::strtod(buf, nullptr) == s.value()) break;
    }
    return buf;
}

std::string_view to_string(ScoreCause c) {
    switch (c) {
        case ScoreCause::new_true: return "new_true";
        case ScoreCause::new_false: return "new_false";
        case ScoreCause::revision: return "revision";
    }
    return "?";
}

CredibilityLedger::CredibilityLedger(std::string blog) : blog_(std::move(blog)) {
    if (blog_.empty()) throw InvalidArgument("ledger needs a blog id");
}

Score CredibilityLedger::recompute() const {
    Score s;
    for (const auto& [key, e] : entries_) {
        s.sum += e.t - 2 * e.f;
        ++s.n;
    }
    return s;
}

ScoreEvent CredibilityLedger::update(const TruthAssignment& a) {
    if (a.blog != blog_)
        throw InvalidArgument("assignment for blog '" + a.blog + "' sent to ledger of '" + blog_ + "'");
    if (a.t < 0 || a.t > 1 || a.f < 0 || a.f > 1 || a.t + a.f > 1)
        throw InvalidArgument("t and f must be binary with t + f <= 1");
    if (a.t + a.f == 0) throw InvalidArgument("undecided assignment for " + a.product_key);
    if (!a.first_leak_time && !a.first_pr_time)
        throw InvalidArgument("assignment without any time for " + a.product_key);

    Timestamp decided = a.first_leak_time.value_or(*a.first_pr_time);
    if (a.first_pr_time) decided = std::max(decided, *a.first_pr_time);

    ScoreEvent ev;
    ev.blog = blog_;
    ev.product_key = a.product_key;
    ev.t = a.t;
    ev.f = a.f;
    ev.decided_at = decided;
    ev.prior = score_;

    auto it = entries_.find(a.product_key);
    if (it != entries_.end()) {
        ev.cause = ScoreCause::revision;
        if (it->second.t == a.t && it->second.f == a.f) {
            ev.next = score_;
            ev.decided_at = it->second.decided_at;
            return ev;
        }
        score_.sum -= it->second.t - 2 * it->second.f;
        it->second = LedgerEntry{a.t, a.f, decided};
    } else {
        ev.cause = a.t == 1 ? ScoreCause::new_true : ScoreCause::new_false;
        entries_.emplace(a.product_key, LedgerEntry{a.t, a.f, decided});
        ++score_.n;
    }
    score_.sum += a.t - 2 * a.f;
    ev.next = score_;
    audit_.push_back(ev);
    return ev;
}

namespace {

json score_json(const Score& s) {
    return json{{"sum", s.sum}, {"n", s.n}, {"score", s.value()}};
}

json ledger_json(const CredibilityLedger& ledger) {
    json entries = json::object();
    for (const auto& [key, e] : ledger.entries()) {
        entries[key] = json{{"t", e.t}, {"f", e.f}, {"decided_at", format_rfc3339(e.decided_at)}};
    }
    json audit = json::array();
    for (const auto& ev : ledger.audit()) {
        audit.push_back(json{{"product_key", ev.product_key},
                             {"cause", to_string(ev.cause)},
                             {"t", ev.t},
                             {"f", ev.f},
                             {"decided_at", format_rfc3339(ev.decided_at)},
                             {"prior", score_json(ev.prior)},
                             {"new", score_json(ev.next)}});
    }
    const auto s = ledger.score();
    return json{{"blog", ledger.blog()},
                {"entries", entries},
                {"audit", audit},
                {"score", score_json(s)}};
}

Timestamp read_time(const json& j) {
    auto t = parse_rfc3339(j.get<std::string>());
    if (!t) throw ParseError("bad timestamp " + j.get<std::string>());
    return *t;
}

int read_flag(const json& j) {
    const int v = j.get<int>();
    if (v != 0 && v != 1) throw ParseError("flag must be 0 or 1");
    return v;
}

Score read_score(const json& j) {
    Score s{j.at("sum").get<std::int64_t>(), j.at("n").get<std::size_t>()};
    if (j.at("score").get<double>() != s.value()) throw ParseError("score disagrees with sum/n");
    return s;
}

ScoreCause read_cause(const std::string& s) {
    if (s == "new_true") return ScoreCause::new_true;
    if (s == "new_false") return ScoreCause::new_false;
    if (s == "revision") return ScoreCause::revision;
    throw ParseError("unknown cause " + s);
}

}  // namespace

void persist(const CredibilityLedger& ledger, const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        const auto existing = load_ledger(path);
        const auto& old_audit = existing.audit();
        const auto& new_audit = ledger.audit();
        if (existing.blog() != ledger.blog() || old_audit.size() > new_audit.size() ||
            !std::equal(old_audit.begin(), old_audit.end(), new_audit.begin()))
            throw Error("refusing to overwrite " + path.string() +
                        ": its audit log is not a prefix of the new one");
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write ledger: " + tmp.string());
        out << ledger_json(ledger).dump(2) << '\n';
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

CredibilityLedger load_ledger(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read ledger: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const auto text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ParseError(path.string() + ": empty ledger file");
    try {
        const auto doc = json::parse(text);
        CredibilityLedger ledger(doc.at("blog").get<std::string>());
        for (const auto& [key, e] : doc.at("entries").items()) {
            LedgerEntry entry{read_flag(e.at("t")), read_flag(e.at("f")), read_time(e.at("decided_at"))};
            if (entry.t + entry.f != 1) throw ParseError("entry " + key + " is not decided");
            ledger.entries_.emplace(key, entry);
        }
        for (const auto& j : doc.at("audit")) {
            ScoreEvent ev;
            ev.blog = ledger.blog_;
            ev.product_key = j.at("product_key").get<std::string>();
            ev.cause = read_cause(j.at("cause").get<std::string>());
            ev.t = read_flag(j.at("t"));
            ev.f = read_flag(j.at("f"));
            ev.decided_at = read_time(j.at("decided_at"));
            ev.prior = read_score(j.at("prior"));
            ev.next = read_score(j.at("new"));
            ledger.audit_.push_back(std::move(ev));
        }
        ledger.score_ = ledger.recompute();
        if (read_score(doc.at("score")) != ledger.score_)
            throw ParseError("stored score disagrees with entries");
        // Replaying the audit log must reproduce the entries.
        CredibilityLedger replay(ledger.blog_);
        for (const auto& ev : ledger.audit_) {
            TruthAssignment a{ledger.blog_, ev.product_key, ev.t, ev.f, ev.decided_at, std::nullopt};
            const auto got = replay.update(a);
            if (got.prior != ev.prior || got.next != ev.next || got.cause != ev.cause)
                throw ParseError("audit log inconsistent at " + ev.product_key);
        }
        if (replay.score_ != ledger.score_ || replay.entries_.size() != ledger.entries_.size())
            throw ParseError("audit log does not reproduce the entries");
        for (const auto& [key, e] : replay.entries_) {
            auto it = ledger.entries_.find(key);
            if (it == ledger.entries_.end() || it->second.t != e.t || it->second.f != e.f)
                throw ParseError("audit log does not reproduce entry " + key);
        }
        return ledger;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::filesystem::path ledger_path(const std::filesystem::path& dir, std::string_view blog) {
    std::string name;
    for (char c : blog) {
        const bool safe = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                          (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        name.push_back(safe ? c : '_');
    }
    if (name.empty() || name.front() == '.') name.insert(0, "_");
    return dir / (name + ".ledger.json");
}

LedgerLock::LedgerLock(const std::filesystem::path& ledger) {
    auto lock_path = ledger;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error("cannot open lock " + lock_path.string() + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        const int err = errno;
        ::close(fd_);
        fd_ = -1;
        if (err == EWOULDBLOCK) throw BusyError("ledger busy: " + ledger.string());
        throw Error("cannot lock " + lock_path.string() + ": " + std::strerror(err));
    }
}

LedgerLock::~LedgerLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

}  // namespace leakcred
