#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "leakcred/matching.hpp"
#include "leakcred/time.hpp"

namespace leakcred {

/// Credibility score held as the exact ratio sum(t - 2f) / n.
struct Score {
    std::int64_t sum = 0;
    std::size_t n = 0;

    // A blog with no decided claims scores the default 0.
    bool scored() const { return n > 0; }
    double value() const { return n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n); }

    bool operator==(const Score&) const = default;
};

// Shortest round-trip decimal, "0" for an unscored blog.
std::string render_score(const Score& s);

struct LedgerEntry {
    int t = 0;
    int f = 0;
    Timestamp decided_at;

    bool operator==(const LedgerEntry&) const = default;
};

enum class ScoreCause { new_true, new_false, revision };

std::string_view to_string(ScoreCause c);

struct ScoreEvent {
    std::string blog;
    std::string product_key;
    ScoreCause cause = ScoreCause::new_true;
    int t = 0;
    int f = 0;
    Timestamp decided_at;
    Score prior;
    Score next;

    bool operator==(const ScoreEvent&) const = default;
};

/// Per-blog tally of decided leak claims.
///
/// The running (sum, n) pair is maintained incrementally; recompute()
/// rebuilds it from the entries. Every change appends to the audit log.
class CredibilityLedger {
public:
    explicit CredibilityLedger(std::string blog);

    const std::string& blog() const { return blog_; }
    const std::map<std::string, LedgerEntry>& entries() const { return entries_; }
    const std::vector<ScoreEvent>& audit() const { return audit_; }

    Score score() const { return score_; }
    Score recompute() const;

    // Inserts or revises the product's entry. An assignment equal to the
    // stored entry changes nothing and is not logged; the returned event
    // then has prior == next and cause revision. Throws InvalidArgument for
    // another blog, t + f > 1, or an undecided (t = f = 0) assignment.
    ScoreEvent update(const TruthAssignment& assignment);

    bool operator==(const CredibilityLedger& o) const {
        return blog_ == o.blog_ && entries_ == o.entries_ && audit_ == o.audit_ &&
               score_ == o.score_;
    }

private:
    friend CredibilityLedger load_ledger(const std::filesystem::path& path);

    std::string blog_;
    std::map<std::string, LedgerEntry> entries_;
    std::vector<ScoreEvent> audit_;
    Score score_;
};

// Writes atomically through a temporary file. Refuses to overwrite a ledger
// whose audit log is not a prefix of this one's.
void persist(const CredibilityLedger& ledger, const std::filesystem::path& path);

// Fails closed: any structural problem, an empty file, or an audit log that
// disagrees with the entries throws ParseError.
CredibilityLedger load_ledger(const std::filesystem::path& path);

// File name for a blog's ledger inside a ledger directory.
std::filesystem::path ledger_path(const std::filesystem::path& dir, std::string_view blog);

/// Exclusive advisory lock on "<ledger>.lock", held for the object's life.
class LedgerLock {
public:
    // Throws BusyError when another holder exists.
    explicit LedgerLock(const std::filesystem::path& ledger);
    ~LedgerLock();
    LedgerLock(const LedgerLock&) = delete;
    LedgerLock& operator=(const LedgerLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace leakcred
