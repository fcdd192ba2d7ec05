#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leakcred/corpus.hpp"
#include "leakcred/time.hpp"

namespace leakcred {

enum class Confidence { declared, archived, inferred };

std::string_view to_string(Confidence c);

struct TimestampEstimate {
    std::string url;
    std::string estimator_id;
    Timestamp time;
    Confidence confidence = Confidence::inferred;

    bool operator==(const TimestampEstimate&) const = default;
};

enum class EstimatorKind { fixture_file, http_header, archive_lookup, backlink_stub };

std::string_view to_string(EstimatorKind k);
std::optional<EstimatorKind> parse_estimator_kind(std::string_view s);

struct EstimatorConfig {
    std::string id;
    EstimatorKind kind = EstimatorKind::fixture_file;
    std::filesystem::path path;  // fixture_file, backlink_stub
    std::string base_url;        // archive_lookup, e.g. "http://archive.org"
    std::string query;           // archive_lookup, e.g. "/wayback/available?url={url}"
};

using Duration = std::chrono::milliseconds;

inline constexpr Duration kDefaultTimeout{10'000};

/// One source of creation-time evidence for a URL.
class Estimator {
public:
    virtual ~Estimator() = default;

    // Nothing when the source has no opinion; throws when the source fails.
    virtual std::optional<TimestampEstimate> query(const std::string& url,
                                                   Duration timeout) const = 0;
    // Remote estimators are queried on their own threads.
    virtual bool remote() const = 0;

    const std::string& id() const { return id_; }

protected:
    explicit Estimator(std::string id) : id_(std::move(id)) {}

private:
    std::string id_;
};

// Reads "url<TAB>RFC3339<TAB>source_tag" rows; a URL listed several times
// keeps its earliest time.
std::map<std::string, Timestamp> load_timestamp_table(const std::filesystem::path& path);

std::unique_ptr<Estimator> make_estimator(const EstimatorConfig& config);

class EstimatorRegistry {
public:
    // Throws InvalidArgument on a duplicate id.
    void add(const EstimatorConfig& config);
    void add(std::unique_ptr<Estimator> estimator);

    // {"estimators": [{"id", "kind", "path" | "base_url" + "query"}]};
    // relative paths resolve against the config file's directory.
    static EstimatorRegistry load(const std::filesystem::path& path);

    const std::vector<std::unique_ptr<Estimator>>& estimators() const { return estimators_; }
    bool empty() const { return estimators_.empty(); }
    std::size_t size() const { return estimators_.size(); }

private:
    std::vector<std::unique_ptr<Estimator>> estimators_;
};

struct EstimatorFailure {
    std::string estimator_id;
    std::string reason;
};

struct EstimateOutcome {
    std::vector<TimestampEstimate> estimates;  // registry order
    std::vector<EstimatorFailure> failures;
};

// Queries every estimator independently; a failing or slow estimator does
// not affect the others.
EstimateOutcome estimate(const std::string& url, const EstimatorRegistry& registry,
                         Duration timeout = kDefaultTimeout);

struct AggregateTime {
    Timestamp time;
    std::string estimator_id;  // the estimator that reported the minimum
};

// Earliest estimate; nothing means undatable. Ties go to the first listed.
std::optional<AggregateTime> aggregate(std::span<const TimestampEstimate> estimates);

struct DatingReport {
    std::size_t estimated = 0;               // headlines given an estimated_time
    std::vector<std::string> undatable_ids;  // no estimate and no declared time
    std::size_t failures = 0;                // estimator failures across URLs
    std::map<std::string, std::size_t> wins; // estimator id -> URLs it dated
};

// Fills estimated_time for every headline from its URL. The effective time
// used downstream is min(declared_time, estimated_time). URLs are processed
// in parallel and the corpus is updated once all are done.
DatingReport date_corpus(Corpus& corpus, const EstimatorRegistry& registry,
                         Duration timeout = kDefaultTimeout);

}  // namespace leakcred
