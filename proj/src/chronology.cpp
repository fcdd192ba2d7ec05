#include "leakcred/chronology.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <future>
#include <regex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "leakcred/error.hpp"

namespace leakcred {

std::string_view to_string(Confidence c) {
    switch (c) {
        case Confidence::declared: return "declared";
        case Confidence::archived: return "archived";
        case Confidence::inferred: return "inferred";
    }
    return "?";
}

std::string_view to_string(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::fixture_file: return "fixture_file";
        case EstimatorKind::http_header: return "http_header";
        case EstimatorKind::archive_lookup: return "archive_lookup";
        case EstimatorKind::backlink_stub: return "backlink_stub";
    }
    return "?";
}

std::optional<EstimatorKind> parse_estimator_kind(std::string_view s) {
    for (auto k : {EstimatorKind::fixture_file, EstimatorKind::http_header,
                   EstimatorKind::archive_lookup, EstimatorKind::backlink_stub}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

std::map<std::string, Timestamp> load_timestamp_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read timestamp file: " + path.string());
    std::map<std::string, Timestamp> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
        const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ParseError(where + "expected url<TAB>timestamp");
        auto tab2 = line.find('\t', tab + 1);
        const auto stamp = line.substr(tab + 1, tab2 == std::string::npos ? std::string::npos
                                                                          : tab2 - tab - 1);
        auto t = parse_rfc3339(stamp);
        if (!t) throw ParseError(where + "not an RFC3339 timestamp: " + stamp);
        auto [it, inserted] = table.emplace(line.substr(0, tab), *t);
        if (!inserted) it->second = std::min(it->second, *t);
    }
    return table;
}

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string target;  // path and query, at least "/"
};

std::optional<SplitUrl> split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    const auto path_start = url.find_first_of("/?#", scheme_end + 3);
    SplitUrl out;
    out.origin = url.substr(0, path_start);
    out.target = path_start == std::string::npos ? "/" : url.substr(path_start);
    if (auto hash = out.target.find('#'); hash != std::string::npos) out.target.erase(hash);
    if (out.target.empty() || out.target.front() != '/') out.target.insert(0, "/");
    return out;
}

std::string percent_encode(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

void configure(httplib::Client& client, Duration timeout) {
    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    client.set_follow_location(false);
}

constexpr int kMaxRedirects = 3;

class TableEstimator final : public Estimator {
public:
    TableEstimator(std::string id, const std::filesystem::path& path, Confidence confidence)
        : Estimator(std::move(id)), table_(load_timestamp_table(path)), confidence_(confidence) {}

    std::optional<TimestampEstimate> query(const std::string& url, Duration) const override {
        auto it = table_.find(url);
        if (it == table_.end()) return std::nullopt;
        return TimestampEstimate{url, id(), it->second, confidence_};
    }
    bool remote() const override { return false; }

private:
    std::map<std::string, Timestamp> table_;
    Confidence confidence_;
};

class HttpHeaderEstimator final : public Estimator {
public:
    explicit HttpHeaderEstimator(std::string id) : Estimator(std::move(id)) {}

    std::optional<TimestampEstimate> query(const std::string& url,
                                           Duration timeout) const override {
        std::string current = url;
        for (int hop = 0; hop <= kMaxRedirects; ++hop) {
            auto parts = split_url(current);
            if (!parts) throw Error("not an absolute URL: " + current);
            httplib::Client client(parts->origin);
            configure(client, timeout);
            auto res = client.Head(parts->target);
            if (!res) throw Error("HEAD " + current + ": " + httplib::to_string(res.error()));
            if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
                auto location = res->get_header_value("Location");
                current = location.find("://") != std::string::npos ? location
                                                                     : parts->origin + location;
                continue;
            }
            if (res->status < 200 || res->status >= 300)
                throw Error("HEAD " + current + ": status " + std::to_string(res->status));
            if (!res->has_header("Last-Modified")) return std::nullopt;
            auto t = parse_http_date(res->get_header_value("Last-Modified"));
            if (!t) throw Error("unparseable Last-Modified from " + current);
            return TimestampEstimate{url, id(), *t, Confidence::declared};
        }
        throw Error("too many redirects for " + url);
    }
    bool remote() const override { return true; }
};

std::optional<Timestamp> parse_archive_value(const nlohmann::json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (auto t = parse_compact14(s)) return t;
        return parse_rfc3339(s);
    }
    if (v.is_number_integer()) return parse_compact14(std::to_string(v.get<long long>()));
    return std::nullopt;
}

std::optional<Timestamp> find_timestamp_field(const nlohmann::json& j) {
    if (j.is_object()) {
        if (auto it = j.find("timestamp"); it != j.end()) {
            if (auto t = parse_archive_value(*it)) return t;
        }
        for (const auto& [key, value] : j.items()) {
            if (auto t = find_timestamp_field(value)) return t;
        }
    } else if (j.is_array()) {
        for (const auto& value : j) {
            if (auto t = find_timestamp_field(value)) return t;
        }
    }
    return std::nullopt;
}

class ArchiveEstimator final : public Estimator {
public:
    ArchiveEstimator(std::string id, std::string base_url, std::string query)
        : Estimator(std::move(id)), base_url_(std::move(base_url)), query_(std::move(query)) {
        if (query_.find("{url}") == std::string::npos)
            throw InvalidArgument("archive query template lacks {url}");
        if (!split_url(base_url_)) throw InvalidArgument("archive base URL is not absolute");
    }

    std::optional<TimestampEstimate> query(const std::string& url,
                                           Duration timeout) const override {
        std::string target = query_;
        target.replace(target.find("{url}"), 5, percent_encode(url));
        httplib::Client client(split_url(base_url_)->origin);
        configure(client, timeout);
        client.set_follow_location(true);
        auto res = client.Get(split_url(base_url_)->target == "/"
                                  ? target
                                  : split_url(base_url_)->target + target);
        if (!res) throw Error("archive lookup: " + httplib::to_string(res.error()));
        if (res->status == 404) return std::nullopt;
        if (res->status < 200 || res->status >= 300)
            throw Error("archive lookup: status " + std::to_string(res->status));

        std::optional<Timestamp> t;
        const auto body = nlohmann::json::parse(res->body, nullptr, false);
        if (!body.is_discarded()) t = find_timestamp_field(body);
        if (!t) {
            static const std::regex kToken(R"((^|[^0-9])([0-9]{14})([^0-9]|$))");
            std::smatch m;
            if (std::regex_search(res->body, m, kToken)) t = parse_compact14(m[2].str());
        }
        if (!t) return std::nullopt;
        return TimestampEstimate{url, id(), *t, Confidence::archived};
    }
    bool remote() const override { return true; }

private:
    std::string base_url_;
    std::string query_;
};

}  // namespace

std::unique_ptr<Estimator> make_estimator(const EstimatorConfig& config) {
    if (config.id.empty()) throw InvalidArgument("estimator without id");
    switch (config.kind) {
        case EstimatorKind::fixture_file:
            return std::make_unique<TableEstimator>(config.id, config.path, Confidence::declared);
        case EstimatorKind::backlink_stub:
            return std::make_unique<TableEstimator>(config.id, config.path, Confidence::inferred);
        case EstimatorKind::http_header:
            return std::make_unique<HttpHeaderEstimator>(config.id);
        case EstimatorKind::archive_lookup:
            return std::make_unique<ArchiveEstimator>(config.id, config.base_url, config.query);
    }
    throw InvalidArgument("unknown estimator kind");
}

void EstimatorRegistry::add(const EstimatorConfig& config) { add(make_estimator(config)); }

void EstimatorRegistry::add(std::unique_ptr<Estimator> estimator) {
    for (const auto& e : estimators_) {
        if (e->id() == estimator->id())
            throw InvalidArgument("duplicate estimator id: " + estimator->id());
    }
    estimators_.push_back(std::move(estimator));
}

EstimatorRegistry EstimatorRegistry::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read estimator config: " + path.string());
    EstimatorRegistry registry;
    try {
        const auto doc = nlohmann::json::parse(in);
        for (const auto& j : doc.at("estimators")) {
            EstimatorConfig c;
            c.id = j.at("id").get<std::string>();
            auto kind = parse_estimator_kind(j.at("kind").get<std::string>());
            if (!kind) throw ParseError("unknown estimator kind for " + c.id);
            c.kind = *kind;
            if (j.contains("path")) {
                c.path = j.at("path").get<std::string>();
                if (c.path.is_relative()) c.path = path.parent_path() / c.path;
            }
            c.base_url = j.value("base_url", "");
            c.query = j.value("query", "");
            registry.add(c);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return registry;
}

EstimateOutcome estimate(const std::string& url, const EstimatorRegistry& registry,
                         Duration timeout) {
    const auto& estimators = registry.estimators();
    using Result = std::pair<std::optional<TimestampEstimate>, std::optional<std::string>>;
    auto run = [&url, timeout](const Estimator& e) -> Result {
        try {
            return {e.query(url, timeout), std::nullopt};
        } catch (const std::exception& ex) {
            return {std::nullopt, std::string(ex.what())};
        }
    };

    std::vector<std::future<Result>> pending(estimators.size());
    std::vector<Result> results(estimators.size());
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        if (estimators[i]->remote())
            pending[i] = std::async(std::launch::async, run, std::cref(*estimators[i]));
    }
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        results[i] = pending[i].valid() ? pending[i].get() : run(*estimators[i]);
    }

    EstimateOutcome out;
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        if (results[i].first) out.estimates.push_back(std::move(*results[i].first));
        if (results[i].second)
            out.failures.push_back(EstimatorFailure{estimators[i]->id(), *results[i].second});
    }
    return out;
}

std::optional<AggregateTime> aggregate(std::span<const TimestampEstimate> estimates) {
    if (estimates.empty()) return std::nullopt;
    const auto it = std::min_element(
        estimates.begin(), estimates.end(),
        [](const TimestampEstimate& a, const TimestampEstimate& b) { return a.time < b.time; });
    return AggregateTime{it->time, it->estimator_id};
}

DatingReport date_corpus(Corpus& corpus, const EstimatorRegistry& registry, Duration timeout) {
    std::vector<std::string> urls;
    for (const auto& h : corpus.headlines()) urls.push_back(h.url);
    std::sort(urls.begin(), urls.end());
    urls.erase(std::unique(urls.begin(), urls.end()), urls.end());

    std::vector<EstimateOutcome> outcomes(urls.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < urls.size(); i = next++)
            outcomes[i] = estimate(urls[i], registry, timeout);
    };
    const std::size_t threads =
        std::min<std::size_t>(urls.size(), std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    DatingReport report;
    std::map<std::string, std::optional<AggregateTime>> by_url;
    for (std::size_t i = 0; i < urls.size(); ++i) {
        report.failures += outcomes[i].failures.size();
        auto agg = aggregate(outcomes[i].estimates);
        if (agg) ++report.wins[agg->estimator_id];
        by_url.emplace(urls[i], std::move(agg));
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& h = corpus.headlines()[i];
        const auto& agg = by_url.at(h.url);
        corpus.set_estimated_time(i, agg ? std::optional(agg->time) : std::nullopt);
        if (agg) ++report.estimated;
        else if (!h.declared_time) report.undatable_ids.push_back(h.id);
    }
    return report;
}

}  // namespace leakcred
