#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leakcred/time.hpp"

namespace leakcred {

enum class HeadlineKind { leak, press_release };

std::string_view to_string(HeadlineKind kind);
std::optional<HeadlineKind> parse_kind(std::string_view s);

struct Headline {
    std::string id;
    std::string source;
    HeadlineKind kind = HeadlineKind::leak;
    std::string url;
    std::string text;  // display form, see collapse()
    std::optional<Timestamp> declared_time;
    std::optional<Timestamp> estimated_time;

    // min(declared, estimated) over whichever are present.
    std::optional<Timestamp> effective_time() const;

    bool operator==(const Headline&) const = default;
};

// Stable identifier derived from (source, url).
std::string derive_headline_id(std::string_view source, std::string_view url);

bool is_absolute_url(std::string_view url);

/// Ordered, duplicate-free collection of headlines plus the registry that
/// assigns every source to exactly one kind.
class Corpus {
public:
    // Validates and appends. Returns an explanation on rejection, nothing on
    // success. A (source, url) pair already present yields "duplicate".
    std::optional<std::string> try_add(Headline h);

    // As try_add, but throws InvalidArgument on rejection.
    void add(Headline h);

    // Binds a source to a kind. Throws when the source is bound otherwise.
    void register_source(const std::string& source, HeadlineKind kind);

    const std::vector<Headline>& headlines() const { return headlines_; }
    const std::map<std::string, HeadlineKind>& source_registry() const { return registry_; }
    std::size_t size() const { return headlines_.size(); }
    bool empty() const { return headlines_.empty(); }

    const Headline* find(std::string_view id) const;
    void set_estimated_time(std::size_t index, std::optional<Timestamp> t);

    bool operator==(const Corpus& other) const {
        return headlines_ == other.headlines_ && registry_ == other.registry_;
    }

private:
    std::vector<Headline> headlines_;
    std::map<std::string, HeadlineKind> registry_;
    std::unordered_map<std::string, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_source_url_;
};

enum class InputFormat { jsonl, tsv };

std::optional<InputFormat> parse_format(std::string_view s);

struct IngestIssue {
    std::size_t line = 0;
    std::string reason;
};

struct IngestResult {
    Corpus corpus;
    std::size_t accepted = 0;
    std::size_t duplicates = 0;
    std::vector<IngestIssue> rejected;
};

// Reads one headline file and appends its records to `base`.
//
// JSONL records: {"source", "kind", "url", "text", "declared_time"} plus the
// optional "id" and "estimated_time" written by write_corpus. TSV rows:
// source, url, text and an optional declared time; TSV requires `kind`.
// When `kind` is given every record must be of that kind. Bad records are
// reported per line; more than half the records failing throws ParseError.
IngestResult ingest(const std::filesystem::path& path, InputFormat format,
                    std::optional<HeadlineKind> kind, Corpus base = {});

// Same, reading from an already open stream. `name` is used in messages.
IngestResult ingest(std::istream& in, std::string_view name, InputFormat format,
                    std::optional<HeadlineKind> kind, Corpus base = {});

// JSONL, one record per headline in corpus order.
void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Reads a file produced by write_corpus; any reject is fatal.
Corpus read_corpus(const std::filesystem::path& path);

}  // namespace leakcred
