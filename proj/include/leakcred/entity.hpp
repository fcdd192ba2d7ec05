#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leakcred/corpus.hpp"
#include "leakcred/text.hpp"

namespace leakcred {

inline constexpr std::string_view kSlotMarker = "XXX";

// Matches ^[A-Za-z]+_sp$.
bool is_valid_label(std::string_view label);

// "Samsung" and "Samsung_sp" both become "Samsung_sp".
std::string label_from_hint(std::string_view hint);

struct Template {
    std::string text;
    std::optional<std::string> company_hint;  // stored as a label

    // Throws InvalidArgument unless `text` holds exactly one slot marker and
    // something besides it.
    static Template make(std::string_view text, std::optional<std::string_view> hint = {});
};

// One template per line, optional "<TAB>company_hint".
std::vector<Template> load_templates(const std::filesystem::path& path);

/// Product names keyed by their token sequence joined with single spaces.
class Gazetteer {
public:
    struct Entry {
        std::string name;   // as first supplied, display form
        std::string label;
    };

    // Throws on an invalid label, an empty name, or a name already bound to
    // a different label.
    void add(std::string_view name, const std::string& label);

    // TSV "name<TAB>label".
    static Gazetteer load(const std::filesystem::path& path);

    static std::string key_of(std::string_view name);

    const Entry* find(std::string_view key) const;
    const std::map<std::string, Entry>& entries() const { return entries_; }
    const std::set<std::string>& companies() const { return companies_; }
    std::size_t max_tokens() const { return max_tokens_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    std::map<std::string, Entry> entries_;
    std::set<std::string> companies_;
    std::size_t max_tokens_ = 0;
};

enum class SpanOrigin { gazetteer, pattern };

std::string_view to_string(SpanOrigin o);

/// Byte offsets into the headline's display text.
struct EntitySpan {
    std::string headline_id;
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;
    std::string label;
    SpanOrigin origin = SpanOrigin::gazetteer;

    bool operator==(const EntitySpan&) const = default;
};

struct TrainingExample {
    std::string id;
    std::string text;
    std::vector<EntitySpan> gold;
};

// Every template crossed with every gazetteer name whose label agrees with
// the template's company hint (all names when there is no hint).
std::vector<TrainingExample> expand_templates(std::span<const Template> templates,
                                              const Gazetteer& gazetteer);

// [text, {"entities": [[start, end, label], ...]}] per line.
void write_training_set(std::span<const TrainingExample> examples, std::ostream& out);

struct ContextPattern {
    std::vector<std::string> left;   // at most two tokens, nearest last
    std::vector<std::string> right;  // at most two tokens, nearest first
    std::size_t weight = 0;
    std::map<std::string, std::size_t> label_weights;

    // Heaviest label, ties to the lexicographically smallest.
    std::string majority_label() const;
    std::size_t specificity() const { return left.size() + right.size(); }

    bool operator==(const ContextPattern&) const = default;
};

/// Patterns keyed and iterated by (left, right).
class PatternSet {
public:
    using Key = std::pair<std::vector<std::string>, std::vector<std::string>>;

    void add(std::vector<std::string> left, std::vector<std::string> right,
             const std::string& label, std::size_t weight = 1);
    const ContextPattern* find(const Key& key) const;

    const std::map<Key, ContextPattern>& patterns() const { return patterns_; }
    std::size_t size() const { return patterns_.size(); }
    bool empty() const { return patterns_.empty(); }

    void save(const std::filesystem::path& path) const;
    static PatternSet load(const std::filesystem::path& path);
    void write(std::ostream& out) const;
    static PatternSet read(std::istream& in, std::string_view name);

    bool operator==(const PatternSet&) const = default;

private:
    std::map<Key, ContextPattern> patterns_;
};

inline constexpr std::size_t kContextWidth = 2;
inline constexpr std::size_t kMaxCandidateTokens = 4;

// Up to two tokens either side of every gold span, merged by context.
PatternSet learn_patterns(std::span<const TrainingExample> examples);

/// Two-pass product name recognizer.
///
/// Pass one finds gazetteer names by token sequence; overlapping matches go
/// to the longest, then the leftmost. Pass two runs only when pass one found
/// nothing: a run of 1 to 4 non-stopword tokens, at least one of them holding
/// a digit or capitalized in the display text, becomes a span when its
/// neighbouring tokens equal a learned pattern's context. A pattern side that
/// is empty places no constraint. Candidates rank by pattern specificity,
/// then run length, then pattern weight, then position.
class Recognizer {
public:
    Recognizer(const Gazetteer& gazetteer, const PatternSet& patterns,
               std::vector<StopwordSet> stopwords);

    // Uses the builtin general and seed custom stopwords.
    Recognizer(const Gazetteer& gazetteer, const PatternSet& patterns);

    std::vector<EntitySpan> recognize(const Headline& headline) const;
    std::vector<EntitySpan> recognize(std::string_view headline_id, std::string_view text) const;

private:
    std::vector<EntitySpan> gazetteer_pass(std::string_view id, std::string_view text,
                                           const std::vector<Token>& tokens) const;
    std::vector<EntitySpan> pattern_pass(std::string_view id, std::string_view text,
                                         const std::vector<Token>& tokens) const;

    const Gazetteer& gazetteer_;
    const PatternSet& patterns_;
    std::vector<StopwordSet> stopwords_;
};

// Headline id -> spans in order of start offset.
using SpanTable = std::map<std::string, std::vector<EntitySpan>>;

SpanTable recognize_corpus(const Corpus& corpus, const Recognizer& recognizer);

// JSON array of {headline_id, start, end, surface, label, origin}.
void write_spans(const SpanTable& spans, std::ostream& out);
void save_spans(const SpanTable& spans, const std::filesystem::path& path);
SpanTable load_spans(const std::filesystem::path& path);

}  // namespace leakcred
