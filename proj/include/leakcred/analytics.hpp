#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leakcred/corpus.hpp"

namespace leakcred {

// Word-count statistics. std_dev is the population standard deviation.
struct LengthStats {
    double mean = 0.0;
    double median = 0.0;
    double std_dev = 0.0;
    std::size_t n = 0;
};

LengthStats length_stats(std::span<const std::size_t> lengths);

// Token counts of every headline of the given kind. Throws InvalidArgument
// when nothing is selected.
LengthStats length_stats(const Corpus& corpus, HeadlineKind filter);

/// Word valences rescaled from the [-4, 4] file range to [-1, 1].
class ValenceLexicon {
public:
    ValenceLexicon() = default;
    ValenceLexicon(std::string id, std::unordered_map<std::string, double> valences)
        : id_(std::move(id)), valences_(std::move(valences)) {}

    // TSV "word<TAB>valence", valence in [-4, 4].
    static ValenceLexicon load(const std::filesystem::path& path);

    // Token lookup with a lemma fallback; unknown words are neutral.
    double valence(std::string_view token) const;
    const std::string& id() const { return id_; }
    std::size_t size() const { return valences_.size(); }

private:
    std::string id_;
    std::unordered_map<std::string, double> valences_;
};

inline constexpr double kSentimentAlpha = 15.0;

// S / sqrt(S^2 + alpha) over the summed token valences S, clamped to [-1, 1].
double compound_score(std::span<const std::string> tokens, const ValenceLexicon& lexicon);

struct SentimentReport {
    std::map<std::string, double> per_source_mean;
    std::map<std::string, double> per_kind_mean;  // keyed "leak" / "press_release"
    std::string lexicon_id;
};

SentimentReport sentiment_mean(const Corpus& corpus, const ValenceLexicon& lexicon);

enum class VerbTag { VBN, VBZ, VBG, VBP, VB, MD, VBD };

inline constexpr std::array<VerbTag, 7> kVerbTags = {VerbTag::VBN, VerbTag::VBZ, VerbTag::VBG,
                                                     VerbTag::VBP, VerbTag::VB,  VerbTag::MD,
                                                     VerbTag::VBD};

std::string_view to_string(VerbTag tag);

/// Lookup-then-suffix verb tagger.
///
/// Order of rules per token: modal list, irregular form table, bare known
/// verbs (VB after "to", a modal or at the start, VBP after anything else),
/// -ed and ambiguous past forms (VBN after a be/have/get auxiliary, VBD
/// otherwise), -ing, then -s forms of known verbs. Bare and -s forms that
/// follow a determiner are read as nouns and left untagged.
class VerbTagger {
public:
    std::vector<std::optional<VerbTag>> tag(std::span<const std::string> tokens) const;
};

struct VerbProfile {
    std::map<VerbTag, std::size_t> counts;

    VerbProfile();
    std::size_t total() const;
};

// Per-token occurrence counts; `filter` restricts to one kind.
VerbProfile verb_profile(const Corpus& corpus, const VerbTagger& tagger,
                         std::optional<HeadlineKind> filter = std::nullopt);

}  // namespace leakcred
