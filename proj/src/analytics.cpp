#include "leakcred/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "leakcred/error.hpp"
#include "leakcred/text.hpp"

namespace leakcred {

LengthStats length_stats(std::span<const std::size_t> lengths) {
    if (lengths.empty()) throw InvalidArgument("length statistics of an empty selection");
    LengthStats s;
    s.n = lengths.size();
    double sum = 0.0;
    for (auto l : lengths) sum += static_cast<double>(l);
    s.mean = sum / static_cast<double>(s.n);
    // Two-pass variance.
    double sq = 0.0;
    for (auto l : lengths) {
        const double d = static_cast<double>(l) - s.mean;
        sq += d * d;
    }
    s.std_dev = std::sqrt(sq / static_cast<double>(s.n));

    std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
    const std::size_t mid = s.n / 2;
    std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
    if (s.n % 2 == 1) {
        s.median = static_cast<double>(sorted[mid]);
    } else {
        const auto lower = *std::max_element(sorted.begin(), sorted.begin() + mid);
        s.median = (static_cast<double>(lower) + static_cast<double>(sorted[mid])) / 2.0;
    }
    return s;
}

LengthStats length_stats(const Corpus& corpus, HeadlineKind filter) {
    std::vector<std::size_t> lengths;
    for (const auto& h : corpus.headlines()) {
        if (h.kind == filter) lengths.push_back(tokenize(normalize(h.text)).size());
    }
    if (lengths.empty())
        throw InvalidArgument("no " + std::string(to_string(filter)) + " headlines in corpus");
    return length_stats(lengths);
}

ValenceLexicon ValenceLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read valence lexicon: " + path.string());
    std::unordered_map<std::string, double> valences;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        auto where = path.string() + ":" + std::to_string(line_no);
        if (tab == std::string::npos) throw ParseError(where + ": expected word<TAB>valence");
        double v = 0.0;
        try {
            std::size_t used = 0;
            auto field = line.substr(tab + 1);
            if (auto tab2 = field.find('\t'); tab2 != std::string::npos) field.erase(tab2);
            v = std::stod(field, &used);
            if (used != field.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError(where + ": valence is not a number");
        }
        if (!(v >= -4.0 && v <= 4.0)) throw ParseError(where + ": valence outside [-4, 4]");
        valences[normalize(line.substr(0, tab))] = v / 4.0;
    }
    return ValenceLexicon(path.filename().string(), std::move(valences));
}

double ValenceLexicon::valence(std::string_view token) const {
    if (auto it = valences_.find(std::string(token)); it != valences_.end()) return it->second;
    if (auto it = valences_.find(lemmatize(token)); it != valences_.end()) return it->second;
    return 0.0;
}

double compound_score(std::span<const std::string> tokens, const ValenceLexicon& lexicon) {
    double sum = 0.0;
    for (const auto& t : tokens) sum += lexicon.valence(t);
    if (sum == 0.0) return 0.0;
    return std::clamp(sum / std::sqrt(sum * sum + kSentimentAlpha), -1.0, 1.0);
}

SentimentReport sentiment_mean(const Corpus& corpus, const ValenceLexicon& lexicon) {
    struct Acc {
        double sum = 0.0;
        std::size_t n = 0;
    };
    std::map<std::string, Acc> by_source;
    std::map<std::string, Acc> by_kind;
    for (const auto& h : corpus.headlines()) {
        const double score = compound_score(tokenize(normalize(h.text)), lexicon);
        auto& s = by_source[h.source];
        s.sum += score;
        ++s.n;
        auto& k = by_kind[std::string(to_string(h.kind))];
        k.sum += score;
        ++k.n;
    }
    SentimentReport report;
    report.lexicon_id = lexicon.id();
    for (const auto& [src, acc] : by_source) report.per_source_mean[src] = acc.sum / acc.n;
    for (const auto& [kind, acc] : by_kind) report.per_kind_mean[kind] = acc.sum / acc.n;
    return report;
}

std::string_view to_string(VerbTag tag) {
    switch (tag) {
        case VerbTag::VBN: return "VBN";
        case VerbTag::VBZ: return "VBZ";
        case VerbTag::VBG: return "VBG";
        case VerbTag::VBP: return "VBP";
        case VerbTag::VB: return "VB";
        case VerbTag::MD: return "MD";
        case VerbTag::VBD: return "VBD";
    }
    return "?";
}

namespace {

using WordSet = std::set<std::string, std::less<>>;

const WordSet kModals = {"can", "could", "may", "might", "must", "shall", "should", "will",
                         "would"};

const WordSet kAuxiliaries = {"am",  "are", "be",  "been", "being", "get",    "gets", "getting",
                              "got", "had", "has", "have", "having", "is", "was", "were"};

const WordSet kDeterminers = {"a",    "an",    "the",  "this",  "that", "these", "those",
                              "its",  "their", "his",  "her",   "our",  "your",  "my",
                              "new",  "latest", "first", "of",  "for",  "with",  "in",
                              "on",   "at",    "by",   "from",  "some", "any",   "every",
                              "each", "no"};

// Invariant -ing/-ed words that are not verb forms.
const WordSet kNonVerbs = {"thing", "nothing", "something", "anything", "everything", "king",
                           "ring",  "spring",  "string",    "wing",     "during",     "morning",
                           "evening", "ceiling", "sibling", "wedding", "red", "bed", "hundred",
                           "speed", "seed", "shed", "united", "limited", "indeed"};

const std::map<std::string, VerbTag, std::less<>>& irregular_tags() {
    static const std::map<std::string, VerbTag, std::less<>> kTags = [] {
        std::map<std::string, VerbTag, std::less<>> m;
        for (auto w : {"was", "were", "went", "came", "saw", "gave", "began", "broke", "chose",
                       "drew", "drove", "ate", "fell", "flew", "forgot", "froze", "grew", "knew",
                       "ran", "rose", "shook", "sang", "spoke", "stole", "threw", "woke", "wore",
                       "wrote", "did", "took"})
            m[w] = VerbTag::VBD;
        for (auto w : {"been", "gone", "seen", "given", "shown", "begun", "broken", "chosen",
                       "drawn", "driven", "eaten", "fallen", "flown", "forgotten", "frozen",
                       "grown", "known", "risen", "shaken", "spoken", "stolen", "taken",
                       "thrown", "woken", "worn", "written", "done", "gotten"})
            m[w] = VerbTag::VBN;
        for (auto w : {"is", "has", "does", "goes", "says"}) m[w] = VerbTag::VBZ;
        for (auto w : {"are", "am"}) m[w] = VerbTag::VBP;
        for (auto w : {"being", "having", "doing", "going"}) m[w] = VerbTag::VBG;
        m["be"] = VerbTag::VB;
        return m;
    }();
    return kTags;
}

// Past forms that are either VBD or VBN depending on context.
const WordSet kAmbiguousPast = {"made",  "said",   "got",   "had",   "found", "felt",  "heard",
                                "held",  "kept",   "led",   "left",  "lost",  "meant", "met",
                                "paid",  "sold",   "sent",  "spent", "stood", "taught", "told",
                                "thought", "built", "bought", "brought", "caught", "fought",
                                "sought", "won",   "hung",  "bent",  "lent",  "understood",
                                "dealt", "slept"};

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool alphabetic(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

std::vector<std::optional<VerbTag>> VerbTagger::tag(std::span<const std::string> tokens) const {
    std::vector<std::optional<VerbTag>> tags(tokens.size());
    const auto& verbs = verb_lexicon();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& w = tokens[i];
        const std::string_view prev = i > 0 ? std::string_view(tokens[i - 1]) : std::string_view();
        if (!alphabetic(w) || kNonVerbs.contains(w)) continue;

        if (kModals.contains(w)) {
            tags[i] = VerbTag::MD;
        } else if (auto it = irregular_tags().find(w); it != irregular_tags().end()) {
            tags[i] = it->second;
        } else if (verbs.contains(w)) {
            if (prev.empty() || prev == "to" || kModals.contains(prev)) tags[i] = VerbTag::VB;
            else if (!kDeterminers.contains(prev)) tags[i] = VerbTag::VBP;
        } else if (kAmbiguousPast.contains(w) || (w.size() >= 4 && ends_with(w, "ed"))) {
            tags[i] = kAuxiliaries.contains(prev) ? VerbTag::VBN : VerbTag::VBD;
        } else if (w.size() >= 5 && ends_with(w, "ing")) {
            tags[i] = VerbTag::VBG;
        } else if (w.size() > 2 && w.back() == 's' && verbs.contains(lemmatize(w)) &&
                   lemmatize(w) != w) {
            if (!kDeterminers.contains(prev)) tags[i] = VerbTag::VBZ;
        }
    }
    return tags;
}

VerbProfile::VerbProfile() {
    for (auto t : kVerbTags) counts[t] = 0;
}

std::size_t VerbProfile::total() const {
    std::size_t n = 0;
    for (const auto& [tag, c] : counts) n += c;
    return n;
}

VerbProfile verb_profile(const Corpus& corpus, const VerbTagger& tagger,
                         std::optional<HeadlineKind> filter) {
    VerbProfile profile;
    for (const auto& h : corpus.headlines()) {
        if (filter && h.kind != *filter) continue;
        const auto tokens = tokenize(normalize(h.text));
        for (const auto& tag : tagger.tag(tokens)) {
            if (tag) ++profile.counts[*tag];
        }
    }
    return profile;
}

}  // namespace leakcred
