#include "leakcred/entity.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "leakcred/error.hpp"

namespace leakcred {

using json = nlohmann::ordered_json;

namespace {

std::string join(std::span<const std::string> parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out.push_back(' ');
        out += p;
    }
    return out;
}

std::string join_tokens(const std::vector<Token>& tokens, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out.push_back(' ');
        out += tokens[i].text;
    }
    return out;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens, std::size_t begin,
                                     std::size_t end) {
    std::vector<std::string> out;
    for (std::size_t i = begin; i < end; ++i) out.push_back(tokens[i].text);
    return out;
}

std::vector<std::string> string_list(const json& j, std::string_view what) {
    if (!j.is_array()) throw ParseError(std::string(what) + " must be an array");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string()) throw ParseError(std::string(what) + " entries must be strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

}  // namespace

bool is_valid_label(std::string_view label) {
    if (label.size() <= 3 || label.substr(label.size() - 3) != "_sp") return false;
    return std::all_of(label.begin(), label.end() - 3, [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
    });
}

std::string label_from_hint(std::string_view hint) {
    std::string label(hint);
    if (label.size() < 3 || label.substr(label.size() - 3) != "_sp") label += "_sp";
    return label;
}

Template Template::make(std::string_view text, std::optional<std::string_view> hint) {
    Template t;
    t.text = collapse(text);
    const auto first = t.text.find(kSlotMarker);
    if (first == std::string::npos) throw InvalidArgument("template has no XXX slot: " + t.text);
    if (t.text.find(kSlotMarker, first + 1) != std::string::npos)
        throw InvalidArgument("template has more than one XXX slot: " + t.text);
    if (t.text.size() == kSlotMarker.size())
        throw InvalidArgument("template holds nothing but the slot");
    if (hint && !hint->empty()) {
        t.company_hint = label_from_hint(*hint);
        if (!is_valid_label(*t.company_hint))
            throw InvalidArgument("invalid company hint: " + std::string(*hint));
    }
    return t;
}

std::vector<Template> load_templates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read template file: " + path.string());
    std::vector<Template> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto tab = line.find('\t');
        try {
            if (tab == std::string::npos) {
                out.push_back(Template::make(line));
            } else {
                out.push_back(Template::make(std::string_view(line).substr(0, tab),
                                             std::string_view(line).substr(tab + 1)));
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string Gazetteer::key_of(std::string_view name) { return join(tokenize(normalize(name))); }

void Gazetteer::add(std::string_view name, const std::string& label) {
    if (!is_valid_label(label)) throw InvalidArgument("invalid label: " + label);
    std::string key = key_of(name);
    if (key.empty()) throw InvalidArgument("gazetteer name has no tokens");
    auto [it, inserted] = entries_.try_emplace(key, Entry{collapse(name), label});
    if (!inserted && it->second.label != label)
        throw InvalidArgument("name '" + key + "' bound to both " + it->second.label + " and " +
                              label);
    companies_.insert(label);
    max_tokens_ = std::max(max_tokens_, tokenize(key).size());
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read gazetteer: " + path.string());
    Gazetteer g;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
        const auto tab = line.find('\t');
        const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
        if (tab == std::string::npos) throw ParseError(where + "expected name<TAB>label");
        try {
            g.add(line.substr(0, tab), line.substr(tab + 1));
        } catch (const InvalidArgument& e) {
            throw ParseError(where + e.what());
        }
    }
    return g;
}

const Gazetteer::Entry* Gazetteer::find(std::string_view key) const {
    auto it = entries_.find(std::string(key));
    return it == entries_.end() ? nullptr : &it->second;
}

std::string_view to_string(SpanOrigin o) {
    return o == SpanOrigin::gazetteer ? "gazetteer" : "pattern";
}

std::vector<TrainingExample> expand_templates(std::span<const Template> templates,
                                              const Gazetteer& gazetteer) {
    if (gazetteer.empty()) throw InvalidArgument("template expansion needs a non-empty gazetteer");
    std::vector<TrainingExample> out;
    for (const auto& tmpl : templates) {
        const auto slot = tmpl.text.find(kSlotMarker);
        if (slot == std::string::npos) throw InvalidArgument("template has no XXX slot");
        for (const auto& [key, entry] : gazetteer.entries()) {
            if (tmpl.company_hint && *tmpl.company_hint != entry.label) continue;
            TrainingExample ex;
            ex.id = "t" + std::to_string(out.size());
            ex.text = tmpl.text;
            ex.text.replace(slot, kSlotMarker.size(), entry.name);
            ex.gold.push_back(EntitySpan{ex.id, slot, slot + entry.name.size(), entry.name,
                                         entry.label, SpanOrigin::gazetteer});
            out.push_back(std::move(ex));
        }
    }
    return out;
}

void write_training_set(std::span<const TrainingExample> examples, std::ostream& out) {
    for (const auto& ex : examples) {
        json ents = json::array();
        for (const auto& s : ex.gold) ents.push_back(json::array({s.start, s.end, s.label}));
        out << json::array({ex.text, json{{"entities", ents}}}).dump() << '\n';
    }
}

std::string ContextPattern::majority_label() const {
    std::string best;
    std::size_t best_weight = 0;
    for (const auto& [label, w] : label_weights) {
        // map order makes the first maximum the smallest label
        if (w > best_weight) {
            best = label;
            best_weight = w;
        }
    }
    return best;
}

void PatternSet::add(std::vector<std::string> left, std::vector<std::string> right,
                     const std::string& label, std::size_t weight) {
    if (left.empty() && right.empty()) throw InvalidArgument("pattern without context");
    if (left.size() > kContextWidth || right.size() > kContextWidth)
        throw InvalidArgument("pattern context wider than two tokens");
    if (weight == 0) throw InvalidArgument("pattern weight must be positive");
    Key key{std::move(left), std::move(right)};
    auto [it, inserted] = patterns_.try_emplace(key);
    if (inserted) {
        it->second.left = key.first;
        it->second.right = key.second;
    }
    it->second.weight += weight;
    it->second.label_weights[label] += weight;
}

const ContextPattern* PatternSet::find(const Key& key) const {
    auto it = patterns_.find(key);
    return it == patterns_.end() ? nullptr : &it->second;
}

void PatternSet::write(std::ostream& out) const {
    json arr = json::array();
    for (const auto& [key, p] : patterns_) {
        json labels = json::object();
        for (const auto& [label, w] : p.label_weights) labels[label] = w;
        arr.push_back(json{{"left", p.left}, {"right", p.right}, {"weight", p.weight},
                           {"labels", labels}});
    }
    out << json{{"patterns", arr}}.dump(2) << '\n';
}

PatternSet PatternSet::read(std::istream& in, std::string_view name) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(name) + ": " + e.what());
    }
    PatternSet set;
    try {
        if (!doc.is_object() || !doc.contains("patterns"))
            throw ParseError("missing \"patterns\" array");
        for (const auto& p : doc.at("patterns")) {
            auto left = string_list(p.at("left"), "left");
            auto right = string_list(p.at("right"), "right");
            std::size_t total = 0;
            const auto& labels = p.at("labels");
            if (!labels.is_object() || labels.empty()) throw ParseError("pattern without labels");
            for (const auto& [label, w] : labels.items()) {
                const auto weight = w.get<std::size_t>();
                set.add(left, right, label, weight);
                total += weight;
            }
            if (total != p.at("weight").get<std::size_t>())
                throw ParseError("pattern weight differs from its label weights");
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string(name) + ": " + e.what());
    } catch (const Error& e) {
        throw ParseError(std::string(name) + ": " + e.what());
    }
    return set;
}

void PatternSet::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write pattern file: " + path.string());
    write(out);
}

PatternSet PatternSet::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read pattern file: " + path.string());
    return read(in, path.string());
}

PatternSet learn_patterns(std::span<const TrainingExample> examples) {
    PatternSet set;
    for (const auto& ex : examples) {
        for (const auto& span : ex.gold) {
            auto before = tokenize(std::string_view(ex.text).substr(0, span.start));
            auto after = tokenize(std::string_view(ex.text).substr(span.end));
            const auto nl = std::min(before.size(), kContextWidth);
            const auto nr = std::min(after.size(), kContextWidth);
            std::vector<std::string> left(before.end() - static_cast<std::ptrdiff_t>(nl),
                                          before.end());
            std::vector<std::string> right(after.begin(),
                                           after.begin() + static_cast<std::ptrdiff_t>(nr));
            if (left.empty() && right.empty()) continue;
            set.add(std::move(left), std::move(right), span.label);
        }
    }
    return set;
}

Recognizer::Recognizer(const Gazetteer& gazetteer, const PatternSet& patterns,
                       std::vector<StopwordSet> stopwords)
    : gazetteer_(gazetteer), patterns_(patterns), stopwords_(std::move(stopwords)) {}

Recognizer::Recognizer(const Gazetteer& gazetteer, const PatternSet& patterns)
    : Recognizer(gazetteer, patterns, {builtin_general_stopwords(), seed_custom_stopwords()}) {}

std::vector<EntitySpan> Recognizer::recognize(const Headline& headline) const {
    return recognize(headline.id, headline.text);
}

std::vector<EntitySpan> Recognizer::recognize(std::string_view headline_id,
                                              std::string_view text) const {
    const auto tokens = tokenize_with_offsets(text);
    auto spans = gazetteer_pass(headline_id, text, tokens);
    if (spans.empty()) spans = pattern_pass(headline_id, text, tokens);
    return spans;
}

namespace {

struct Candidate {
    std::size_t begin;  // token index
    std::size_t end;
    std::size_t specificity = 0;
    std::size_t weight = 0;
    std::string label;
};

// Keeps candidates in the given priority order, dropping any that overlap
// an already kept one, then sorts by position.
std::vector<Candidate> select_disjoint(std::vector<Candidate> ranked) {
    std::vector<Candidate> kept;
    for (auto& c : ranked) {
        const bool overlaps = std::any_of(kept.begin(), kept.end(), [&](const Candidate& k) {
            return c.begin < k.end && k.begin < c.end;
        });
        if (!overlaps) kept.push_back(std::move(c));
    }
    std::sort(kept.begin(), kept.end(),
              [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; });
    return kept;
}

EntitySpan make_span(std::string_view id, std::string_view text, const std::vector<Token>& tokens,
                     const Candidate& c, SpanOrigin origin) {
    EntitySpan s;
    s.headline_id = std::string(id);
    s.start = tokens[c.begin].begin;
    s.end = tokens[c.end - 1].end;
    s.surface = std::string(text.substr(s.start, s.end - s.start));
    s.label = c.label;
    s.origin = origin;
    return s;
}

}  // namespace

std::vector<EntitySpan> Recognizer::gazetteer_pass(std::string_view id, std::string_view text,
                                                   const std::vector<Token>& tokens) const {
    std::vector<Candidate> found;
    const std::size_t n = tokens.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t longest = std::min(gazetteer_.max_tokens(), n - i);
        for (std::size_t len = 1; len <= longest; ++len) {
            if (const auto* entry = gazetteer_.find(join_tokens(tokens, i, i + len)))
                found.push_back(Candidate{i, i + len, 0, 0, entry->label});
        }
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        const auto la = a.end - a.begin;
        const auto lb = b.end - b.begin;
        return la != lb ? la > lb : a.begin < b.begin;
    });
    std::vector<EntitySpan> spans;
    for (const auto& c : select_disjoint(std::move(found)))
        spans.push_back(make_span(id, text, tokens, c, SpanOrigin::gazetteer));
    return spans;
}

std::vector<EntitySpan> Recognizer::pattern_pass(std::string_view id, std::string_view text,
                                                 const std::vector<Token>& tokens) const {
    if (patterns_.empty()) return {};
    const std::size_t n = tokens.size();
    std::vector<bool> eligible(n);
    for (std::size_t i = 0; i < n; ++i) eligible[i] = !is_stopword(tokens[i].text, stopwords_);

    std::vector<Candidate> found;
    for (std::size_t i = 0; i < n; ++i) {
        bool marked = false;  // digit or capital seen in the run so far
        for (std::size_t len = 1; len <= kMaxCandidateTokens && i + len <= n; ++len) {
            const std::size_t j = i + len;
            if (!eligible[j - 1]) break;
            marked = marked || tokens[j - 1].has_digit || tokens[j - 1].capitalized;
            if (!marked) continue;

            const ContextPattern* best = nullptr;     // ranking pattern
            const ContextPattern* heaviest = nullptr; // label source
            for (std::size_t nl = 0; nl <= std::min(kContextWidth, i); ++nl) {
                for (std::size_t nr = 0; nr <= std::min(kContextWidth, n - j); ++nr) {
                    if (nl == 0 && nr == 0) continue;
                    const auto* p = patterns_.find({token_texts(tokens, i - nl, i),
                                                    token_texts(tokens, j, j + nr)});
                    if (p == nullptr) continue;
                    if (best == nullptr || std::pair(p->specificity(), p->weight) >
                                               std::pair(best->specificity(), best->weight))
                        best = p;
                    if (heaviest == nullptr || p->weight > heaviest->weight) heaviest = p;
                }
            }
            if (best != nullptr)
                found.push_back(Candidate{i, j, best->specificity(), best->weight,
                                          heaviest->majority_label()});
        }
    }
    std::sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
        const auto la = a.end - a.begin;
        const auto lb = b.end - b.begin;
        if (a.specificity != b.specificity) return a.specificity > b.specificity;
        if (la != lb) return la > lb;
        if (a.weight != b.weight) return a.weight > b.weight;
        return a.begin < b.begin;
    });
    std::vector<EntitySpan> spans;
    for (const auto& c : select_disjoint(std::move(found)))
        spans.push_back(make_span(id, text, tokens, c, SpanOrigin::pattern));
    return spans;
}

SpanTable recognize_corpus(const Corpus& corpus, const Recognizer& recognizer) {
    SpanTable table;
    for (const auto& h : corpus.headlines()) {
        auto spans = recognizer.recognize(h);
        if (!spans.empty()) table.emplace(h.id, std::move(spans));
    }
    return table;
}

void write_spans(const SpanTable& spans, std::ostream& out) {
    json arr = json::array();
    for (const auto& [id, list] : spans) {
        for (const auto& s : list) {
            arr.push_back(json{{"headline_id", s.headline_id},
                               {"start", s.start},
                               {"end", s.end},
                               {"surface", s.surface},
                               {"label", s.label},
                               {"origin", to_string(s.origin)}});
        }
    }
    out << arr.dump(2) << '\n';
}

void save_spans(const SpanTable& spans, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write span file: " + path.string());
    write_spans(spans, out);
}

SpanTable load_spans(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read span file: " + path.string());
    SpanTable table;
    try {
        const auto doc = json::parse(in);
        if (!doc.is_array()) throw ParseError("span file must hold a JSON array");
        for (const auto& j : doc) {
            EntitySpan s;
            s.headline_id = j.at("headline_id").get<std::string>();
            s.start = j.at("start").get<std::size_t>();
            s.end = j.at("end").get<std::size_t>();
            s.surface = j.at("surface").get<std::string>();
            s.label = j.at("label").get<std::string>();
            const auto origin = j.at("origin").get<std::string>();
            if (origin == "gazetteer") s.origin = SpanOrigin::gazetteer;
            else if (origin == "pattern") s.origin = SpanOrigin::pattern;
            else throw ParseError("unknown span origin: " + origin);
            if (s.start >= s.end || s.end - s.start != s.surface.size())
                throw ParseError("span offsets disagree with surface for " + s.headline_id);
            table[s.headline_id].push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    for (auto& [id, list] : table) {
        std::sort(list.begin(), list.end(),
                  [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
    }
    return table;
}

}  // namespace leakcred
