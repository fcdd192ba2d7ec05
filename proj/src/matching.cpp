#include "leakcred/matching.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "csv.hpp"
#include "leakcred/error.hpp"

namespace leakcred {

using json = nlohmann::ordered_json;

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out.push_back(' ');
        out += p;
    }
    return out;
}

std::string time_field(const std::optional<Timestamp>& t) {
    return t ? format_rfc3339(*t) : std::string();
}

}  // namespace

BinningResult bin(const Corpus& corpus, const SpanTable& spans, const Similarity& similarity,
                  double threshold, std::span<const StopwordSet> stopwords) {
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw InvalidArgument("threshold must lie in (0, 1]");

    struct Member {
        const Headline* headline;
        std::string key;
        std::string label;
    };
    std::vector<Member> members;
    std::map<std::string, std::vector<std::string>> key_tokens;
    BinningResult result;
    for (const auto& h : corpus.headlines()) {
        auto it = spans.find(h.id);
        if (it == spans.end() || it->second.empty()) {
            ++result.unbinned;
            continue;
        }
        const auto& first = *std::min_element(
            it->second.begin(), it->second.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
        auto tokens = process_surface(first.surface, stopwords);
        if (tokens.empty()) {
            ++result.unbinned;
            continue;
        }
        auto key = join(tokens);
        key_tokens.emplace(key, std::move(tokens));
        members.push_back(Member{&h, std::move(key), first.label});
    }

    // Keys are visited in sorted order, so index order is key order.
    std::vector<std::string> keys;
    std::map<std::string, std::size_t> index;
    for (const auto& [key, tokens] : key_tokens) {
        index.emplace(key, keys.size());
        keys.push_back(key);
    }
    DisjointSets sets(keys.size());
    for (std::size_t a = 0; a < keys.size(); ++a) {
        for (std::size_t b = a + 1; b < keys.size(); ++b) {
            if (similarity(key_tokens[keys[a]], key_tokens[keys[b]]) >= threshold) sets.unite(a, b);
        }
    }

    // Union by minimum index makes each root the smallest key of its group.
    std::map<std::size_t, ProductBin> groups;
    std::map<std::size_t, std::map<std::string, std::size_t>> label_votes;
    for (const auto& m : members) {
        const auto root = sets.find(index.at(m.key));
        auto& bin = groups[root];
        bin.product_key = keys[root];
        (m.headline->kind == HeadlineKind::leak ? bin.leak_ids : bin.pr_ids)
            .push_back(m.headline->id);
        ++label_votes[root][m.label];
    }
    for (auto& [root, bin] : groups) {
        std::size_t best = 0;
        for (const auto& [label, votes] : label_votes[root]) {
            if (votes > best) {
                best = votes;
                bin.label = label;
            }
        }
        std::sort(bin.leak_ids.begin(), bin.leak_ids.end());
        std::sort(bin.pr_ids.begin(), bin.pr_ids.end());
        result.bins.push_back(std::move(bin));
    }
    std::sort(result.bins.begin(), result.bins.end(),
              [](const ProductBin& a, const ProductBin& b) { return a.product_key < b.product_key; });
    return result;
}

void write_bins(std::span<const ProductBin> bins, std::ostream& out) {
    json arr = json::array();
    for (const auto& b : bins) {
        arr.push_back(json{{"product_key", b.product_key},
                           {"label", b.label},
                           {"leak_ids", b.leak_ids},
                           {"pr_ids", b.pr_ids}});
    }
    out << arr.dump(2) << '\n';
}

void save_bins(std::span<const ProductBin> bins, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write bin file: " + path.string());
    write_bins(bins, out);
}

std::vector<ProductBin> load_bins(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read bin file: " + path.string());
    std::vector<ProductBin> bins;
    try {
        const auto doc = json::parse(in);
        if (!doc.is_array()) throw ParseError("bin file must hold a JSON array");
        for (const auto& j : doc) {
            ProductBin b;
            b.product_key = j.at("product_key").get<std::string>();
            b.label = j.at("label").get<std::string>();
            b.leak_ids = j.at("leak_ids").get<std::vector<std::string>>();
            b.pr_ids = j.at("pr_ids").get<std::vector<std::string>>();
            bins.push_back(std::move(b));
        }
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return bins;
}

std::optional<TruthAssignment> assign_truth(const ProductBin& bin, const Corpus& corpus,
                                            const std::string& blog,
                                            const TruthOptions& options) {
    TruthAssignment a;
    a.blog = blog;
    a.product_key = bin.product_key;
    bool has_leak = false;
    for (const auto& id : bin.leak_ids) {
        const Headline* h = corpus.find(id);
        if (h == nullptr || h->source != blog || h->kind != HeadlineKind::leak) continue;
        has_leak = true;
        if (auto t = h->effective_time(); t && (!a.first_leak_time || *t < *a.first_leak_time))
            a.first_leak_time = t;
    }
    if (!has_leak || !a.first_leak_time) return std::nullopt;
    for (const auto& id : bin.pr_ids) {
        const Headline* h = corpus.find(id);
        if (h == nullptr || h->kind != HeadlineKind::press_release) continue;
        if (auto t = h->effective_time(); t && (!a.first_pr_time || *t < *a.first_pr_time))
            a.first_pr_time = t;
    }
    if (a.first_pr_time) {
        // Strict precedence: a tie goes against the leak.
        a.t = *a.first_leak_time < *a.first_pr_time ? 1 : 0;
        a.f = 1 - a.t;
    } else if (!options.defer_undefined) {
        a.f = 1;
    }
    return a;
}

std::vector<TruthAssignment> assign_all(std::span<const ProductBin> bins, const Corpus& corpus,
                                        const TruthOptions& options) {
    std::vector<TruthAssignment> out;
    for (const auto& [source, kind] : corpus.source_registry()) {
        if (kind != HeadlineKind::leak) continue;
        for (const auto& b : bins) {
            if (auto a = assign_truth(b, corpus, source, options)) out.push_back(std::move(*a));
        }
    }
    std::sort(out.begin(), out.end(), [](const TruthAssignment& x, const TruthAssignment& y) {
        return std::tie(x.blog, x.product_key) < std::tie(y.blog, y.product_key);
    });
    return out;
}

void write_truth(std::span<const TruthAssignment> rows, std::ostream& out) {
    out << "blog,product_key,t,f,first_leak_time,first_pr_time\n";
    for (const auto& r : rows) {
        out << csv::field(r.blog) << ',' << csv::field(r.product_key) << ',' << r.t << ',' << r.f << ','
            << time_field(r.first_leak_time) << ',' << time_field(r.first_pr_time) << '\n';
    }
}

void save_truth(std::span<const TruthAssignment> rows, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write truth file: " + path.string());
    write_truth(rows, out);
}

std::vector<TruthAssignment> load_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read truth file: " + path.string());
    std::vector<TruthAssignment> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("blog,", 0) == 0)) continue;
        const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
        const auto cols = csv::split(line);
        if (cols.size() != 6) throw ParseError(where + "expected 6 columns");
        TruthAssignment r;
        r.blog = cols[0];
        r.product_key = cols[1];
        if ((cols[2] != "0" && cols[2] != "1") || (cols[3] != "0" && cols[3] != "1"))
            throw ParseError(where + "t and f must be 0 or 1");
        r.t = cols[2][0] - '0';
        r.f = cols[3][0] - '0';
        for (int i : {4, 5}) {
            if (cols[i].empty()) continue;
            auto t = parse_rfc3339(cols[i]);
            if (!t) throw ParseError(where + "bad timestamp " + cols[i]);
            (i == 4 ? r.first_leak_time : r.first_pr_time) = t;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace leakcred
