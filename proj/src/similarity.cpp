#include "leakcred/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "leakcred/error.hpp"

namespace leakcred {

std::optional<Metric> parse_metric(std::string_view s) {
    if (s == "jaccard") return Metric::jaccard;
    if (s == "cosine") return Metric::cosine;
    return std::nullopt;
}

std::string_view to_string(Metric m) { return m == Metric::jaccard ? "jaccard" : "cosine"; }

std::vector<std::string> process_surface(std::string_view surface,
                                         std::span<const StopwordSet> stopwords) {
    std::vector<std::string> out;
    for (const auto& tok : tokenize(normalize(surface))) {
        if (is_stopword(tok, stopwords)) continue;
        out.push_back(lemmatize(tok));
    }
    return out;
}

Ratio jaccard_ratio(std::span<const std::string> a, std::span<const std::string> b) {
    std::set<std::string_view> sa(a.begin(), a.end());
    std::set<std::string_view> sb(b.begin(), b.end());
    std::size_t common = 0;
    for (auto w : sa) common += sb.count(w);
    return Ratio{common, sa.size() + sb.size() - common};
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
    return jaccard_ratio(a, b).value();
}

VectorTable VectorTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read vector file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty vector file");
    std::istringstream header(line);
    std::size_t vocab = 0;
    std::size_t dim = 0;
    if (!(header >> vocab >> dim) || dim == 0)
        throw ParseError(path.string() + ":1: expected header 'V D'");
    VectorTable table(dim);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream row(line);
        std::string word;
        row >> word;
        std::vector<float> vec;
        vec.reserve(dim);
        float f;
        while (row >> f) vec.push_back(f);
        if (!row.eof() || vec.size() != dim)
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(dim) + " components");
        table.add(std::move(word), std::move(vec));
    }
    if (line_no - 1 < vocab)
        throw ParseError(path.string() + ": header announces " + std::to_string(vocab) +
                         " words, file is truncated");
    return table;
}

void VectorTable::add(std::string word, std::vector<float> vec) {
    if (dimension_ == 0) dimension_ = vec.size();
    if (vec.size() != dimension_) throw InvalidArgument("vector dimension mismatch for " + word);
    vectors_.try_emplace(normalize(word), std::move(vec));
}

const std::vector<float>* VectorTable::find(std::string_view word) const {
    auto it = vectors_.find(std::string(word));
    return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<double> VectorTable::mean_pool(std::span<const std::string> tokens) const {
    std::vector<double> pooled(dimension_, 0.0);
    if (tokens.empty()) return pooled;
    for (const auto& t : tokens) {
        if (const auto* v = find(t)) {
            for (std::size_t i = 0; i < dimension_; ++i) pooled[i] += (*v)[i];
        }
    }
    for (auto& x : pooled) x /= static_cast<double>(tokens.size());
    return pooled;
}

double cosine(std::span<const std::string> a, std::span<const std::string> b,
              const VectorTable& vectors) {
    const auto va = vectors.mean_pool(a);
    const auto vb = vectors.mean_pool(b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        dot += va[i] * vb[i];
        na += va[i] * va[i];
        nb += vb[i] * vb[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Similarity::Similarity(Metric metric, const VectorTable* vectors)
    : metric_(metric), vectors_(vectors) {
    if (metric_ == Metric::cosine && vectors_ == nullptr)
        throw InvalidArgument("cosine similarity needs a vector table");
}

double Similarity::operator()(std::span<const std::string> a,
                              std::span<const std::string> b) const {
    return metric_ == Metric::jaccard ? jaccard(a, b) : cosine(a, b, *vectors_);
}

}  // namespace leakcred
