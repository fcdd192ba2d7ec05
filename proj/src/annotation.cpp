#include "leakcred/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "csv.hpp"
#include "leakcred/error.hpp"

namespace leakcred {

namespace {

std::map<std::string, int> by_id(std::span<const AnnotationRecord> records, const char* which) {
    std::map<std::string, int> out;
    for (const auto& r : records) {
        if (r.verdict != 0 && r.verdict != 1)
            throw InvalidArgument(std::string(which) + ": verdict must be 0 or 1");
        if (!out.emplace(r.headline_id, r.verdict).second)
            throw InvalidArgument(std::string(which) + ": headline " + r.headline_id +
                                  " annotated twice");
    }
    return out;
}

}  // namespace

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read annotation file: " + path.string());
    std::vector<AnnotationRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line_no == 1 && line.rfind("headline_id", 0) == 0) continue;
        const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
        auto cols = csv::split(line);
        if (cols.size() < 3 || cols.size() > 4)
            throw ParseError(where + "expected headline_id,annotator,verdict[,name]");
        AnnotationRecord r;
        r.headline_id = cols[0];
        r.annotator = cols[1];
        if (cols[2] == "0") r.verdict = 0;
        else if (cols[2] == "1") r.verdict = 1;
        else throw ParseError(where + "verdict must be 0 or 1");
        if (cols.size() == 4 && !cols[3].empty()) r.name = cols[3];
        if (r.headline_id.empty()) throw ParseError(where + "empty headline id");
        out.push_back(std::move(r));
    }
    return out;
}

AgreementReport kappa(std::span<const AnnotationRecord> first,
                      std::span<const AnnotationRecord> second) {
    const auto a = by_id(first, "first annotator");
    const auto b = by_id(second, "second annotator");
    if (a.empty()) throw InvalidArgument("no annotations");
    if (a.size() != b.size() ||
        !std::equal(a.begin(), a.end(), b.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; }))
        throw InvalidArgument("annotators labelled different headline sets");

    // Integer counts keep the result exact and symmetric.
    long long n = 0, agree = 0, a1 = 0, b1 = 0;
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        ++n;
        agree += ia->second == ib->second;
        a1 += ia->second;
        b1 += ib->second;
    }
    const long long chance = a1 * b1 + (n - a1) * (n - b1);  // pr_e * n^2
    AgreementReport r;
    r.n = static_cast<std::size_t>(n);
    r.pr_a = static_cast<double>(agree) / static_cast<double>(n);
    r.pr_e = static_cast<double>(chance) / static_cast<double>(n * n);
    if (chance == n * n) {
        if (agree != n) throw InvalidArgument("kappa undefined: chance agreement is 1");
        r.kappa = 1.0;
    } else {
        r.kappa = static_cast<double>(agree * n - chance) / static_cast<double>(n * n - chance);
    }
    return r;
}

double percentile_threshold(std::span<const double> scores, double percentile) {
    if (scores.empty()) throw InvalidArgument("percentile of an empty score list");
    if (!(percentile > 0.0 && percentile < 100.0))
        throw InvalidArgument("percentile must lie in (0, 100)");
    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    // The epsilon absorbs rounding in p*n/100 when it is an exact integer.
    auto rank = static_cast<std::size_t>(std::ceil(percentile * n / 100.0 - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

EvaluationResult evaluate(const SpanTable& predictions,
                          std::span<const AnnotationRecord> annotations,
                          const Similarity& similarity, std::span<const StopwordSet> stopwords,
                          double threshold) {
    std::map<std::string, std::vector<const AnnotationRecord*>> grouped;
    for (const auto& r : annotations) grouped[r.headline_id].push_back(&r);

    EvaluationResult result;
    for (const auto& [id, records] : grouped) {
        const int verdict = records.front()->verdict;
        const bool agreed = std::all_of(records.begin(), records.end(),
                                        [&](const auto* r) { return r->verdict == verdict; });
        if (!agreed) continue;
        ++result.agreed;

        std::optional<std::string> gold;
        for (const auto* r : records) {
            if (r->name) {
                gold = r->name;
                break;
            }
        }
        double best = 0.0;
        auto it = predictions.find(id);
        if (it != predictions.end() && (gold || verdict == 1)) {
            for (const auto& span : it->second) {
                const auto predicted = process_surface(span.surface, stopwords);
                const auto expected = process_surface(gold ? *gold : span.surface, stopwords);
                best = std::max(best, similarity(predicted, expected));
            }
        }
        const bool correct = best >= threshold;
        result.correct += correct;
        result.per_headline.push_back(HeadlineScore{id, best, correct});
    }
    if (result.agreed == 0) throw InvalidArgument("annotators agree on no headline");
    result.accuracy = static_cast<double>(result.correct) / static_cast<double>(result.agreed);
    return result;
}

}  // namespace leakcred
