#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leakcred/entity.hpp"
#include "leakcred/similarity.hpp"

namespace leakcred {

struct AnnotationRecord {
    std::string headline_id;
    std::string annotator;
    int verdict = 0;                  // 1: predicted name judged correct
    std::optional<std::string> name;  // product name written by the annotator

    bool operator==(const AnnotationRecord&) const = default;
};

// CSV "headline_id,annotator,verdict" with an optional fourth "name" column.
// A first line starting with "headline_id" is taken as a header.
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path);

struct AgreementReport {
    double pr_a = 0.0;
    double pr_e = 0.0;
    double kappa = 0.0;
    std::size_t n = 0;
};

// Cohen's kappa for two binary annotators over the same headline ids.
AgreementReport kappa(std::span<const AnnotationRecord> first,
                      std::span<const AnnotationRecord> second);

// Nearest-rank percentile: the smallest score with at least p% of the
// scores at or below it. p must lie in (0, 100).
double percentile_threshold(std::span<const double> scores, double percentile);

struct HeadlineScore {
    std::string headline_id;
    double similarity = 0.0;
    bool correct = false;
};

struct EvaluationResult {
    double accuracy = 0.0;
    std::size_t agreed = 0;
    std::size_t correct = 0;
    std::vector<HeadlineScore> per_headline;
};

inline constexpr double kDefaultThreshold = 0.5;

// Scores predictions on the headlines whose annotators all agree. The gold
// name is the annotated name when one is given; otherwise a positive verdict
// confirms the prediction and a negative one scores zero. Predicted and gold
// names are compared after lemmatization and stopword removal; a headline
// with several spans takes its best span.
EvaluationResult evaluate(const SpanTable& predictions,
                          std::span<const AnnotationRecord> annotations,
                          const Similarity& similarity, std::span<const StopwordSet> stopwords,
                          double threshold = kDefaultThreshold);

}  // namespace leakcred
