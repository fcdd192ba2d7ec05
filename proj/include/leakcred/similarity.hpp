#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leakcred/text.hpp"

namespace leakcred {

enum class Metric { jaccard, cosine };

std::optional<Metric> parse_metric(std::string_view s);
std::string_view to_string(Metric m);

// Surface text reduced to comparable tokens: normalized, tokenized,
// lemmatized, stopwords removed.
std::vector<std::string> process_surface(std::string_view surface,
                                         std::span<const StopwordSet> stopwords);

struct Ratio {
    std::size_t num = 0;
    std::size_t den = 0;
    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / den; }
};

// |A ∩ B| / |A ∪ B| over the distinct tokens. Two empty sets give 0/0,
// which value() reports as 0.
Ratio jaccard_ratio(std::span<const std::string> a, std::span<const std::string> b);
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

/// Word vectors read from the "V D" header text format.
class VectorTable {
public:
    VectorTable() = default;
    explicit VectorTable(std::size_t dimension) : dimension_(dimension) {}

    static VectorTable load(const std::filesystem::path& path);

    void add(std::string word, std::vector<float> vec);
    const std::vector<float>* find(std::string_view word) const;
    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    // Mean of the token vectors; unknown tokens contribute zeros.
    std::vector<double> mean_pool(std::span<const std::string> tokens) const;

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Cosine of the mean-pooled vectors. Zero when either side pools to the
// zero vector (all tokens out of vocabulary, or no tokens).
double cosine(std::span<const std::string> a, std::span<const std::string> b,
              const VectorTable& vectors);

/// Metric plus the vectors it may need.
class Similarity {
public:
    // Throws InvalidArgument for cosine without vectors.
    Similarity(Metric metric, const VectorTable* vectors = nullptr);

    double operator()(std::span<const std::string> a, std::span<const std::string> b) const;
    Metric metric() const { return metric_; }

private:
    Metric metric_;
    const VectorTable* vectors_;
};

}  // namespace leakcred
