#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leakcred/corpus.hpp"
#include "leakcred/entity.hpp"
#include "leakcred/similarity.hpp"
#include "leakcred/time.hpp"

namespace leakcred {

/// Leak and press-release headlines about one product. Member ids are
/// sorted.
struct ProductBin {
    std::string product_key;
    std::string label;
    std::vector<std::string> leak_ids;
    std::vector<std::string> pr_ids;

    bool operator==(const ProductBin&) const = default;
};

struct BinningResult {
    std::vector<ProductBin> bins;  // sorted by product_key
    std::size_t unbinned = 0;      // headlines without a usable span
};

// Keys each spanned headline by the processed surface of its first span and
// merges keys by single linkage at `threshold`. A merged group is named by
// its smallest member key and labelled by majority over member spans.
BinningResult bin(const Corpus& corpus, const SpanTable& spans, const Similarity& similarity,
                  double threshold, std::span<const StopwordSet> stopwords);

void write_bins(std::span<const ProductBin> bins, std::ostream& out);
void save_bins(std::span<const ProductBin> bins, const std::filesystem::path& path);
std::vector<ProductBin> load_bins(const std::filesystem::path& path);

struct TruthAssignment {
    std::string blog;
    std::string product_key;
    int t = 0;
    int f = 0;
    std::optional<Timestamp> first_leak_time;
    std::optional<Timestamp> first_pr_time;

    bool operator==(const TruthAssignment&) const = default;
};

struct TruthOptions {
    // Leave leak-only bins undecided (t = f = 0) instead of charging f = 1.
    bool defer_undefined = false;
};

// Truth values of one blog's claims about one product. Empty when the blog
// has no datable leak headline in the bin. Headlines are dated by their
// effective time; a headline without one is ignored.
std::optional<TruthAssignment> assign_truth(const ProductBin& bin, const Corpus& corpus,
                                            const std::string& blog,
                                            const TruthOptions& options = {});

// assign_truth for every leak source in the corpus registry and every bin,
// ordered by blog then product key.
std::vector<TruthAssignment> assign_all(std::span<const ProductBin> bins, const Corpus& corpus,
                                        const TruthOptions& options = {});

// CSV "blog,product_key,t,f,first_leak_time,first_pr_time" with a header.
void write_truth(std::span<const TruthAssignment> rows, std::ostream& out);
void save_truth(std::span<const TruthAssignment> rows, const std::filesystem::path& path);
std::vector<TruthAssignment> load_truth(const std::filesystem::path& path);

}  // namespace leakcred
