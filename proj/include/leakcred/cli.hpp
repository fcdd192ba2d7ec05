#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "leakcred/similarity.hpp"

namespace leakcred::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kPartial = 2, kFatal = 3 };

struct PipelineConfig {
    std::vector<std::filesystem::path> leak_files;
    std::vector<std::filesystem::path> pr_files;
    std::string format = "jsonl";
    std::filesystem::path gazetteer;
    std::filesystem::path templates;
    std::vector<std::filesystem::path> stopwords;
    std::filesystem::path vectors;
    std::vector<std::filesystem::path> fixtures;
    std::vector<std::filesystem::path> backlinks;
    std::filesystem::path estimators;
    std::filesystem::path lexicon;
    std::vector<std::filesystem::path> annotations;
    std::filesystem::path work_dir = "leakcred-work";
    std::filesystem::path ledger_dir;
    std::string metric = "jaccard";
    double threshold = 0.5;
    double percentile = 25.0;
    bool defer_undefined = false;
    double timeout_seconds = 10.0;

    // Throws InvalidArgument when a value is out of range.
    void validate() const;
};

// Runs one command line (args excludes the program name). Normal output goes
// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leakcred::cli
