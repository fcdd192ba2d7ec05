#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace leakcred {

// Display form: Unicode NFC, every run of Unicode white space folded to a
// single U+0020, leading and trailing space removed. Case is preserved.
std::string collapse(std::string_view raw);

// collapse() followed by per-code-point lowercasing.
std::string normalize(std::string_view raw);

struct Token {
    std::string text;        // lowercased
    std::size_t begin = 0;   // byte offset into the tokenized string
    std::size_t end = 0;     // exclusive
    bool capitalized = false;
    bool has_digit = false;
};

// Splits on every code point that is neither a letter nor a digit. Offsets
// refer to the input; token text is lowercased.
std::vector<Token> tokenize_with_offsets(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

// True for tokens mixing letters and digits ("s10", "5g").
bool is_product_code(std::string_view token);

// Rule-based lemma of a lowercase token.
std::string lemmatize(std::string_view token);

// Lemmatizes every token.
std::vector<std::string> lemmatize_all(std::span<const std::string> tokens);

// Known verb base forms shared by the lemmatizer and the verb tagger.
const std::set<std::string, std::less<>>& verb_lexicon();

struct StopwordSet {
    enum class Provenance { builtin_general, custom_domain };

    std::set<std::string, std::less<>> base_words;
    Provenance provenance = Provenance::custom_domain;

    bool contains(std::string_view word) const { return base_words.contains(word); }

    // One lowercase word per line, '#' starts a comment.
    static StopwordSet load(const std::filesystem::path& path,
                            Provenance provenance = Provenance::custom_domain);
    static StopwordSet from_words(std::span<const std::string_view> words, Provenance provenance);
};

// English function words.
const StopwordSet& builtin_general_stopwords();

// Seed list of headline filler words: allege, announce, detail, exclusive,
// leak and similar, with their inflections.
const StopwordSet& seed_custom_stopwords();

bool is_stopword(std::string_view token, std::span<const StopwordSet> sets);

// Order-preserving removal of tokens whose surface or lemma is in any set.
std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          std::span<const StopwordSet> sets);

}  // namespace leakcred
