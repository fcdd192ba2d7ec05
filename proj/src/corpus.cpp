#include "leakcred/corpus.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "leakcred/error.hpp"
#include "leakcred/text.hpp"

namespace leakcred {

using json = nlohmann::ordered_json;

std::string_view to_string(HeadlineKind kind) {
    return kind == HeadlineKind::leak ? "leak" : "press_release";
}

std::optional<HeadlineKind> parse_kind(std::string_view s) {
    if (s == "leak") return HeadlineKind::leak;
    if (s == "press_release") return HeadlineKind::press_release;
    return std::nullopt;
}

std::optional<InputFormat> parse_format(std::string_view s) {
    if (s == "jsonl") return InputFormat::jsonl;
    if (s == "tsv") return InputFormat::tsv;
    return std::nullopt;
}

std::optional<Timestamp> Headline::effective_time() const {
    if (declared_time && estimated_time) return std::min(*declared_time, *estimated_time);
    return declared_time ? declared_time : estimated_time;
}

std::string derive_headline_id(std::string_view source, std::string_view url) {
    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    mix(source);
    mix(std::string_view("\n", 1));
    mix(url);
    char buf[24];
    std::snprintf(buf, sizeof buf, "h%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool is_absolute_url(std::string_view url) {
    static const std::regex kUrl(R"(^[A-Za-z][A-Za-z0-9+.\-]*://[^/\s?#]+[^\s]*$)");
    return std::regex_match(url.begin(), url.end(), kUrl);
}

std::optional<std::string> Corpus::try_add(Headline h) {
    h.text = collapse(h.text);
    if (h.text.empty()) return "empty headline text";
    if (h.source.empty()) return "empty source";
    if (!is_absolute_url(h.url)) return "url is not absolute: " + h.url;
    if (auto it = registry_.find(h.source); it != registry_.end() && it->second != h.kind)
        return "source '" + h.source + "' is registered as " + std::string(to_string(it->second));
    std::string key = h.source + '\n' + h.url;
    if (by_source_url_.contains(key)) return std::string("duplicate");
    if (h.id.empty()) h.id = derive_headline_id(h.source, h.url);
    if (by_id_.contains(h.id)) return "duplicate id " + h.id;

    registry_.emplace(h.source, h.kind);
    by_source_url_.emplace(std::move(key), headlines_.size());
    by_id_.emplace(h.id, headlines_.size());
    headlines_.push_back(std::move(h));
    return std::nullopt;
}

void Corpus::add(Headline h) {
    if (auto err = try_add(std::move(h))) throw InvalidArgument(*err);
}

void Corpus::register_source(const std::string& source, HeadlineKind kind) {
    auto [it, inserted] = registry_.emplace(source, kind);
    if (!inserted && it->second != kind)
        throw InvalidArgument("source '" + source + "' already registered as " +
                              std::string(to_string(it->second)));
}

const Headline* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &headlines_[it->second];
}

void Corpus::set_estimated_time(std::size_t index, std::optional<Timestamp> t) {
    headlines_.at(index).estimated_time = t;
}

namespace {

std::optional<Timestamp> optional_time(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(std::string(key) + " must be a string or null");
    auto t = parse_rfc3339(it->get<std::string>());
    if (!t) throw ParseError(std::string(key) + " is not RFC3339: " + it->get<std::string>());
    return t;
}

std::string required_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw ParseError(std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

Headline parse_jsonl_record(const std::string& line, std::optional<HeadlineKind> kind) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError("record is not a JSON object");
    Headline h;
    h.source = required_string(obj, "source");
    h.url = required_string(obj, "url");
    h.text = required_string(obj, "text");
    if (auto it = obj.find("kind"); it != obj.end()) {
        auto parsed = it->is_string() ? parse_kind(it->get<std::string>()) : std::nullopt;
        if (!parsed) throw ParseError("kind must be \"leak\" or \"press_release\"");
        if (kind && *kind != *parsed)
            throw ParseError("record kind " + std::string(to_string(*parsed)) +
                             " does not match expected " + std::string(to_string(*kind)));
        h.kind = *parsed;
    } else if (kind) {
        h.kind = *kind;
    } else {
        throw ParseError("missing kind");
    }
    if (auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("id must be a string");
        h.id = it->get<std::string>();
    }
    h.declared_time = optional_time(obj, "declared_time");
    h.estimated_time = optional_time(obj, "estimated_time");
    return h;
}

Headline parse_tsv_record(const std::string& line, HeadlineKind kind) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    if (cols.size() < 3 || cols.size() > 4)
        throw ParseError("expected 3 or 4 tab-separated columns, got " + std::to_string(cols.size()));
    Headline h;
    h.kind = kind;
    h.source = cols[0];
    h.url = cols[1];
    h.text = cols[2];
    if (cols.size() == 4 && !cols[3].empty()) {
        h.declared_time = parse_rfc3339(cols[3]);
        if (!h.declared_time) throw ParseError("declared time is not RFC3339: " + cols[3]);
    }
    return h;
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

IngestResult ingest(std::istream& in, std::string_view name, InputFormat format,
                    std::optional<HeadlineKind> kind, Corpus base) {
    if (format == InputFormat::tsv && !kind)
        throw InvalidArgument("TSV ingestion needs an explicit headline kind");
    IngestResult result;
    result.corpus = std::move(base);
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        ++records;
        try {
            Headline h = format == InputFormat::jsonl ? parse_jsonl_record(line, kind)
                                                      : parse_tsv_record(line, *kind);
            if (auto err = result.corpus.try_add(std::move(h))) {
                if (*err == "duplicate") ++result.duplicates;
                else result.rejected.push_back({line_no, *err});
            } else {
                ++result.accepted;
            }
        } catch (const ParseError& e) {
            result.rejected.push_back({line_no, e.what()});
        }
    }
    if (records > 0 && result.rejected.size() * 2 > records) {
        std::ostringstream msg;
        msg << name << ": " << result.rejected.size() << " of " << records
            << " records rejected; first at line " << result.rejected.front().line << ": "
            << result.rejected.front().reason;
        throw ParseError(msg.str());
    }
    return result;
}

IngestResult ingest(const std::filesystem::path& path, InputFormat format,
                    std::optional<HeadlineKind> kind, Corpus base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read headline file: " + path.string());
    return ingest(in, path.string(), format, kind, std::move(base));
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& h : corpus.headlines()) {
        json obj;
        obj["id"] = h.id;
        obj["source"] = h.source;
        obj["kind"] = to_string(h.kind);
        obj["url"] = h.url;
        obj["text"] = h.text;
        obj["declared_time"] = h.declared_time ? json(format_rfc3339(*h.declared_time)) : json();
        obj["estimated_time"] =
            h.estimated_time ? json(format_rfc3339(*h.estimated_time)) : json();
        out << obj.dump() << '\n';
    }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write corpus file: " + path.string());
    write_corpus(corpus, out);
    if (!out) throw Error("write failed: " + path.string());
}

Corpus read_corpus(const std::filesystem::path& path) {
    auto result = ingest(path, InputFormat::jsonl, std::nullopt);
    if (!result.rejected.empty())
        throw ParseError(path.string() + ":" + std::to_string(result.rejected.front().line) +
                         ": " + result.rejected.front().reason);
    if (result.duplicates != 0) throw ParseError(path.string() + ": duplicate records");
    return std::move(result.corpus);
}

}  // namespace leakcred
