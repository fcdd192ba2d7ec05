#include "leakcred/text.hpp"

#include <fstream>
#include <map>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "leakcred/error.hpp"

namespace leakcred {

namespace {

std::string nfc(std::string_view raw) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
    icu::UnicodeString in = icu::UnicodeString::fromUTF8(
        icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    icu::UnicodeString out = norm->normalize(in, status);
    if (U_FAILURE(status)) throw Error("NFC normalization failed");
    std::string utf8;
    out.toUTF8String(utf8);
    return utf8;
}

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    U8_APPEND_UNSAFE(buf, len, c);
    out.append(buf, static_cast<std::size_t>(len));
}

template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
    const auto* data = reinterpret_cast<const uint8_t*>(s.data());
    const auto length = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < length) {
        int32_t start = i;
        UChar32 c;
        U8_NEXT(data, i, length, c);
        if (c < 0) c = 0xFFFD;
        fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i));
    }
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) || c == 0x200B || u_iscntrl(c); }

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool is_ascii_alpha(std::string_view s) {
    for (char c : s) {
        if (c < 'a' || c > 'z') return false;
    }
    return !s.empty();
}

const std::map<std::string, std::string, std::less<>>& irregulars() {
    static const std::map<std::string, std::string, std::less<>> kTable = {
        {"am", "be"}, {"are", "be"}, {"is", "be"}, {"was", "be"}, {"were", "be"},
        {"been", "be"}, {"being", "be"}, {"has", "have"}, {"had", "have"},
        {"having", "have"}, {"does", "do"}, {"did", "do"}, {"done", "do"},
        {"doing", "do"}, {"goes", "go"}, {"went", "go"}, {"gone", "go"},
        {"made", "make"}, {"said", "say"}, {"says", "say"}, {"got", "get"},
        {"gotten", "get"}, {"took", "take"}, {"taken", "take"}, {"came", "come"},
        {"saw", "see"}, {"seen", "see"}, {"gave", "give"}, {"given", "give"},
        {"shown", "show"}, {"began", "begin"}, {"begun", "begin"}, {"broke", "break"},
        {"broken", "break"}, {"chose", "choose"}, {"chosen", "choose"}, {"drew", "draw"},
        {"drawn", "draw"}, {"drove", "drive"}, {"driven", "drive"}, {"fell", "fall"},
        {"fallen", "fall"}, {"felt", "feel"}, {"found", "find"}, {"flew", "fly"},
        {"flown", "fly"}, {"flies", "fly"}, {"forgot", "forget"}, {"forgotten", "forget"},
        {"froze", "freeze"}, {"frozen", "freeze"}, {"grew", "grow"}, {"grown", "grow"},
        {"heard", "hear"}, {"held", "hold"}, {"hid", "hide"}, {"hidden", "hide"},
        {"kept", "keep"}, {"knew", "know"}, {"known", "know"}, {"led", "lead"},
        {"left", "leave"}, {"lost", "lose"}, {"meant", "mean"}, {"met", "meet"},
        {"paid", "pay"}, {"ran", "run"}, {"rose", "rise"}, {"risen", "rise"},
        {"sold", "sell"}, {"sent", "send"}, {"shot", "shoot"}, {"shook", "shake"},
        {"shaken", "shake"}, {"sat", "sit"}, {"spent", "spend"}, {"spoke", "speak"},
        {"spoken", "speak"}, {"stood", "stand"}, {"stole", "steal"}, {"stolen", "steal"},
        {"struck", "strike"}, {"taught", "teach"}, {"told", "tell"}, {"thought", "think"},
        {"threw", "throw"}, {"thrown", "throw"}, {"understood", "understand"},
        {"woke", "wake"}, {"woken", "wake"}, {"wore", "wear"}, {"worn", "wear"},
        {"won", "win"}, {"wrote", "write"}, {"written", "write"}, {"built", "build"},
        {"bought", "buy"}, {"brought", "bring"}, {"caught", "catch"}, {"fought", "fight"},
        {"sought", "seek"}, {"slept", "sleep"}, {"dealt", "deal"}, {"hung", "hang"},
        {"bent", "bend"}, {"lent", "lend"}, {"rebuilt", "rebuild"}, {"undertook", "undertake"},
        {"children", "child"}, {"men", "man"}, {"women", "woman"}, {"people", "person"},
        {"movies", "movie"}, {"cookies", "cookie"}, {"dies", "die"}, {"died", "die"},
        {"lies", "lie"}, {"lied", "lie"}, {"ties", "tie"}, {"tied", "tie"},
    };
    return kTable;
}

// Words that look inflected but are not.
const std::set<std::string, std::less<>>& invariants() {
    static const std::set<std::string, std::less<>> kWords = {
        "news", "series", "species", "lens", "always", "perhaps", "whereas", "various",
        "analysis", "ios", "macos", "chassis", "canvas", "bias", "atlas", "plus", "this",
        "thus", "its", "yes", "less", "unless", "across", "during", "thing", "nothing",
        "something", "anything", "everything", "morning", "evening", "ceiling", "king",
        "ring", "spring", "string", "wing", "swing", "sibling", "wedding", "pudding",
        "red", "bed", "shed", "hundred", "speed", "need", "seed", "feed", "indeed",
        "embed", "proceed", "exceed", "succeed", "bleed", "breed", "weed", "greed",
        "united", "limited", "sled", "wed", "fled", "sped", "bred",
        "physics", "electronics", "graphics", "economics", "mathematics", "politics",
        "headphones", "earbuds", "glasses", "pants", "jeans", "thanks", "crisis", "basis",
    };
    return kWords;
}

// Non-verb base forms the suffix rules would otherwise damage.
const std::set<std::string, std::less<>>& noun_lexicon() {
    static const std::set<std::string, std::less<>> kWords = {
        "case", "base", "phase", "purchase", "nose", "size", "prize", "surprise", "promise",
        "license", "response", "course", "horse", "house", "lease", "phrase", "clause",
        "cause", "pause", "device", "image", "price", "phone", "edge", "bezel", "gauge",
        "range", "page", "stage", "storage", "badge", "bridge", "language", "message",
        "package", "voltage", "source", "resource", "service", "choice", "voice", "piece",
        "space", "surface", "interface", "glance", "dance", "balance", "chance", "performance",
        "license", "finance", "sense", "expense", "defense", "license", "dose", "rose",
        "purpose", "office", "notice", "practice", "juice", "slice", "twice", "advice",
        "universe", "verse", "nurse", "curse", "blouse", "mouse", "goose", "noise", "raise",
        "praise", "cruise", "exercise", "premise", "enterprise", "franchise", "showcase",
        "suitcase", "staircase", "database", "briefcase", "vase", "fuse", "excuse", "muse",
        "glimpse", "collapse", "eclipse", "ellipse", "corpse", "impulse", "pulse", "dense",
        "tense", "rinse", "license",
    };
    return kWords;
}

bool known_base(std::string_view w) {
    return verb_lexicon().contains(w) || noun_lexicon().contains(w) || invariants().contains(w);
}

// Recovers a base form from the stem left after removing -ed or -ing.
std::string restore_stem(std::string stem) {
    if (known_base(stem)) return stem;
    if (known_base(stem + "e")) return stem + "e";
    const std::size_t n = stem.size();
    const bool doubled = n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]);
    if (doubled && known_base(std::string_view(stem).substr(0, n - 1))) return stem.substr(0, n - 1);
    if (doubled && stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z' &&
        stem[n - 1] != 'f')
        return stem.substr(0, n - 1);
    if (n == 0) return stem;
    const char last = stem[n - 1];
    if (last == 'c' || last == 'v' || last == 'z' || last == 'u') return stem + "e";
    if (n >= 3 && last == 'l' && !is_vowel(stem[n - 2]) && stem[n - 2] != 'l' &&
        stem[n - 2] != 'r')
        return stem + "e";
    if (n >= 4 && ends_with(stem, "at") && !is_vowel(stem[n - 3])) return stem + "e";
    return stem;
}

}  // namespace

std::string collapse(std::string_view raw) {
    const std::string composed = nfc(raw);
    std::string out;
    out.reserve(composed.size());
    bool pending_space = false;
    for_each_code_point(composed, [&](UChar32 c, std::size_t, std::size_t) {
        if (is_space(c)) {
            pending_space = true;
            return;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        append_utf8(out, c);
    });
    return out;
}

std::string normalize(std::string_view raw) {
    const std::string display = collapse(raw);
    std::string out;
    out.reserve(display.size());
    for_each_code_point(display, [&](UChar32 c, std::size_t, std::size_t) {
        append_utf8(out, u_tolower(c));
    });
    return out;
}

std::vector<Token> tokenize_with_offsets(std::string_view text) {
    std::vector<Token> tokens;
    Token current;
    bool open = false;
    for_each_code_point(text, [&](UChar32 c, std::size_t begin, std::size_t end) {
        if (u_isalnum(c)) {
            if (!open) {
                current = Token{};
                current.begin = begin;
                current.capitalized = u_isupper(c) || u_istitle(c);
                open = true;
            }
            if (u_isdigit(c)) current.has_digit = true;
            append_utf8(current.text, u_tolower(c));
            current.end = end;
        } else if (open) {
            tokens.push_back(std::move(current));
            open = false;
        }
    });
    if (open) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : tokenize_with_offsets(text)) out.push_back(std::move(t.text));
    return out;
}

bool is_product_code(std::string_view token) {
    bool digit = false;
    bool alpha = false;
    for_each_code_point(token, [&](UChar32 c, std::size_t, std::size_t) {
        if (u_isdigit(c)) digit = true;
        else if (u_isalpha(c)) alpha = true;
    });
    return digit && alpha;
}

std::string lemmatize(std::string_view token) {
    std::string w(token);
    if (w.empty() || is_product_code(w) || !is_ascii_alpha(w)) return w;
    if (auto it = irregulars().find(w); it != irregulars().end()) return it->second;
    if (known_base(w)) return w;
    const std::size_t n = w.size();

    if (n > 4 && (ends_with(w, "ies") || ends_with(w, "ied"))) return w.substr(0, n - 3) + "y";
    if (n >= 5 && ends_with(w, "ing")) return restore_stem(w.substr(0, n - 3));
    if (n >= 4 && ends_with(w, "ed")) return restore_stem(w.substr(0, n - 2));
    if (n >= 4 && ends_with(w, "es")) {
        std::string without_s = w.substr(0, n - 1);
        if (known_base(without_s)) return without_s;
        std::string stem = w.substr(0, n - 2);
        if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
            ends_with(stem, "ch") || ends_with(stem, "sh"))
            return stem;
        return without_s;
    }
    if (n > 3 && w.back() == 's' && !ends_with(w, "ss") && !ends_with(w, "us") &&
        !ends_with(w, "is"))
        return w.substr(0, n - 1);
    return w;
}

std::vector<std::string> lemmatize_all(std::span<const std::string> tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(lemmatize(t));
    return out;
}

const std::set<std::string, std::less<>>& verb_lexicon() {
    static const std::set<std::string, std::less<>> kVerbs = {
        "add", "agree", "allege", "allow", "announce", "answer", "appear", "arrive", "ask",
        "be", "beat", "become", "begin", "believe", "bend", "benchmark", "boast", "break",
        "bring", "build", "bundle", "buy", "call", "cancel", "capture", "celebrate",
        "certify", "change", "charge", "check", "choose", "claim", "close", "come",
        "compare", "confirm", "continue", "cost", "create", "cut", "deal", "debut",
        "decrease", "delay", "deliver", "design", "detail", "develop", "display", "ditch",
        "do", "double", "drop", "embed", "enable", "exceed", "expect", "face", "fall",
        "feature", "feed", "feel", "find", "fix", "fold", "free", "get", "give", "go",
        "grow", "guarantee", "handle", "have", "help", "hint", "hit", "hold", "host",
        "improve", "include", "increase", "introduce", "invite", "join", "keep", "kick",
        "know", "land", "launch", "lead", "leak", "learn", "leave", "let", "list", "look",
        "lose", "make", "manufacture", "matter", "mean", "measure", "mention", "move",
        "name", "need", "note", "offer", "open", "pack", "partner", "pass", "pay", "plan",
        "play", "post", "power", "price", "proceed", "produce", "pull", "push", "put",
        "rank", "rate", "reach", "receive", "record", "reduce", "register", "release",
        "remain", "remove", "render", "replace", "report", "reveal", "review", "rise",
        "roll", "rumor", "rumour", "run", "save", "say", "score", "see", "sell", "send",
        "set", "share", "ship", "show", "sign", "skip", "sport", "spot", "start", "stay",
        "stop", "stream", "succeed", "suggest", "support", "surface", "take", "tease",
        "tell", "test", "think", "tip", "top", "triple", "try", "unbox", "unveil",
        "update", "upgrade", "use", "want", "watch", "welcome", "win", "work", "write",
    };
    return kVerbs;
}

StopwordSet StopwordSet::from_words(std::span<const std::string_view> words,
                                    Provenance provenance) {
    StopwordSet set;
    set.provenance = provenance;
    for (auto w : words) set.base_words.emplace(w);
    return set;
}

StopwordSet StopwordSet::load(const std::filesystem::path& path, Provenance provenance) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read stopword file: " + path.string());
    StopwordSet set;
    set.provenance = provenance;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string word = normalize(line);
        if (word.empty()) continue;
        if (word.find(' ') != std::string::npos)
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": stopword entries must be single words");
        set.base_words.insert(std::move(word));
    }
    return set;
}

const StopwordSet& builtin_general_stopwords() {
    static constexpr std::string_view kWords[] = {
        "a", "about", "after", "again", "all", "also", "an", "and", "any", "are", "as",
        "at", "be", "because", "been", "before", "being", "below", "between", "both",
        "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during",
        "each", "few", "for", "from", "further", "had", "has", "have", "having", "he",
        "her", "here", "hers", "him", "his", "how", "i", "if", "in", "into", "is", "it",
        "its", "itself", "just", "may", "me", "might", "more", "most", "must", "my", "no",
        "nor", "not", "now", "of", "off", "on", "once", "only", "or", "other", "our",
        "ours", "out", "over", "own", "same", "shall", "she", "should", "so", "some",
        "such", "than", "that", "the", "their", "theirs", "them", "then", "there",
        "these", "they", "this", "those", "through", "to", "too", "under", "until", "up",
        "very", "via", "vs", "was", "we", "were", "what", "when", "where", "which",
        "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
    };
    static const StopwordSet kSet =
        StopwordSet::from_words(kWords, StopwordSet::Provenance::builtin_general);
    return kSet;
}

const StopwordSet& seed_custom_stopwords() {
    static constexpr std::string_view kWords[] = {
        "allege", "alleged", "alleges", "alleging", "allegedly",
        "announce", "announced", "announces", "announcing", "announcement",
        "detail", "details", "detailed", "detailing",
        "exclusive", "exclusives", "exclusively",
        "leak", "leaks", "leaked", "leaking", "leaker",
        "rumor", "rumors", "rumored", "rumour", "rumours", "rumoured",
        "report", "reports", "reported", "reportedly",
        "official", "officially", "confirm", "confirms", "confirmed",
        "reveal", "reveals", "revealed", "tip", "tips", "tipped",
        "spot", "spots", "spotted", "tease", "teases", "teased",
        "upcoming", "latest", "new", "update", "video", "interview",
        "render", "renders", "image", "images", "photo", "photos",
    };
    static const StopwordSet kSet =
        StopwordSet::from_words(kWords, StopwordSet::Provenance::custom_domain);
    return kSet;
}

bool is_stopword(std::string_view token, std::span<const StopwordSet> sets) {
    std::string lemma;
    bool lemma_ready = false;
    for (const auto& set : sets) {
        if (set.contains(token)) return true;
        if (!lemma_ready) {
            lemma = lemmatize(token);
            lemma_ready = true;
        }
        if (set.contains(lemma)) return true;
    }
    return false;
}

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          std::span<const StopwordSet> sets) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!is_stopword(t, sets)) out.push_back(t);
    }
    return out;
}

}  // namespace leakcred
