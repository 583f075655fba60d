#include "sxp/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sxp {

namespace {

// Longest-match emoticon table shared by every lexicon.
const std::vector<std::string>& emoticon_literals() {
    static const std::vector<std::string> lits = [] {
        std::vector<std::string> v = {
            ":-)", ":)", ":-(", ":(", ":-D", ":D", ";-)", ";)", ":-P", ":P", ":p",
            ":'(", ":'-(", ":-/", ":/", ":-|", ":|", "=)", "=(", "<3", "</3",
            "xD", "XD", ":-O", ":O", ":o", "D:", ":*", "^^", "^_^", "-_-", "o_O",
        };
        std::sort(v.begin(), v.end(), [](const std::string& a, const std::string& b) {
            return a.size() != b.size() ? a.size() > b.size() : a < b;
        });
        return v;
    }();
    return lits;
}

bool is_token_byte(unsigned char c) {
    return std::isalnum(c) || c == '\'' || c >= 0x80;
}

std::string collapse_spaces(const std::string& s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += ' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

const char kEnglishLexicon[] =
    "# demo English valence lexicon\n"
    "good\t1.9\ngreat\t3.1\nexcellent\t3.2\nhappy\t2.7\nhappiness\t2.7\nlove\t3.2\n"
    "loved\t2.9\nlovely\t2.8\nwonderful\t2.7\namazing\t2.8\nawesome\t3.1\nnice\t1.8\n"
    "fun\t2.3\njoy\t2.8\nbest\t3.2\nbetter\t1.9\ncalm\t1.3\nrelaxed\t1.9\nproud\t2.1\n"
    "win\t2.8\nwon\t2.7\nsuccess\t2.7\nbeautiful\t2.9\nsmile\t2.0\nthanks\t1.9\n"
    "thank\t1.9\nglad\t2.0\npleasant\t2.3\nexcited\t2.3\nhope\t1.9\n"
    "bad\t-2.5\nterrible\t-3.1\nawful\t-3.0\nhorrible\t-2.9\nsad\t-2.1\nsadness\t-2.1\n"
    "hate\t-2.7\nhated\t-2.6\nangry\t-2.3\nanger\t-2.3\nfear\t-2.2\nafraid\t-2.0\n"
    "worst\t-3.1\nworse\t-2.1\npain\t-2.3\ncry\t-2.1\ncrying\t-2.2\nlost\t-1.3\n"
    "lose\t-1.6\nfail\t-2.3\nfailed\t-2.3\nfailure\t-2.4\ntired\t-1.4\nsick\t-2.0\n"
    "annoyed\t-1.8\nupset\t-2.1\nstress\t-2.0\nstressed\t-2.2\nlonely\t-2.2\nworried\t-1.9\n"
    "[emoticons]\n"
    ":)\t2.0\n:-)\t2.0\n=)\t1.8\n:D\t2.7\n;)\t1.6\n:P\t1.4\n:p\t1.4\n<3\t2.9\n^^\t1.5\n"
    "^_^\t1.8\n:*\t2.1\n"
    ":(\t-2.0\n:-(\t-2.0\n=(\t-1.8\n:'(\t-2.6\n:'-(\t-2.6\n:/\t-1.2\n:-/\t-1.2\n"
    ":|\t-0.6\n:-|\t-0.6\nD:\t-2.2\n</3\t-2.8\n-_-\t-1.2\n";

const char kPortugueseLexicon[] =
    "# demo Portuguese valence lexicon\n"
    "bom\t1.9\nboa\t1.9\nótimo\t3.1\notimo\t3.1\nexcelente\t3.2\nfeliz\t2.7\n"
    "felicidade\t2.8\namor\t3.2\namo\t3.0\nadoro\t2.9\nmaravilhoso\t2.8\nlindo\t2.7\n"
    "linda\t2.7\nalegria\t2.8\nmelhor\t2.4\ncalmo\t1.3\norgulho\t2.1\nvitória\t2.8\n"
    "vitoria\t2.8\nsucesso\t2.7\nsorriso\t2.0\nobrigado\t1.9\nobrigada\t1.9\n"
    "contente\t2.1\nesperança\t1.9\nesperanca\t1.9\ndivertido\t2.3\n"
    "mau\t-2.5\nmá\t-2.5\nruim\t-2.4\nterrível\t-3.1\nterrivel\t-3.1\nhorrível\t-2.9\n"
    "horrivel\t-2.9\npéssimo\t-3.0\npessimo\t-3.0\ntriste\t-2.1\ntristeza\t-2.2\n"
    "ódio\t-2.7\nodio\t-2.7\nodeio\t-2.7\nraiva\t-2.3\nmedo\t-2.2\npior\t-2.6\ndor\t-2.3\n"
    "chorar\t-2.1\nchoro\t-2.1\nperdi\t-1.5\nfalhou\t-2.2\nfracasso\t-2.4\ncansado\t-1.4\n"
    "doente\t-2.0\nchateado\t-1.9\npreocupado\t-1.9\nsozinho\t-2.0\nestressado\t-2.2\n"
    "[emoticons]\n"
    ":)\t2.0\n:-)\t2.0\n=)\t1.8\n:D\t2.7\n;)\t1.6\n:P\t1.4\n:p\t1.4\n<3\t2.9\n^^\t1.5\n"
    "^_^\t1.8\n:*\t2.1\n"
    ":(\t-2.0\n:-(\t-2.0\n=(\t-1.8\n:'(\t-2.6\n:'-(\t-2.6\n:/\t-1.2\n:-/\t-1.2\n"
    ":|\t-0.6\n:-|\t-0.6\nD:\t-2.2\n</3\t-2.8\n-_-\t-1.2\n";

}  // namespace

const char* to_string(ScorePath p) {
    switch (p) {
        case ScorePath::LexiconOnly: return "lexicon_only";
        case ScorePath::EmoticonOnly: return "emoticon_only";
        case ScorePath::Mixed: return "mixed";
        case ScorePath::Undetermined: return "undetermined";
    }
    return "?";
}

Lexicon Lexicon::parse(const std::string& text, const std::string& language) {
    Lexicon lex;
    lex.language = language;
    std::istringstream in(text);
    std::string line;
    bool in_emoticons = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line == "[emoticons]") {
            in_emoticons = true;
            continue;
        }
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": expected token<TAB>weight");
        const std::string token = line.substr(0, tab);
        double weight;
        try {
            weight = std::stod(line.substr(tab + 1));
        } catch (const std::exception&) {
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": bad weight");
        }
        if (!std::isfinite(weight) || weight < -4.0 || weight > 4.0)
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": weight outside [-4, 4]");
        (in_emoticons ? lex.emoticons : lex.entries)[token] = weight;
    }
    return lex;
}

Lexicon Lexicon::load(const std::string& path, const std::string& language) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text, language);
}

const Lexicon& builtin_english_lexicon() {
    static const Lexicon lex = Lexicon::parse(kEnglishLexicon, "en");
    return lex;
}

const Lexicon& builtin_portuguese_lexicon() {
    static const Lexicon lex = Lexicon::parse(kPortugueseLexicon, "pt");
    return lex;
}

std::pair<std::vector<std::string>, std::string> extract_emoticons(const std::string& text) {
    std::vector<std::string> found;
    std::string residual;
    std::size_t i = 0;
    while (i < text.size()) {
        bool matched = false;
        for (const auto& lit : emoticon_literals()) {
            if (text.compare(i, lit.size(), lit) == 0) {
                found.push_back(lit);
                i += lit.size();
                matched = true;
                break;
            }
        }
        if (!matched) residual += text[i++];
    }
    return {std::move(found), collapse_spaces(residual)};
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (is_token_byte(c)) {
            cur += static_cast<char>(std::isupper(c) ? std::tolower(c) : c);
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

StopwordLanguageDetector::StopwordLanguageDetector() {
    stopwords_ = {
        {"en",
         {"the", "and", "is", "are", "was", "you", "for", "with", "this", "that",
          "have", "not", "but", "what", "all", "very", "can", "will", "just", "my",
          "too", "i'm", "it's", "don't", "i"}},
        {"pt",
         {"que", "não", "nao", "uma", "um", "para", "com", "por", "mais", "como",
          "mas", "foi", "ele", "ela", "isso", "muito", "também", "tambem", "está",
          "estou", "são", "já", "você", "voce", "é", "eu", "da", "do", "em"}},
    };
}

std::optional<std::string> StopwordLanguageDetector::detect(const std::string& text) const {
    const auto tokens = tokenize(text);
    std::string best;
    int best_hits = 0;
    bool tie = false;
    for (const auto& [tag, words] : stopwords_) {
        int hits = 0;
        for (const auto& t : tokens)
            if (std::find(words.begin(), words.end(), t) != words.end()) ++hits;
        if (hits > best_hits) {
            best = tag;
            best_hits = hits;
            tie = false;
        } else if (hits == best_hits && hits > 0) {
            tie = true;
        }
    }
    if (best_hits == 0 || tie) return std::nullopt;
    return best;
}

SentimentResult score_text(const std::string& text, const std::vector<Lexicon>& lexicons,
                           const LanguageDetector* detector, const Translator* translator,
                           const ScoreOptions& opts) {
    if (lexicons.empty()) throw std::invalid_argument("at least one lexicon required");

    auto [emoticons, residual] = extract_emoticons(text);
    std::optional<std::string> detected;
    if (detector != nullptr && !residual.empty()) detected = detector->detect(residual);

    // Pick the lexicon for the detected language; primary is the fallback.
    const Lexicon* lex = &lexicons.front();
    bool have_language_match = false;
    if (detected) {
        for (const auto& l : lexicons) {
            if (l.language == *detected) {
                lex = &l;
                have_language_match = true;
                break;
            }
        }
    }
    std::string scored_text = residual;
    if (detected && !have_language_match && translator != nullptr)
        scored_text = translator->translate(residual, *detected, lex->language);

    double lex_sum = 0.0;
    int lex_hits = 0;
    for (const auto& tok : tokenize(scored_text)) {
        auto it = lex->entries.find(tok);
        if (it != lex->entries.end()) {
            lex_sum += it->second;
            ++lex_hits;
        }
    }
    double emo_sum = 0.0;
    int emo_hits = 0;
    for (const auto& e : emoticons) {
        auto it = lex->emoticons.find(e);
        if (it != lex->emoticons.end()) {
            emo_sum += it->second;
            ++emo_hits;
        }
    }

    SentimentResult res;
    if (lex_hits == 0 && emo_hits == 0) {
        res.path = ScorePath::Undetermined;
    } else if (lex_hits > 0 && emo_hits > 0) {
        res.path = ScorePath::Mixed;
    } else if (emo_hits > 0) {
        res.path = ScorePath::EmoticonOnly;
    } else {
        res.path = ScorePath::LexiconOnly;
    }
    if (lex_hits > 0) res.language_used = lex->language;

    const double raw = lex_sum + emo_sum;
    res.score = raw == 0.0 ? 0.0 : raw / std::sqrt(raw * raw + opts.alpha);
    res.valence = classify_score(res.score, opts.theta);
    return res;
}

ValenceClass classify_score(double score, double theta) {
    if (!(score >= -1.0 && score <= 1.0))
        throw std::invalid_argument("sentiment score outside [-1, 1]");
    if (score <= -theta) return ValenceClass::Negative;
    if (score >= theta) return ValenceClass::Positive;
    return ValenceClass::Neutral;
}

}  // namespace sxp
