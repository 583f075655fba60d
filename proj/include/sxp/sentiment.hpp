#pragma once

// Rule-based lexical valence scoring of short texts. Token weights come
// from per-language lexicons, emoticons are extracted and scored
// separately, and the combined raw sum is squashed into [-1, 1].

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sxp/types.hpp"

namespace sxp {

struct Lexicon {
    std::string language;                     // BCP-47-ish tag, e.g. "en"
    std::map<std::string, double> entries;    // token -> weight in [-4, +4]
    std::map<std::string, double> emoticons;  // literal -> weight

    // Tab-separated `token<TAB>weight` lines; a line `[emoticons]` starts
    // the emoticon section; `#` lines are comments (docs/formats.md).
    static Lexicon load(const std::string& path, const std::string& language);
    static Lexicon parse(const std::string& text, const std::string& language);
};

// Small demo lexicons compiled into the library.
const Lexicon& builtin_english_lexicon();
const Lexicon& builtin_portuguese_lexicon();

enum class ScorePath { LexiconOnly, EmoticonOnly, Mixed, Undetermined };

const char* to_string(ScorePath p);

struct SentimentResult {
    double score = 0.0;  // in [-1, 1]
    ValenceClass valence = ValenceClass::Neutral;
    ScorePath path = ScorePath::Undetermined;
    std::optional<std::string> language_used;
};

class LanguageDetector {
public:
    virtual ~LanguageDetector() = default;
    virtual std::optional<std::string> detect(const std::string& text) const = 0;
};

// Counts per-language stopword hits; undetected on a tie or no hit.
class StopwordLanguageDetector : public LanguageDetector {
public:
    StopwordLanguageDetector();  // built-in English + Portuguese word sets
    std::optional<std::string> detect(const std::string& text) const override;

private:
    std::vector<std::pair<std::string, std::vector<std::string>>> stopwords_;
};

class Translator {
public:
    virtual ~Translator() = default;
    virtual std::string translate(const std::string& text, const std::string& from,
                                  const std::string& to) const = 0;
};

// Stand-in for the external translation service: returns the text as is.
class IdentityTranslator : public Translator {
public:
    std::string translate(const std::string& text, const std::string&,
                          const std::string&) const override {
        return text;
    }
};

struct ScoreOptions {
    double alpha = 15.0;  // normalization: score = S / sqrt(S^2 + alpha)
    double theta = 0.05;  // class threshold
};

// Known emoticon literals removed from the text, order preserved, plus the
// residual text with whitespace collapsed.
std::pair<std::vector<std::string>, std::string> extract_emoticons(const std::string& text);

// Lowercased word tokens; bytes >= 0x80 are treated as letters so UTF-8
// words survive intact.
std::vector<std::string> tokenize(const std::string& text);

// Full scoring pipeline; total over all inputs. At least one lexicon is
// required (the first is the primary fallback).
SentimentResult score_text(const std::string& text, const std::vector<Lexicon>& lexicons,
                           const LanguageDetector* detector = nullptr,
                           const Translator* translator = nullptr,
                           const ScoreOptions& opts = {});

// Negative below -theta inclusive, Positive above +theta inclusive, else
// Neutral. Throws std::invalid_argument if |score| > 1.
ValenceClass classify_score(double score, double theta = 0.05);

}  // namespace sxp
