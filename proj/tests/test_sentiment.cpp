#include <doctest.h>

#include <cmath>

#include "sxp/sentiment.hpp"

using namespace sxp;

namespace {

const std::vector<Lexicon>& demo_lexicons() {
    static const std::vector<Lexicon> lex = {builtin_english_lexicon(),
                                             builtin_portuguese_lexicon()};
    return lex;
}

}  // namespace

TEST_CASE("extract_emoticons: single match with residual") {
    const auto [emos, rest] = extract_emoticons("ok :)");
    REQUIRE(emos.size() == 1);
    CHECK(emos[0] == ":)");
    CHECK(rest == "ok");
}

TEST_CASE("extract_emoticons: emoticon-only text") {
    const auto [emos, rest] = extract_emoticons(":(");
    REQUIRE(emos.size() == 1);
    CHECK(emos[0] == ":(");
    CHECK(rest.empty());
}

TEST_CASE("extract_emoticons: no match") {
    const auto [emos, rest] = extract_emoticons("plain");
    CHECK(emos.empty());
    CHECK(rest == "plain");
}

TEST_CASE("extract_emoticons: order preserved, longest match wins") {
    const auto [emos, rest] = extract_emoticons("wow :-) then :( end");
    REQUIRE(emos.size() == 2);
    CHECK(emos[0] == ":-)");  // not ":-" + ")"
    CHECK(emos[1] == ":(");
    CHECK(rest == "wow then end");
}

TEST_CASE("score_text: empty input is undetermined neutral") {
    const auto r = score_text("", demo_lexicons());
    CHECK(r.score == 0.0);
    CHECK(r.valence == ValenceClass::Neutral);
    CHECK(r.path == ScorePath::Undetermined);
    CHECK(!r.language_used.has_value());
}

TEST_CASE("score_text: emoticon-only path with hand-checked normalization") {
    // builtin weight for ":)" is 2.0; score = 2/sqrt(4+15)
    const auto r = score_text(":)", demo_lexicons());
    CHECK(r.path == ScorePath::EmoticonOnly);
    CHECK(r.score == doctest::Approx(2.0 / std::sqrt(19.0)).epsilon(1e-12));
    CHECK(r.valence == ValenceClass::Positive);
}

TEST_CASE("score_text: equal positive and negative weights cancel") {
    // love = +3.2, hate = -2.7, sad = -0.5 -> construct an exact cancel:
    // good (+1.9) + bad (-2.5) + happy (+2.7) + hate (-2.7) + lost (-1.3) shifts;
    // simplest exact pair: loved (2.9) vs ... use antisymmetric token pair
    // from the lexicon with equal magnitude: "fun" 2.3 has no exact negative,
    // so test the documented zero case through emoticons instead:
    const auto r = score_text(":) :(", demo_lexicons());  // +2.0 and -2.0
    CHECK(r.score == 0.0);
    CHECK(r.valence == ValenceClass::Neutral);
    CHECK(r.path == ScorePath::EmoticonOnly);
}

TEST_CASE("score_text: lexicon scoring with language detection") {
    StopwordLanguageDetector detector;
    const auto en = score_text("this is a very good day and i am happy",
                               demo_lexicons(), &detector);
    CHECK(en.path == ScorePath::LexiconOnly);
    CHECK(en.language_used == std::string("en"));
    CHECK(en.valence == ValenceClass::Positive);

    const auto pt = score_text("eu estou muito triste com isso e com medo",
                               demo_lexicons(), &detector);
    CHECK(pt.language_used == std::string("pt"));
    CHECK(pt.valence == ValenceClass::Negative);
}

TEST_CASE("score_text: mixed path combines lexicon and emoticon evidence") {
    StopwordLanguageDetector detector;
    const auto r = score_text("the day was good :)", demo_lexicons(), &detector);
    CHECK(r.path == ScorePath::Mixed);
    // good (1.9) + ':)' (2.0) = 3.9 -> 3.9/sqrt(3.9^2+15)
    CHECK(r.score == doctest::Approx(3.9 / std::sqrt(3.9 * 3.9 + 15.0)).epsilon(1e-12));
}

TEST_CASE("score_text: unknown language falls back to the primary lexicon") {
    StopwordLanguageDetector detector;
    IdentityTranslator translator;
    // no stopword hits: undetected language, scored with primary (en)
    const auto r = score_text("wunderbar good", demo_lexicons(), &detector, &translator);
    CHECK(r.language_used == std::string("en"));
    CHECK(r.valence == ValenceClass::Positive);
}

TEST_CASE("score_text: antisymmetry under weight negation") {
    Lexicon pos;
    pos.language = "xx";
    pos.entries = {{"alpha", 2.0}, {"beta", -1.0}};
    Lexicon neg = pos;
    for (auto& [tok, w] : neg.entries) w = -w;
    const auto a = score_text("alpha beta alpha", {pos});
    const auto b = score_text("alpha beta alpha", {neg});
    CHECK(a.score == doctest::Approx(-b.score).epsilon(1e-15));
}

TEST_CASE("score_text: monotonicity in added positive tokens") {
    Lexicon lex;
    lex.language = "xx";
    lex.entries = {{"up", 1.5}, {"down", -2.0}};
    std::string text = "down";
    double prev = score_text(text, {lex}).score;
    for (int i = 0; i < 8; ++i) {
        text += " up";
        const double cur = score_text(text, {lex}).score;
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("score_text: score always within [-1, 1]") {
    Lexicon lex;
    lex.language = "xx";
    lex.entries = {{"max", 4.0}};
    std::string text;
    for (int i = 0; i < 200; ++i) text += "max ";
    const auto r = score_text(text, {lex});
    CHECK(r.score <= 1.0);
    CHECK(r.score > 0.99);
}

TEST_CASE("classify_score thresholds") {
    CHECK(classify_score(0.0) == ValenceClass::Neutral);
    CHECK(classify_score(1.0) == ValenceClass::Positive);
    CHECK(classify_score(-0.05, 0.05) == ValenceClass::Negative);  // boundary inclusive
    CHECK(classify_score(0.05, 0.05) == ValenceClass::Positive);
    CHECK(classify_score(0.049, 0.05) == ValenceClass::Neutral);
    CHECK_THROWS_AS(classify_score(1.5), std::invalid_argument);
    CHECK_THROWS_AS(classify_score(-1.01), std::invalid_argument);
}

TEST_CASE("classify_score is a monotone step function") {
    ValenceClass prev = ValenceClass::Negative;
    for (double s = -1.0; s <= 1.0; s += 0.001) {
        const ValenceClass cur = classify_score(s);
        CHECK(static_cast<int>(cur) >= static_cast<int>(prev));
        prev = cur;
    }
}

TEST_CASE("lexicon parsing: sections, comments, errors") {
    const Lexicon lex = Lexicon::parse("# comment\nfoo\t1.5\n[emoticons]\n:)\t2.0\n", "xx");
    CHECK(lex.entries.at("foo") == 1.5);
    CHECK(lex.emoticons.at(":)") == 2.0);
    CHECK_THROWS(Lexicon::parse("foo 1.5\n", "xx"));         // no tab
    CHECK_THROWS(Lexicon::parse("foo\tabc\n", "xx"));        // bad weight
    CHECK_THROWS(Lexicon::parse("foo\t9.5\n", "xx"));        // outside [-4, 4]
}

TEST_CASE("language detector: ties and silence are undetected") {
    StopwordLanguageDetector detector;
    CHECK(!detector.detect("zzz qqq").has_value());
    CHECK(detector.detect("the cat and the dog") == std::string("en"));
    CHECK(detector.detect("não quero isso") == std::string("pt"));
}
