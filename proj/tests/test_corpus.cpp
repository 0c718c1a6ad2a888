#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cmx/corpus.hpp"
#include "generators.hpp"

using cmx::LangTag;
using Role = cmx::LangTag::Role;

namespace {

cmx::Dataset conll(const std::string& text, const cmx::Tagset& tagset) {
    std::istringstream in(text);
    return cmx::parse_conll(in, tagset);
}

cmx::Dataset tsv(const std::string& text) {
    std::istringstream in(text);
    return cmx::parse_tsv_classification(in);
}

std::string jsonl(const cmx::Dataset& d) {
    std::ostringstream out;
    cmx::write_jsonl(d, out);
    return out.str();
}

cmx::Dataset read(const std::string& text, cmx::ReadOptions opts = {}) {
    std::istringstream in(text);
    return cmx::read_jsonl(in, opts);
}

template <typename Fn>
std::string data_error_message(Fn&& fn) {
    try {
        fn();
    } catch (const cmx::DataError& e) {
        return e.what();
    }
    ADD_FAILURE() << "expected a DataError";
    return {};
}

const cmx::Tagset hi_en{"hi", "en"};

}  // namespace

TEST(LangTag, CanonicalNamesRoundTrip) {
    for (Role r : LangTag::closed_roles) {
        const LangTag t(r);
        EXPECT_EQ(LangTag::from_name(t.name()), t);
    }
    EXPECT_TRUE(LangTag::from_name("klingon").is_open());
    EXPECT_TRUE(LangTag(Role::lang1).is_language_token());
    EXPECT_TRUE(LangTag(Role::lang2).is_language_token());
    for (Role r : {Role::ne, Role::univ, Role::other, Role::mixed}) {
        EXPECT_FALSE(LangTag(r).is_language_token());
    }
    EXPECT_LT(LangTag(Role::lang1), LangTag(Role::lang2));
    EXPECT_LT(LangTag(Role::mixed), LangTag::open("a"));
}

TEST(Tagset, SynonymsAreCaseInsensitive) {
    EXPECT_EQ(hi_en.resolve("HI"), LangTag(Role::lang1));
    EXPECT_EQ(hi_en.resolve("En"), LangTag(Role::lang2));
    for (const char* s : {"univ", "Other-Univ", "UNK-UNIV"}) EXPECT_EQ(hi_en.resolve(s), LangTag(Role::univ));
    for (const char* s : {"ne", "NAME", "Ne"}) EXPECT_EQ(hi_en.resolve(s), LangTag(Role::ne));
    EXPECT_FALSE(hi_en.resolve("fr").has_value());
    EXPECT_TRUE(cmx::Tagset("hi", "en", true).resolve("fr")->is_open());
    EXPECT_THROW(cmx::Tagset("hi", "HI"), cmx::UsageError);
}

TEST(Tokenize, Examples) {
    using V = std::vector<std::string>;
    EXPECT_EQ(cmx::tokenize_whitespace("Movie acha tha"), (V{"Movie", "acha", "tha"}));
    EXPECT_EQ(cmx::tokenize_whitespace(""), V{});
    EXPECT_EQ(cmx::tokenize_whitespace("  a \t b "), (V{"a", "b"}));
    // U+00A0 and U+3000 are Unicode whitespace
    EXPECT_EQ(cmx::tokenize_whitespace("a\xC2\xA0" "b\xE3\x80\x80" "c\n"), (V{"a", "b", "c"}));
}

TEST(Tokenize, JoiningReproducesCollapsedText) {
    std::mt19937_64 g(7);
    const std::vector<std::string> gaps{" ", "  ", "\t", "\n ", "\xC2\xA0"};
    for (int trial = 0; trial < 500; ++trial) {
        auto words = gen::random_words(g, 0, 6);
        std::string text = trial % 2 ? " " : "";
        std::string collapsed;
        for (std::size_t i = 0; i < words.size(); ++i) {
            text += words[i] + gaps[g() % gaps.size()];
            collapsed += (i ? " " : "") + words[i];
        }
        const auto tokens = cmx::tokenize_whitespace(text);
        std::string joined;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            EXPECT_FALSE(tokens[i].empty());
            joined += (i ? " " : "") + tokens[i];
        }
        EXPECT_EQ(joined, collapsed);
    }
}

TEST(ParseConll, SingleSentence) {
    const auto d = conll("I\ten\nghar\thi\n\n", hi_en);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.task, cmx::TaskKind::tagging);
    const auto& r = d.records[0];
    EXPECT_EQ(r.uid, "0");
    EXPECT_EQ(r.text, "I ghar");
    EXPECT_EQ(*r.tokens, (std::vector<std::string>{"I", "ghar"}));
    EXPECT_EQ(*r.lid, (std::vector<LangTag>{Role::lang2, Role::lang1}));
}

TEST(ParseConll, EmptyStream) { EXPECT_TRUE(conll("", hi_en).empty()); }

TEST(ParseConll, SpaceDelimiterIsAnErrorAtLine1) {
    const auto msg = data_error_message([] { conll("I en", hi_en); });
    EXPECT_NE(msg.find("line 1"), std::string::npos) << msg;
}

TEST(ParseConll, UidCommentsAndIndices) {
    const auto d = conll("a\ten\n\n# uid = tweet-9\nb\thi\nc\tuniv\n\n\n# a note\nd\tne\n", hi_en);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.records[0].uid, "0");
    EXPECT_EQ(d.records[1].uid, "tweet-9");
    EXPECT_EQ(d.records[2].uid, "2");
    EXPECT_EQ(*d.records[1].lid, (std::vector<LangTag>{Role::lang1, Role::univ}));
}

TEST(ParseConll, ErrorsCarryLineNumbers) {
    auto msg = data_error_message([] { conll("a\ten\nb\ten\nc\ten\tX\n", hi_en); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    msg = data_error_message([] { conll("a\ten\n\nb\tfr\n", hi_en); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    msg = data_error_message([] { conll("# uid = x\na\ten\n\n# uid = x\nb\ten\n", hi_en); });
    EXPECT_NE(msg.find("duplicate uid"), std::string::npos) << msg;
    msg = data_error_message([] { conll("a\ten\n\xFF\ten\n", hi_en); });
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(ParseConll, OpenTagsetKeepsUnknownTags) {
    const auto d = conll("a\tfr\nb\tHI\r\n", cmx::Tagset("hi", "en", true));
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ((*d.records[0].lid)[0], LangTag::open("fr"));
    EXPECT_EQ((*d.records[0].lid)[1], LangTag(Role::lang1));
}

TEST(ParseConll, NormalizesTokensToNfc) {
    // "e" + combining acute -> precomposed e-acute
    const auto d = conll("cafe\xCC\x81\ten\n", hi_en);
    EXPECT_EQ((*d.records[0].tokens)[0], "caf\xC3\xA9");
}

TEST(ParseTsv, Examples) {
    auto d = tsv("uid\ttext\tlabel\n1\tkya baat\tpositive\n");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d.task, cmx::TaskKind::classification);
    EXPECT_EQ(d.records[0].uid, "1");
    EXPECT_EQ(d.records[0].text, "kya baat");
    EXPECT_EQ(d.records[0].label, "positive");
    EXPECT_TRUE(tsv("uid\ttext\tlabel\n").empty());
    const auto msg = data_error_message([] { tsv("uid\ttext\tlabel\n1\ta\tp\n1\tb\tn\n"); });
    EXPECT_NE(msg.find("duplicate uid"), std::string::npos);
    EXPECT_NE(msg.find("line 3"), std::string::npos);
}

TEST(ParseTsv, HeaderAndFieldErrors) {
    EXPECT_THROW(tsv(""), cmx::UsageError);
    EXPECT_THROW(tsv("1\tkya baat\tpositive\n"), cmx::UsageError);
    auto msg = data_error_message([] { tsv("uid\ttext\tlabel\n1\tonly two\n"); });
    EXPECT_NE(msg.find("line 2"), std::string::npos);
    msg = data_error_message([] { tsv("uid\ttext\tlabel\n1\t\tpositive\n"); });
    EXPECT_NE(msg.find("line 2"), std::string::npos);
}

TEST(Jsonl, ConllRoundTripIsIdentity) {
    const auto d = conll("I\ten\nghar\thi\n\n", hi_en);
    const auto text = jsonl(d);
    EXPECT_EQ(text, "{\"uid\":\"0\",\"text\":\"I ghar\",\"tokens\":[\"I\",\"ghar\"],\"lid\":[\"lang2\",\"lang1\"]}\n");
    EXPECT_EQ(read(text), d);
}

TEST(Jsonl, OneLinePerRecordAndNoNulls) {
    cmx::Dataset d;
    d.task = cmx::TaskKind::classification;
    for (int i = 0; i < 3; ++i) {
        cmx::StandardRecord r;
        r.uid = std::to_string(i);
        r.text = "t";
        r.label = "l";
        d.records.push_back(r);
    }
    const auto text = jsonl(d);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_EQ(text.find("null"), std::string::npos);
    EXPECT_EQ(text.find("tokens"), std::string::npos);
}

TEST(Jsonl, RandomDatasetsRoundTrip) {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto task = static_cast<cmx::TaskKind>(trial % 3);
        const auto d = gen::random_dataset(g, task, 6);
        cmx::ReadOptions o;
        o.task = task;
        const auto back = read(jsonl(d), o);
        ASSERT_EQ(back, d) << jsonl(d);
        EXPECT_EQ(jsonl(back), jsonl(d));
    }
}

TEST(Jsonl, SchemaErrorsNameUidAndField) {
    auto msg = data_error_message([] {
        read("{\"uid\":\"u7\",\"text\":\"a b c\",\"tokens\":[\"a\",\"b\",\"c\"],\"lid\":[\"lang1\",\"lang2\"]}\n",
             {cmx::TaskKind::tagging, true});
    });
    EXPECT_NE(msg.find("u7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("lid"), std::string::npos) << msg;

    msg = data_error_message([] { read("{\"uid\":\"1\",\"text\":\"a\",\"label\":\"x\"}\n{oops\n"); });
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;

    msg = data_error_message([] { read("{\"uid\":\"1\",\"text\":\"a\",\"label\":null}\n"); });
    EXPECT_NE(msg.find("label"), std::string::npos) << msg;

    msg = data_error_message([] { read("{\"uid\":\"1\",\"text\":\"a\",\"colour\":\"red\"}\n"); });
    EXPECT_NE(msg.find("colour"), std::string::npos) << msg;

    msg = data_error_message([] {
        read("{\"uid\":\"1\",\"text\":\"a\",\"label\":\"x\"}\n{\"uid\":\"1\",\"text\":\"b\",\"label\":\"y\"}\n");
    });
    EXPECT_NE(msg.find("duplicate uid"), std::string::npos) << msg;
}

TEST(Jsonl, TaskInference) {
    EXPECT_EQ(read("{\"uid\":\"1\",\"text\":\"a\",\"label\":\"x\"}\n").task, cmx::TaskKind::classification);
    EXPECT_EQ(read("{\"uid\":\"1\",\"text\":\"a\",\"target_text\":\"x\"}\n").task, cmx::TaskKind::generation);
    EXPECT_THROW(read("{\"uid\":\"1\",\"text\":\"a\"}\n"), cmx::DataError);
    cmx::ReadOptions raw;
    raw.require_task_schema = false;
    EXPECT_EQ(read("{\"uid\":\"1\",\"text\":\"a\"}\n", raw).size(), 1u);
    cmx::ReadOptions cls;
    cls.task = cmx::TaskKind::classification;
    EXPECT_THROW(read("{\"uid\":\"1\",\"text\":\"a\",\"target_text\":\"x\"}\n", cls), cmx::DataError);
}

TEST(Validate, Examples) {
    const cmx::Tagset any = cmx::Tagset::open_tagset();
    cmx::StandardRecord r;
    r.uid = "a";
    r.text = "x y z";
    r.tokens = std::vector<std::string>{"x", "y", "z"};
    r.lid = std::vector<LangTag>{Role::lang1, Role::lang2, Role::univ};
    EXPECT_TRUE(cmx::validate(r, cmx::TaskKind::tagging, any).empty());

    auto v = cmx::validate(r, cmx::TaskKind::classification, any);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].field, "label");
    EXPECT_EQ(v[0].uid, "a");

    r.lid->pop_back();
    v = cmx::validate(r, cmx::TaskKind::tagging, any);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].field, "lid");

    cmx::StandardRecord empty;
    empty.uid = "e";
    v = cmx::validate(empty, cmx::TaskKind::generation, any);
    EXPECT_EQ(v.size(), 2u);  // text + target_text
}

TEST(Validate, OpenTagsNeedOpenTagset) {
    cmx::StandardRecord r;
    r.uid = "a";
    r.text = "x";
    r.tokens = std::vector<std::string>{"x"};
    r.lid = std::vector<LangTag>{LangTag::open("fr")};
    EXPECT_EQ(cmx::validate(r, cmx::TaskKind::tagging, hi_en).size(), 1u);
    EXPECT_TRUE(cmx::validate(r, cmx::TaskKind::tagging, cmx::Tagset::open_tagset()).empty());
}

// Random tag-array mutations are always detected.
TEST(Validate, DetectsInjectedMisalignment) {
    std::mt19937_64 g(3);
    const cmx::Tagset any = cmx::Tagset::open_tagset();
    for (int trial = 0; trial < 1000; ++trial) {
        auto d = gen::random_dataset(g, cmx::TaskKind::tagging, 3);
        if (d.empty()) continue;
        auto& r = d.records[g() % d.size()];
        ASSERT_TRUE(cmx::validate(r, d.task, any).empty());
        const int kind = static_cast<int>(g() % 4);
        if (kind == 0) {
            r.lid->push_back(LangTag(Role::univ));
        } else if (kind == 1) {
            r.lid->pop_back();
        } else if (kind == 2) {
            r.tokens->push_back("extra");
        } else {
            r.pos = std::vector<std::string>(r.tokens->size() + 1 + g() % 3, "X");
        }
        EXPECT_FALSE(cmx::validate(r, d.task, any).empty());
    }
}

TEST(Unicode, NfcIsIdempotent) {
    std::mt19937_64 g(5);
    const std::vector<std::string> parts{"e", "\xCC\x81", "\xE0\xA4\x95", "\xE0\xA4\xBC", "A", "\xEF\xAC\x80"};
    for (int i = 0; i < 300; ++i) {
        std::string s;
        for (int k = 0; k < 6; ++k) s += parts[g() % parts.size()];
        const auto once = cmx::unicode::nfc(s);
        EXPECT_EQ(cmx::unicode::nfc(once), once);
    }
    EXPECT_THROW(cmx::unicode::nfc("\xC3"), cmx::DataError);
}
