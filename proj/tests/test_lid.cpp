#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "cmx/lid.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using cmx::LangTag;
using Role = cmx::LangTag::Role;

namespace {

using Corpus = std::vector<std::pair<std::string, std::string>>;

// One record per token keeps the corpus shape irrelevant to the counts.
cmx::Dataset to_dataset(const Corpus& corpus) {
    cmx::Dataset d;
    d.task = cmx::TaskKind::tagging;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        cmx::StandardRecord r;
        r.uid = std::to_string(i);
        r.text = corpus[i].first;
        r.tokens = std::vector<std::string>{corpus[i].first};
        r.lid = std::vector<LangTag>{LangTag::from_name(corpus[i].second)};
        d.records.push_back(std::move(r));
    }
    return d;
}

Corpus ten_tokens() {
    Corpus c;
    for (int i = 0; i < 5; ++i) c.emplace_back("the", "lang2");
    for (int i = 0; i < 5; ++i) c.emplace_back("hai", "lang1");
    return c;
}

std::string save(const cmx::LidModel& m) {
    std::ostringstream out;
    cmx::lid_save(m, out);
    return out.str();
}

cmx::LidModel load(const std::string& s) {
    std::istringstream in(s);
    return cmx::lid_load(in);
}

}  // namespace

TEST(LidTrain, CountsTenTokenCorpus) {
    const auto m = cmx::lid_train(to_dataset(ten_tokens()));
    EXPECT_EQ(m.tag_priors, (cmx::LidModel::Counts{{Role::lang1, 5}, {Role::lang2, 5}}));
    EXPECT_EQ(m.lexicon.at("the"), (cmx::LidModel::Counts{{Role::lang2, 5}}));
    EXPECT_EQ(m.ngram_stats.at(Role::lang2).at("^th"), 5u);
    EXPECT_EQ(m.ngram_stats.at(Role::lang2).at("$"), 5u);
    // Latin carries both languages, so no script rule.
    EXPECT_TRUE(m.script_rules.empty());
    EXPECT_EQ(m.total_tokens(), 10u);
}

TEST(LidTrain, SingleToken) {
    const auto m = cmx::lid_train(to_dataset({{"a", "lang1"}}));
    EXPECT_EQ(m.tag_priors, (cmx::LidModel::Counts{{Role::lang1, 1}}));
}

TEST(LidTrain, NamedEntitiesSkipScriptRules) {
    const auto m = cmx::lid_train(to_dataset({{"Ram", "ne"}, {"the", "lang2"}}));
    EXPECT_EQ(m.lexicon.at("ram"), (cmx::LidModel::Counts{{Role::ne, 1}}));
    EXPECT_EQ(m.tag_priors.at(Role::ne), 1u);
    // Only the lang2 token votes for Latin, so Latin maps to lang2.
    EXPECT_EQ(m.script_rules, (std::map<std::string, LangTag>{{"Latin", Role::lang2}}));
    const auto ne_only = cmx::lid_train(to_dataset({{"Ram", "ne"}}));
    EXPECT_TRUE(ne_only.script_rules.empty());
}

TEST(LidTrain, Errors) {
    EXPECT_THROW(cmx::lid_train(cmx::Dataset{}), cmx::UsageError);
    auto d = to_dataset(ten_tokens());
    d.records[3].lid->push_back(Role::univ);
    try {
        cmx::lid_train(d);
        FAIL();
    } catch (const cmx::DataError& e) {
        EXPECT_NE(std::string(e.what()).find("'3'"), std::string::npos);
    }
    cmx::LidConfig bad;
    bad.ngram_min = 3;
    bad.ngram_max = 2;
    EXPECT_THROW(cmx::lid_train(to_dataset(ten_tokens()), bad), cmx::UsageError);
}

TEST(LidTag, LexiconPath) {
    const auto m = cmx::lid_train(to_dataset(ten_tokens()));
    const auto p = cmx::lid_tag_token(m, "the");
    EXPECT_EQ(p.tag, LangTag(Role::lang2));
    EXPECT_EQ(p.source, cmx::PredictionSource::lexicon);
    EXPECT_DOUBLE_EQ(p.log_score, 0.0);
    EXPECT_EQ(cmx::lid_tag_token(m, "THE").source, cmx::PredictionSource::lexicon);
}

TEST(LidTag, ScriptRulePath) {
    auto m = cmx::lid_train(to_dataset(ten_tokens()));
    m.script_rules.emplace("Devanagari", Role::lang1);
    const auto p = cmx::lid_tag_token(m, "घर");
    EXPECT_EQ(p.tag, LangTag(Role::lang1));
    EXPECT_EQ(p.source, cmx::PredictionSource::script_rule);
    EXPECT_TRUE(std::isfinite(p.log_score));
}

// Frozen from an independent Python evaluation of the same NB formula.
TEST(LidTag, NgramPathOnUnseenToken) {
    const auto m = cmx::lid_train(to_dataset(ten_tokens()));
    const auto p = cmx::lid_tag_token(m, "thee");
    EXPECT_EQ(p.tag, LangTag(Role::lang2));
    EXPECT_EQ(p.source, cmx::PredictionSource::ngram);
    EXPECT_NEAR(p.log_score, -31.925423405892538, 1e-9);
    const auto scores = m.ngram_log_scores("thee");
    EXPECT_NEAR(scores[0], -48.05125862894504, 1e-9);  // lang1

    const auto o = oracle::naive_bayes(ten_tokens(), "thee", 1, 3, 1.0);
    EXPECT_EQ(o.tag, "lang2");
    EXPECT_NEAR(o.score, p.log_score, 1e-9);
}

TEST(LidTag, EmptyTokenIsUniv) {
    const auto m = cmx::lid_train(to_dataset(ten_tokens()));
    const auto p = cmx::lid_tag_token(m, "");
    EXPECT_EQ(p.tag, LangTag(Role::univ));
    EXPECT_EQ(p.log_score, 0.0);
}

TEST(LidTag, LexiconMinCountFallsThroughToNgrams) {
    const auto m = cmx::lid_train(to_dataset({{"xyz", "lang1"}, {"abc", "lang2"}, {"abd", "lang2"}}));
    // one occurrence < default lexicon_min_count of 2
    EXPECT_EQ(cmx::lid_tag_token(m, "xyz").source, cmx::PredictionSource::ngram);
}

TEST(LidTag, TiesFollowTagOrder) {
    cmx::LidConfig cfg;
    cfg.lexicon_min_count = 1;
    const auto m = cmx::lid_train(to_dataset({{"ok", "lang2"}, {"ok", "lang1"}}), cfg);
    EXPECT_EQ(cmx::lid_tag_token(m, "ok").tag, LangTag(Role::lang1));
    // symmetric corpus: NB scores tie exactly
    EXPECT_EQ(cmx::lid_tag_token(m, "zz").tag, LangTag(Role::lang1));
}

// NB oracle equivalence on small random corpora.
TEST(LidTag, NgramPathMatchesBruteForceNaiveBayes) {
    std::mt19937_64 g(17);
    const std::vector<std::string> tags{"lang1", "lang2", "ne", "univ"};
    const std::vector<std::string> letters{"a", "b", "h", "t", "e", "ai", "k"};
    for (int trial = 0; trial < 300; ++trial) {
        Corpus corpus;
        const std::size_t n = 1 + g() % 20;
        for (std::size_t i = 0; i < n; ++i) {
            std::string w;
            for (std::size_t k = 1 + g() % 4; k > 0; --k) w += letters[g() % letters.size()];
            corpus.emplace_back(w, tags[g() % tags.size()]);
        }
        cmx::LidConfig cfg;
        cfg.ngram_min = 1 + static_cast<int>(g() % 2);
        cfg.ngram_max = cfg.ngram_min + static_cast<int>(g() % 3);
        cfg.alpha = 0.5 + static_cast<double>(g() % 4) * 0.5;
        const auto m = cmx::lid_train(to_dataset(corpus), cfg);
        for (int q = 0; q < 10; ++q) {
            std::string w;
            for (std::size_t k = 1 + g() % 5; k > 0; --k) w += letters[g() % letters.size()];
            const auto o = oracle::naive_bayes(corpus, w, cfg.ngram_min, cfg.ngram_max, cfg.alpha);
            const auto scores = m.ngram_log_scores(w);
            const auto& order = m.scored_tags();
            ASSERT_EQ(order.size(), o.all.size());
            std::size_t best = 0;
            for (std::size_t t = 0; t < order.size(); ++t) {
                EXPECT_NEAR(scores[t], o.all.at(order[t].name()), 1e-9);
                if (scores[t] > scores[best]) best = t;
            }
            EXPECT_EQ(order[best].name(), o.tag);
            const auto p = m.tag_token(w);
            if (p.source == cmx::PredictionSource::ngram) {
                EXPECT_EQ(p.tag.name(), o.tag);
                EXPECT_NEAR(p.log_score, o.score, 1e-9);
            }
        }
    }
}

TEST(LidTag, LexiconMajorityIsMonotone) {
    cmx::LidConfig cfg;
    cfg.lexicon_min_count = 1;
    Corpus corpus{{"acha", "lang1"}, {"acha", "lang1"}, {"acha", "lang2"}};
    for (int extra = 0; extra < 20; ++extra) {
        const auto m = cmx::lid_train(to_dataset(corpus), cfg);
        EXPECT_EQ(m.tag_token("acha").tag, LangTag(Role::lang1));
        corpus.emplace_back("acha", "lang1");
        if (extra % 3 == 0) corpus.emplace_back("other", "lang2");
    }
}

TEST(LidTag, ScriptSeparableCorpusIsPerfect) {
    std::mt19937_64 g(23);
    Corpus train;
    for (int i = 0; i < 200; ++i) {
        train.emplace_back(gen::syllable_word(g, gen::devanagari_syllables(), 1, 3), "lang1");
        train.emplace_back(gen::syllable_word(g, gen::latin_syllables(), 1, 3), "lang2");
    }
    const auto m = cmx::lid_train(to_dataset(train));
    EXPECT_EQ(m.script_rules.at("Devanagari"), LangTag(Role::lang1));
    EXPECT_EQ(m.script_rules.at("Latin"), LangTag(Role::lang2));
    for (int i = 0; i < 200; ++i) {
        EXPECT_EQ(m.tag_token(gen::syllable_word(g, gen::devanagari_syllables(), 2, 5)).tag,
                  LangTag(Role::lang1));
        EXPECT_EQ(m.tag_token(gen::syllable_word(g, gen::latin_syllables(), 2, 5)).tag,
                  LangTag(Role::lang2));
    }
}

TEST(LidTagDataset, Examples) {
    const auto m = cmx::lid_train(to_dataset(ten_tokens()));
    cmx::Dataset d;
    cmx::StandardRecord a;
    a.uid = "a";
    a.text = "the ghar";
    cmx::StandardRecord b;
    b.uid = "b";
    b.text = "x";
    b.tokens = std::vector<std::string>{};
    d.records = {a, b};
    const auto out = cmx::lid_tag_dataset(m, d);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out.records[0].uid, "a");
    ASSERT_EQ(out.records[0].lid->size(), 2u);
    EXPECT_EQ((*out.records[0].lid)[0], LangTag(Role::lang2));
    EXPECT_EQ((*out.records[0].lid)[1], m.tag_token("ghar").tag);
    EXPECT_TRUE(out.records[1].lid->empty());

    EXPECT_THROW(cmx::lid_tag_dataset(m, out), cmx::UsageError);
    EXPECT_EQ(cmx::lid_tag_dataset(m, out, true, 4), out);
}

TEST(LidModelFile, SaveLoadIsIdentity) {
    std::mt19937_64 g(29);
    Corpus corpus;
    for (int i = 0; i < 300; ++i) {
        corpus.emplace_back(gen::syllable_word(g, gen::romanized_hindi_syllables(), 1, 3), "lang1");
        corpus.emplace_back(gen::syllable_word(g, gen::latin_syllables(), 1, 3), "lang2");
        if (i % 10 == 0) corpus.emplace_back("घर", "lang1");
        if (i % 7 == 0) corpus.emplace_back("!", "univ");
    }
    const auto m = cmx::lid_train(to_dataset(corpus));
    const auto text = save(m);
    const auto back = load(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(save(back), text);
    for (int i = 0; i < 1000; ++i) {
        const auto w = gen::random_word(g);
        const auto a = m.tag_token(w);
        const auto b = back.tag_token(w);
        EXPECT_EQ(a.tag, b.tag);
        EXPECT_EQ(a.source, b.source);
        EXPECT_EQ(a.log_score, b.log_score);
    }
}

TEST(LidModelFile, DeterministicAndAuditable) {
    const auto a = save(cmx::lid_train(to_dataset(ten_tokens())));
    const auto b = save(cmx::lid_train(to_dataset(ten_tokens())));
    EXPECT_EQ(a, b);
    const auto j = nlohmann::json::parse(a);
    EXPECT_EQ(j.at("version"), 1);
    std::uint64_t sum = 0;
    for (const auto& [tag, n] : j.at("tag_priors").items()) sum += n.get<std::uint64_t>();
    EXPECT_EQ(sum, 10u);
    // keys appear sorted
    EXPECT_LT(a.find("\"config\""), a.find("\"lexicon\""));
    EXPECT_LT(a.find("\"tag_priors\""), a.find("\"version\""));
}

TEST(LidModelFile, RejectsBadDocuments) {
    const auto text = save(cmx::lid_train(to_dataset(ten_tokens())));
    EXPECT_THROW(load(text.substr(0, text.size() / 2)), cmx::DataError);
    EXPECT_THROW(load(""), cmx::DataError);
    auto j = nlohmann::json::parse(text);
    j["version"] = 2;
    EXPECT_THROW(load(j.dump()), cmx::DataError);
    j["version"] = 1;
    j["tag_priors"]["lang1"] = -3;
    EXPECT_THROW(load(j.dump()), cmx::DataError);
}
