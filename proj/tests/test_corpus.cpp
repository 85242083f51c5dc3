#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace megalign;
using namespace megalign::testing;

TEST(Inflection, IrregularAndRuleForms) {
  EXPECT_EQ(past_tense("encourage"), "encouraged");
  EXPECT_EQ(past_tense("eat"), "ate");
  EXPECT_EQ(past_participle("eat"), "eaten");
  EXPECT_EQ(past_tense("stop"), "stopped");
  EXPECT_EQ(past_tense("plan"), "planned");
  EXPECT_EQ(past_tense("carry"), "carried");
  EXPECT_EQ(past_tense("play"), "played");
  EXPECT_EQ(past_tense("visit"), "visited");
  EXPECT_EQ(past_tense("fix"), "fixed");
  EXPECT_EQ(past_tense("watch"), "watched");
  EXPECT_EQ(past_participle("watch"), "watched");
  EXPECT_EQ(past_participle("write"), "written");
  EXPECT_THROW(past_tense(""), DataError);
  EXPECT_THROW(past_tense("Run"), DataError);
}

TEST(Inflection, BuiltinCopyMatchesDataFile) {
  const auto file = slurp(data_dir() / "irregular_verbs.tsv");
  EXPECT_EQ(std::string(kIrregularVerbsTsv).substr(1), file);
  EXPECT_GE(IrregularLexicon::builtin().size(), 150u);
  const auto loaded = IrregularLexicon::load(data_dir() / "irregular_verbs.tsv");
  EXPECT_EQ(loaded.size(), IrregularLexicon::builtin().size());
}

TEST(Inflection, CustomLexiconOverrides) {
  std::istringstream in("# comment\ndive\tdove\tdived\n");
  const auto lex = IrregularLexicon::parse(in);
  EXPECT_EQ(past_tense("dive", lex), "dove");
  EXPECT_EQ(past_tense("eat", lex), "eated");
  std::istringstream bad("dive dove\n");
  EXPECT_THROW(IrregularLexicon::parse(bad), DataError);
}

TEST(Generate, TemplateSentences) {
  EXPECT_EQ(generate({"dog", "eat", "bone", 7}, Voice::passive).stimulus.text(), "the bone was eaten by the dog");
  EXPECT_EQ(generate({"woman", "encourage", "girl", 7}, Voice::active).stimulus.text(), "the woman encouraged the girl");
  EXPECT_EQ(generate({"girl", "watch", "boy", 7}, Voice::passive).stimulus.text(), "the boy was watched by the girl");
  const auto g = generate({"dog", "eat", "bone", 7}, Voice::passive);
  EXPECT_EQ(g.stimulus.voice, Voice::passive);
  EXPECT_EQ(g.stimulus.tokens[3].pos, "VBN");
  EXPECT_EQ(g.stimulus.tokens[3].position, 3u);
  EXPECT_THROW(generate({"", "eat", "bone", 1}, Voice::active), DataError);
}

TEST(Generate, CountsAndDedup) {
  const auto t = random_triples(200, 3);
  const auto all = generate_all(t);
  EXPECT_EQ(all.size(), 400u);
  std::size_t act = 0;
  for (const auto &g : all)
    act += g.template_id == Voice::active;
  EXPECT_EQ(act, 200u);
  const auto d = dedup(all);
  std::set<std::string> texts;
  for (const auto &g : d)
    EXPECT_TRUE(texts.insert(g.stimulus.text()).second);
  EXPECT_EQ(d.front().stimulus.sentence_id, "ssc-000001");
  EXPECT_LE(d.size(), 400u);
  // generation is deterministic
  EXPECT_EQ(stimuli_to_json({generate_all(t)[5].stimulus}), stimuli_to_json({all[5].stimulus}));
}

TEST(Subsample, ThresholdAndAllowlists) {
  const std::vector<SvoTriple> t{{"dog", "eat", "bone", 5}, {"dog", "eat", "bone", 6}, {"dog", "eat", "moon", 9},
                                 {"cat", "fly", "bone", 9}, {"cat", "eat", "dog", 100}};
  const std::set<std::string> verbs{"eat"}, ents{"dog", "cat", "bone"};
  const auto kept = subsample(t, kDefaultFrequencyThreshold, verbs, ents);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].subject, "cat");
  EXPECT_EQ(kept[1].frequency, 6);
  EXPECT_TRUE(subsample({}, 6, verbs, ents).empty());
  EXPECT_THROW(load_allowlist("/nonexistent/verbs.txt"), DataError);
}

TEST(Subsample, TripleFileParsing) {
  std::istringstream in("# s v o f\nDog\teat\tbone\t7\n\ncat\tsee\tmouse\t0\n");
  const auto t = parse_triples(in);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].subject, "dog");
  std::istringstream bad("dog\teat\tbone\n");
  EXPECT_THROW(parse_triples(bad), DataError);
  std::istringstream neg("dog\teat\tbone\t-1\n");
  EXPECT_THROW(parse_triples(neg), DataError);
}

TEST(Extract, PatternExamples) {
  const auto st = std::vector<SentenceStimulus>{
      make_sentence("a", "the/DT dog/NN ate/VBD the/DT bone/NN", Voice::active),
      make_sentence("b", "the/DT bone/NN was/VBD eaten/VBN by/IN the/DT dog/NN", Voice::active),
      make_sentence("c", "dogs/NNS ate/VBD bones/NNS", Voice::active),
      make_sentence("d", "the/DT dog/NN ate/VBD the/DT bone/NN that/WDT fell/VBD ./.", Voice::active)};
  const auto ex = extract_patterns(st);
  ASSERT_EQ(ex.size(), 3u);
  EXPECT_EQ(ex[0].stimulus.voice, Voice::active);
  EXPECT_EQ(ex[1].stimulus.voice, Voice::passive);
  EXPECT_EQ(ex[1].subject, "dog");
  EXPECT_EQ(ex[1].object, "bone");
  EXPECT_EQ(ex[1].verb, "eaten");
  EXPECT_FALSE(ex[0].trailing_clause);
  EXPECT_TRUE(ex[2].trailing_clause);
  EXPECT_EQ(ex[2].stimulus.text(), "the dog ate the bone that fell");
}

TEST(Extract, RoundTripRecoversTriples) {
  for (const auto &t : random_triples(1000, 17)) {
    for (Voice v : {Voice::active, Voice::passive}) {
      const auto g = generate(t, v);
      const auto m = match_pattern(g.stimulus);
      ASSERT_TRUE(m.has_value()) << g.stimulus.text();
      EXPECT_EQ(m->stimulus.voice, v);
      EXPECT_EQ(m->subject, t.subject);
      EXPECT_EQ(m->object, t.object);
      EXPECT_EQ(m->verb, v == Voice::active ? past_tense(t.verb) : past_participle(t.verb));
      EXPECT_FALSE(m->trailing_clause);
    }
  }
}

TEST(Extract, TaggedLinesAndStats) {
  std::istringstream in("the/DT dog/NN ate/VBD the/DT bone/NN\n\nthe/DT bone/NN was/VBD eaten/VBN by/IN the/DT dog/NN\n");
  const auto st = parse_tagged_lines(in);
  ASSERT_EQ(st.size(), 2u);
  EXPECT_EQ(st[1].sentence_id, "w000002");
  const auto ex = extract_patterns(st);
  std::vector<SentenceStimulus> matched;
  for (const auto &e : ex)
    matched.push_back(e.stimulus);
  const auto stats = corpus_stats(matched);
  EXPECT_EQ(stats.sentences, 2u);
  EXPECT_EQ(stats.active, 1u);
  EXPECT_EQ(stats.passive, 1u);
  EXPECT_EQ(stats.tokens, 12u);
  EXPECT_EQ(stats.vocabulary, 7u);
}

TEST(Extract, ShippedStimuliAllMatch) {
  const auto ex = extract_patterns(passact2());
  EXPECT_EQ(ex.size(), 32u);
  std::size_t passive = 0;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    EXPECT_EQ(ex[i].stimulus.voice, passact2()[i].voice);
    passive += ex[i].stimulus.voice == Voice::passive;
  }
  EXPECT_EQ(passive, 16u);
}
