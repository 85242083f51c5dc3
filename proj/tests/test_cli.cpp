#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace megalign;
using namespace megalign::testing;

TEST(Config, ParsesDocumentedKeys) {
  std::istringstream in("# c\nfolds = 4\nlambdas = 1, 10\nsubsets = nouns,verbs\nthreads = 3\nout = results\n");
  const auto c = parse_config(in, "/base");
  EXPECT_EQ(c.folds, 4);
  EXPECT_EQ(c.lambdas, (std::vector<double>{1, 10}));
  EXPECT_EQ(c.subsets, (std::vector<std::string>{"nouns", "verbs"}));
  EXPECT_EQ(c.resolve(c.out), fs::path("/base/results"));
}

TEST(Config, FieldPreciseDiagnostics) {
  auto msg = [](const std::string &text) {
    std::istringstream in(text);
    try {
      parse_config(in, ".");
    } catch (const ConfigError &e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(msg("folds = many\n").find("'folds'"), std::string::npos);
  EXPECT_NE(msg("x\n").find("line 1"), std::string::npos);
  EXPECT_NE(msg("bogus = 1\n").find("bogus"), std::string::npos);
  EXPECT_NE(msg("folds = 3\nfolds = 4\n").find("folds"), std::string::npos);
  EXPECT_NE(msg("feature_model = bert\n").find("feature_model"), std::string::npos);
  EXPECT_NE(msg("lambdas = 1, -1\n").find("lambdas"), std::string::npos);
}

TEST(Config, HashIgnoresThreadsOnly) {
  RunConfig a, b;
  b.threads = 8;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.fold_seed = 9;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run_cli_args({}).code, 1);
  EXPECT_EQ(run_cli_args({"frobnicate"}).code, 1);
  EXPECT_EQ(run_cli_args({"corpus", "shuffle"}).code, 1);
  const auto r = run_cli_args({"schema"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sim_noise"), std::string::npos);
}

TEST(Cli, MissingAtlasNamesField) {
  TempDir tmp("cli_atlas");
  const auto cfg = write_small_config(tmp.path());
  ASSERT_EQ(run_cli_args({"-c", cfg.string(), "simulate"}).code, 0);
  ASSERT_EQ(run_cli_args({"-c", cfg.string(), "prep"}).code, 0);
  const auto r = run_cli_args({"-c", cfg.string(), "--set", "atlas=/nowhere/atlas.csv", "eval"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("'atlas'"), std::string::npos) << r.err;
}

TEST(Cli, DataErrorsExitTwo) {
  TempDir tmp("cli_data");
  const auto cfg = write_small_config(tmp.path());
  write_text_file(tmp.path() / "bad.json", "[{\"sentence_id\": 3}]");
  const auto r = run_cli_args({"-c", cfg.string(), "--set", "stimuli=" + (tmp.path() / "bad.json").string(), "simulate"});
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST(Cli, NoiselessEvalReportsPerfectAccuracy) {
  TempDir tmp("cli_noiseless");
  const auto cfg = write_small_config(tmp.path());
  const auto c = cfg.string();
  ASSERT_EQ(run_cli_args({"-c", c, "--set", "sim_noise=0", "simulate"}).code, 0);
  ASSERT_EQ(run_cli_args({"-c", c, "--set", "sim_noise=0", "prep"}).code, 0);
  const auto r = run_cli_args({"-c", c, "--set", "sim_noise=0", "--set", "regions=all", "eval"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = read_json_file(tmp.path() / "out" / "eval.json");
  for (const auto &res : j.at("results"))
    EXPECT_EQ(res.at("accuracy").get<double>(), 1.0);
}

TEST(Cli, FullPipelineWritesStampedArtifacts) {
  TempDir tmp("cli_full");
  const auto cfg = write_small_config(tmp.path());
  ASSERT_EQ(run_pipeline(cfg), "");
  const auto out = tmp.path() / "out";
  for (const char *f : {"eval.json", "eval.csv", "eval.svg", "sensitivity_noun.json", "agreement_noun.csv",
                        "agreement_noun.svg", "augment.json", "augment.csv", "augment.svg", "corpus_stats.json",
                        "report.md", "truth.json", "model/model.json", "synthetic/responses.json"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  const json ev = read_json_file(out / "eval.json");
  const auto hash = ev.at("provenance").at("config_hash").get<std::string>();
  EXPECT_EQ(hash.size(), 64u);
  EXPECT_EQ(ev.at("provenance").at("inputs").count("stimuli"), 1u);
  EXPECT_EQ(ev.at("results").size(), 15u);
  for (const char *f : {"eval.csv", "augment.csv", "eval.svg", "report.md"})
    EXPECT_NE(slurp(out / f).find(hash), std::string::npos) << f;
  // the sensitivity run overrides `responses`, so it carries its own hash
  const json sj = read_json_file(out / "sensitivity_noun.json");
  const auto shash = sj.at("provenance").at("config_hash").get<std::string>();
  EXPECT_NE(shash, hash);
  EXPECT_NE(slurp(out / "agreement_noun.csv").find(shash), std::string::npos);
  const json aug = read_json_file(out / "augment.json");
  EXPECT_EQ(aug.at("synthetic_used").get<std::size_t>(), 160u);
  const json sens = read_json_file(out / "sensitivity_noun.json");
  EXPECT_EQ(sens.at("repetition"), 1);
}

TEST(Cli, SensitivityRefusesAveragedResponses) {
  TempDir tmp("cli_sens");
  const auto cfg = write_small_config(tmp.path());
  ASSERT_EQ(run_cli_args({"-c", cfg.string(), "simulate"}).code, 0);
  EXPECT_EQ(run_cli_args({"-c", cfg.string(), "sensitivity"}).code, 2);
}

TEST(Cli, CorpusGenAndExtract) {
  TempDir tmp("cli_corpus");
  write_text_file(tmp.path() / "triples.tsv", "dog\teat\tbone\t9\nwoman\tencourage\tgirl\t6\ncat\tsee\tdog\t2\n");
  write_text_file(tmp.path() / "verbs.txt", "eat\nencourage\nsee\n");
  write_text_file(tmp.path() / "entities.txt", "dog\nbone\nwoman\ngirl\ncat\n");
  write_text_file(tmp.path() / "tagged.txt", "the/DT dog/NN ate/VBD the/DT bone/NN\nDogs/NNS ate/VBD bones/NNS\n");
  write_text_file(tmp.path() / "c.cfg", "out = .\ntriples = triples.tsv\nverb_allowlist = verbs.txt\n"
                                        "entity_allowlist = entities.txt\ntagged = tagged.txt\n");
  const auto c = (tmp.path() / "c.cfg").string();
  const auto g = run_cli_args({"-c", c, "corpus", "gen"});
  ASSERT_EQ(g.code, 0) << g.err;
  const auto lines = slurp(tmp.path() / "generated.txt");
  EXPECT_NE(lines.find("the bone was eaten by the dog\n"), std::string::npos);
  EXPECT_NE(lines.find("the woman encouraged the girl\n"), std::string::npos);
  EXPECT_EQ(load_stimuli(tmp.path() / "generated.json").size(), 4u);
  ASSERT_EQ(run_cli_args({"-c", c, "corpus", "extract"}).code, 0);
  EXPECT_EQ(load_stimuli(tmp.path() / "extracted.json").size(), 1u);
  EXPECT_EQ(run_cli_args({"-c", c, "--set", "verb_allowlist=missing.txt", "corpus", "gen"}).code, 1);
}
