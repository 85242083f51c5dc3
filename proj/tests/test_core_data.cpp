#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace megalign;
using namespace megalign::testing;

namespace {
Epoch make_epoch(const std::string &sid, std::size_t pos, int rep, Eigen::Index sensors, Eigen::Index t,
                 std::uint64_t seed) {
  Epoch e;
  e.subject_id = "s1";
  e.sentence_id = sid;
  e.position = pos;
  e.repetition = rep;
  e.samples = randn(sensors, t, seed, sid + std::to_string(pos) + "_" + std::to_string(rep));
  return e;
}

RegionAtlas small_atlas() {
  std::istringstream in("sensor_index,hemisphere,lobe\n0,L,temporal\n1,L,temporal\n2,R,temporal\n3,L,frontal\n"
                        "4,R,frontal\n5,R,parietal\n");
  return parse_atlas_csv(in);
}
} // namespace

TEST(Stimuli, MakeSentenceParsesTags) {
  const auto s = make_sentence("x", "The/DT dog/NN ate/VBD", Voice::active);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.tokens[0].text, "the");
  EXPECT_EQ(s.tokens[2].pos, "VBD");
  EXPECT_EQ(s.tokens[2].position, 2u);
  EXPECT_EQ(s.text(), "the dog ate");
  EXPECT_THROW(make_sentence("y", "   ", Voice::active), DataError);
}

TEST(Stimuli, JsonRoundTrip) {
  TempDir tmp("stimuli");
  const auto &pa = passact2();
  save_stimuli(tmp.path() / "s.json", pa);
  const auto back = load_stimuli(tmp.path() / "s.json");
  ASSERT_EQ(back.size(), pa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(back[i].text(), pa[i].text());
    EXPECT_EQ(back[i].voice, pa[i].voice);
    EXPECT_EQ(back[i].dataset_id, DatasetId::PassAct2);
  }
}

TEST(Stimuli, ShippedListsHaveExpectedShape) {
  const auto &pa = passact2();
  ASSERT_EQ(pa.size(), 32u);
  std::size_t passive = 0, words = 0;
  for (const auto &s : pa) {
    passive += s.voice == Voice::passive;
    words += s.size();
    EXPECT_EQ(s.size(), s.voice == Voice::passive ? 7u : 5u);
  }
  EXPECT_EQ(passive, 16u);
  EXPECT_EQ(words, 192u);
  EXPECT_EQ(generated160().size(), 160u);
  std::set<std::string> ids;
  for (const auto &s : generated160())
    ids.insert(s.sentence_id);
  EXPECT_EQ(ids.size(), 160u);
}

TEST(Stimuli, RejectsMalformedJson) {
  EXPECT_THROW(stimuli_from_json(json::parse(R"([{"sentence_id":"a","voice":"sideways","tokens":[{"text":"x"}]}])")),
               DataError);
  EXPECT_THROW(stimuli_from_json(json::parse(R"([{"sentence_id":"a","voice":"active","tokens":[]}])")), DataError);
}

TEST(EpochStore, RoundTripAndOrdering) {
  TempDir tmp("epochs");
  std::vector<Epoch> epochs;
  for (int rep = 3; rep >= 1; --rep)
    for (std::size_t pos = 0; pos < 2; ++pos)
      epochs.push_back(make_epoch("b", pos, rep, 4, 10, 1));
  epochs.push_back(make_epoch("a", 0, 1, 4, 10, 1));
  save_epochs(tmp.path(), epochs, 20.0);
  std::ostringstream warn;
  const auto back = load_epochs(tmp.path(), warn);
  ASSERT_EQ(back.size(), 7u);
  EXPECT_TRUE(warn.str().empty());
  EXPECT_EQ(back[0].sentence_id, "a");
  EXPECT_EQ(back[1].sentence_id, "b");
  EXPECT_EQ(back[1].position, 0u);
  EXPECT_EQ(back[1].repetition, 1);
  EXPECT_EQ(back[2].repetition, 2);
  for (const auto &e : back) {
    auto it = std::find_if(epochs.begin(), epochs.end(), [&](const Epoch &x) {
      return x.sentence_id == e.sentence_id && x.position == e.position && x.repetition == e.repetition;
    });
    ASSERT_NE(it, epochs.end());
    EXPECT_LT((it->samples - e.samples).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(EpochStore, CountsMatchManifest) {
  TempDir tmp("epochs_count");
  std::vector<Epoch> epochs;
  for (int s = 0; s < 32; ++s)
    for (std::size_t pos = 0; pos < 4; ++pos)
      for (int rep = 1; rep <= 10; ++rep)
        epochs.push_back(make_epoch("s" + std::to_string(s), pos, rep, 2, 5, 2));
  save_epochs(tmp.path(), epochs);
  EXPECT_EQ(load_epochs(tmp.path()).size(), 1280u);
}

TEST(EpochStore, EmptyDirectoryWarns) {
  TempDir tmp("epochs_empty");
  std::ostringstream warn;
  EXPECT_TRUE(load_epochs(tmp.path(), warn).empty());
  EXPECT_NE(warn.str().find("warning"), std::string::npos);
}

TEST(EpochStore, LoadIsIndependentOfManifestOrder) {
  TempDir tmp("epochs_order");
  std::vector<Epoch> epochs;
  for (int rep = 1; rep <= 3; ++rep)
    for (std::size_t pos = 0; pos < 3; ++pos)
      epochs.push_back(make_epoch("q", pos, rep, 3, 4, 5));
  save_epochs(tmp.path(), epochs);
  const auto a = load_epochs(tmp.path());
  json m = read_json_file(tmp.path() / "epochs.json");
  auto entries = m["entries"].get<std::vector<json>>();
  std::reverse(entries.begin(), entries.end());
  std::swap(entries[1], entries[4]);
  m["entries"] = entries;
  write_json_file(tmp.path() / "epochs.json", m);
  const auto b = load_epochs(tmp.path());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].key(), b[i].key());
    EXPECT_EQ(a[i].repetition, b[i].repetition);
    EXPECT_EQ(a[i].samples, b[i].samples);
  }
}

TEST(EpochStore, RejectsShortPayloadNamingEpoch) {
  TempDir tmp("epochs_bad");
  save_epochs(tmp.path(), {make_epoch("s7", 2, 1, 306, 10, 1)});
  // payload with 305 rows while 306 sensors are declared
  write_f32le(tmp.path() / "s7_p2_r1.f32", Matrix::Zero(305, 10));
  try {
    load_epochs(tmp.path());
    FAIL();
  } catch (const DataError &e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("s7"), std::string::npos) << msg;
  }
}

TEST(EpochStore, RejectsRowMismatchAndDuplicates) {
  TempDir tmp("epochs_rows");
  save_epochs(tmp.path(), {make_epoch("a", 0, 1, 3, 4, 1), make_epoch("a", 1, 1, 3, 4, 1)});
  json m = read_json_file(tmp.path() / "epochs.json");
  m["entries"][0]["rows"] = 2;
  write_json_file(tmp.path() / "epochs.json", m);
  EXPECT_THROW(load_epochs(tmp.path()), DataError);
  m["entries"][0]["rows"] = 3;
  m["entries"][1] = m["entries"][0];
  write_json_file(tmp.path() / "epochs.json", m);
  EXPECT_THROW(load_epochs(tmp.path()), DataError);
}

TEST(ResponseStore, RoundTrip) {
  TempDir tmp("responses");
  BrainResponse r;
  r.subject_id = "s";
  r.sentence_id = "x";
  r.position = 1;
  r.values = randn(6, 5, 1);
  save_responses(tmp.path(), {r}, 100.0, {{"k", 1}});
  const auto back = load_responses(tmp.path());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].key(), r.key());
  EXPECT_LT((back[0].values - r.values).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_EQ(back[0].flatten().size(), 30);
}

TEST(Response, FlattenIsSensorMajor) {
  BrainResponse r;
  r.values.resize(2, 3);
  r.values << 0, 1, 2, 3, 4, 5;
  const RowVector f = r.flatten();
  for (int i = 0; i < 6; ++i)
    EXPECT_EQ(f(i), i);
  EXPECT_EQ(unflatten(f, 2, 3), r.values);
  EXPECT_THROW(unflatten(f, 4, 2), DataError);
  EXPECT_EQ(RecordingShape{}.windows() * RecordingShape{}.sensors, 1530);
}

TEST(Atlas, ParsesAndValidates) {
  const auto a = small_atlas();
  EXPECT_EQ(a.sensors(), 6u);
  std::istringstream gap("0,L,temporal\n2,R,frontal\n");
  EXPECT_THROW(parse_atlas_csv(gap), DataError);
  std::istringstream dup("0,L,temporal\n0,R,frontal\n");
  EXPECT_THROW(parse_atlas_csv(dup), DataError);
  std::istringstream bad("0,X,temporal\n");
  EXPECT_THROW(parse_atlas_csv(bad), DataError);
}

TEST(Atlas, ShippedAtlasCoversAllSensors) {
  const auto a = load_atlas(data_dir() / "atlas_306.csv");
  EXPECT_EQ(a.sensors(), 306u);
  EXPECT_EQ(region_sensors(a, parse_region("L-all")).size(), 153u);
  EXPECT_EQ(region_sensors(a, parse_region("bilateral-frontal")).size(), 84u);
}

TEST(Regions, SliceSelectsRows) {
  const auto a = small_atlas();
  BrainResponse r;
  r.values = randn(6, 5, 3);
  const auto s = region_slice(r, a, parse_region("L-temporal"));
  ASSERT_EQ(s.values.rows(), 2);
  EXPECT_EQ(s.values.row(0), r.values.row(0));
  EXPECT_EQ(s.values.row(1), r.values.row(1));
  EXPECT_EQ(region_slice(r, a, parse_region("bilateral-frontal")).values.rows(), 2);
  EXPECT_THROW(region_slice(r, a, parse_region("R-occipital")), DataError);
  BrainResponse wrong;
  wrong.values = Matrix::Zero(5, 5);
  EXPECT_THROW(region_slice(wrong, a, parse_region("L-temporal")), DataError);
}

TEST(Regions, BilateralUnionCardinality) {
  std::string csv;
  for (int i = 0; i < 22; ++i)
    csv += std::to_string(i) + "," + (i < 10 ? "L" : "R") + ",frontal\n";
  std::istringstream in(csv);
  const auto a = parse_atlas_csv(in);
  BrainResponse r;
  r.values = Matrix::Ones(22, 5);
  EXPECT_EQ(region_slice(r, a, parse_region("bilateral-frontal")).values.rows(), 22);
}

TEST(Regions, EightCellsPartitionSensors) {
  const auto a = load_atlas(data_dir() / "atlas_306.csv");
  BrainResponse r;
  r.values = randn(306, 5, 4);
  std::vector<std::pair<Eigen::Index, RowVector>> rows;
  for (auto h : {"L", "R"})
    for (auto l : kLobes) {
      const auto sel = parse_region(std::string(h) + "-" + to_string(l));
      const auto idx = region_sensors(a, sel);
      const auto s = region_slice(r, a, sel);
      for (std::size_t i = 0; i < idx.size(); ++i)
        rows.emplace_back(idx[i], s.values.row(static_cast<Eigen::Index>(i)));
    }
  std::sort(rows.begin(), rows.end(), [](const auto &x, const auto &y) { return x.first < y.first; });
  ASSERT_EQ(rows.size(), 306u);
  Matrix rebuilt(306, 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].first, static_cast<Eigen::Index>(i));
    rebuilt.row(static_cast<Eigen::Index>(i)) = rows[i].second;
  }
  EXPECT_EQ(rebuilt, r.values);
}
