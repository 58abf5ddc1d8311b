#include <gtest/gtest.h>

#include <fstream>

#include "convser/audio_io.hpp"
#include "convser/errors.hpp"
#include "convser/manifest.hpp"
#include "test_support.hpp"

using namespace convser;
using testing_support::TempDir;

namespace {

SampleRecord record(int i, int label) {
  SampleRecord r;
  r.id = "r" + std::to_string(i);
  r.path = r.id + ".wav";
  r.speaker_id = "spk" + std::to_string(i);
  r.topic_id = i % 4 + 1;
  r.position = i < 20 ? Position::Pro : Position::Contra;
  r.label = label;
  r.group_id = r.id;
  return r;
}

void touch_wav(const std::filesystem::path& p) {
  AudioBuffer b;
  b.samples.assign(16, 0.0);
  write_wav(b, p);
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream f(p);
  for (const auto& l : lines) f << l << "\n";
}

std::vector<std::string> problems_of(const std::filesystem::path& p) {
  try {
    load_manifest(p);
  } catch (const ValidationError& e) {
    return e.problems();
  }
  return {};
}

}  // namespace

TEST(Manifest, ThirtyEightRecordsKeepLabelCounts) {
  TempDir dir("man");
  DatasetManifest m;
  m.root = dir.path();
  for (int i = 0; i < 38; ++i) {
    m.records.push_back(record(i, i < 18 ? 1 : 0));
    touch_wav(dir / m.records.back().path);
  }
  write_manifest(m, dir / "manifest.jsonl");
  const DatasetManifest back = load_manifest(dir / "manifest.jsonl");
  EXPECT_EQ(back.size(), 38u);
  EXPECT_EQ(back.count_label(1), 18u);
  EXPECT_EQ(back.count_label(0), 20u);
  EXPECT_EQ(back.records, m.records);
  EXPECT_EQ(back.root, dir.path());
}

TEST(Manifest, EmptyFileIsValidationError) {
  TempDir dir("man");
  write_lines(dir / "m.jsonl", {});
  EXPECT_THROW(load_manifest(dir / "m.jsonl"), ValidationError);
}

TEST(Manifest, DuplicateIdNamesTheLine) {
  TempDir dir("man");
  touch_wav(dir / "a.wav");
  const std::string line =
      R"({"id":"a","path":"a.wav","speaker_id":"s","topic_id":1,"position":"pro","label":1,"group_id":"a"})";
  write_lines(dir / "m.jsonl", {line, line});
  const auto problems = problems_of(dir / "m.jsonl");
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("line 2"), std::string::npos);
  EXPECT_NE(problems[0].find("duplicate"), std::string::npos);
}

TEST(Manifest, AllProblemsAreCollected) {
  TempDir dir("man");
  touch_wav(dir / "a.wav");
  write_lines(dir / "m.jsonl",
              {R"({"id":"a","path":"a.wav","speaker_id":"s","topic_id":1,"position":"pro","label":2,"group_id":"a"})",
               R"({"id":"b","path":"missing.wav","speaker_id":"s","topic_id":1,"position":"pro","label":0,"group_id":"b"})",
               R"({"id":"c","path":"a.wav","speaker_id":"s","topic_id":9,"position":"pro","label":0,"group_id":"c"})",
               "{not json"});
  const auto problems = problems_of(dir / "m.jsonl");
  ASSERT_EQ(problems.size(), 4u);
  EXPECT_NE(problems[0].find("line 1"), std::string::npos);
  EXPECT_NE(problems[0].find("label"), std::string::npos);
  EXPECT_NE(problems[1].find("line 2"), std::string::npos);
  EXPECT_NE(problems[1].find("'b'"), std::string::npos);
  EXPECT_NE(problems[2].find("topic_id"), std::string::npos);
  EXPECT_NE(problems[3].find("line 4"), std::string::npos);
}

TEST(Manifest, NonWavFileIsRejected) {
  TempDir dir("man");
  std::ofstream(dir / "x.wav") << "hello";
  write_lines(dir / "m.jsonl",
              {R"({"id":"x","path":"x.wav","speaker_id":"s","topic_id":1,"position":"contra","label":0,"group_id":"x"})"});
  EXPECT_THROW(load_manifest(dir / "m.jsonl"), ValidationError);
}

TEST(Manifest, MissingFileIsIoError) { EXPECT_THROW(load_manifest("/nonexistent/m.jsonl"), IoError); }

TEST(Manifest, EnumsRoundTrip) {
  for (auto p : {Position::Pro, Position::Contra}) EXPECT_EQ(parse_position(to_string(p)), p);
  for (auto k : {AugmentationKind::Original, AugmentationKind::TimeStretch, AugmentationKind::PitchShift,
                 AugmentationKind::Noise, AugmentationKind::Combined})
    EXPECT_EQ(parse_augmentation(to_string(k)), k);
  EXPECT_THROW(parse_position("neutral"), ParameterError);
}
