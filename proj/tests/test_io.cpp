#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "defectkin/errors.hpp"
#include "defectkin/io.hpp"

using namespace defectkin;

namespace {

std::string config_error_path(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(RuleJson, WolframAndRange) {
  EXPECT_EQ(rule_from_json(Json{{"wolfram", 110}}).table(), LocalRule::wolfram(110).table());
  EXPECT_EQ(config_error_path([] { rule_from_json(Json{{"wolfram", 300}}, "/rule"); }), "/rule/wolfram");
}

TEST(RuleJson, TableRoundTrip) {
  const LocalRule r = LocalRule::wolfram(54);
  const LocalRule back = rule_from_json(rule_to_json(r));
  EXPECT_EQ(back.table(), r.table());
  EXPECT_EQ(back.radius(), 1);
}

TEST(RuleJson, PartialTableRejected) {
  Json j = rule_to_json(LocalRule::wolfram(184));
  j["table"].erase("000");
  EXPECT_EQ(config_error_path([&] { rule_from_json(j, "/rule"); }), "/rule/table");
}

TEST(ShiftJson, EdgesAndPeriodicForms) {
  const ShiftSpec m = shift_from_json(Json::parse(R"({"alphabet":["0","1"],"edges":[[0,0],[0,1],[1,0]]})"));
  ASSERT_TRUE(m.markov.has_value());
  EXPECT_EQ(m.markov->edges().size(), 3u);

  const ShiftSpec p2 = shift_from_json(Json::parse(R"({"alphabet":["0","1"],"radius":2,"periodic":["01"]})"));
  ASSERT_TRUE(p2.markov.has_value());
  EXPECT_EQ(p2.markov->edges().size(), 2u);

  const ShiftSpec p3 = shift_from_json(Json::parse(R"({"alphabet":["0","1"],"radius":3,"periodic":["0","1","01"]})"));
  ASSERT_TRUE(p3.sft.has_value());
  EXPECT_EQ(p3.sft->radius(), 3);

  EXPECT_EQ(config_error_path([] {
              shift_from_json(Json::parse(R"({"alphabet":["0","1"],"radius":1,"periodic":["0"]})"), "/shift");
            }),
            "/shift/radius");
}

TEST(ShiftJson, RoundTrip) {
  const MarkovShift g(Alphabet::numeric(2), {{0, 0}, {0, 1}, {1, 0}});
  const ShiftSpec s = shift_from_json(shift_to_json(g));
  ASSERT_TRUE(s.markov.has_value());
  EXPECT_EQ(s.markov->edges(), g.edges());
}

TEST(SeedJson, PeriodicSides) {
  const Alphabet A = Alphabet::numeric(2);
  const Configuration c = seed_from_json(Json::parse(R"({"left":"01","core":"11","right":"0","origin":-1})"), A);
  EXPECT_EQ(c.window(-1, 3), A.parse("1100"));
}

TEST(TmJson, ParsesIncrement) {
  const Json j = Json::parse(R"({
    "states": ["start", "carry", "halt"], "tape_alphabet": ["0", "1"], "blank": "0", "halt": "halt",
    "transitions": [
      {"state": "start", "read": "0", "write": "0", "move": "S", "next": "carry"},
      {"state": "start", "read": "1", "write": "1", "move": 0, "next": "carry"},
      {"state": "carry", "read": "1", "write": "0", "move": "L", "next": "carry"},
      {"state": "carry", "read": "0", "write": "1", "move": "S", "next": "halt"}]})");
  const TMSpec spec = tm_from_json(j);
  EXPECT_EQ(spec.tm.states, 3u);
  EXPECT_EQ(spec.tm.velocity(1, 1), -1);
  ASSERT_TRUE(spec.tm.halt.has_value());
  EXPECT_EQ(spec.tm.upsilon(0, *spec.tm.halt), *spec.tm.halt);

  Json dup = j;
  dup["transitions"].push_back(dup["transitions"][0]);
  EXPECT_THROW(tm_from_json(dup), ConfigError);

  Json missing = j;
  missing["transitions"].erase(3);
  EXPECT_THROW(tm_from_json(missing), ConfigError);

  Json bad_move = j;
  bad_move["transitions"][0]["move"] = "X";
  EXPECT_THROW(tm_from_json(bad_move), ConfigError);
}

TEST(Render, PbmBitsArePacked) {
  const std::vector<Word> rows{{1, 0, 0, 0, 0, 0, 0, 0, 1}, {0, 0, 0, 0, 0, 0, 0, 0, 0}};
  const std::string img = render_spacetime(rows, 2);
  const std::string header = "P4\n9 2\n";
  ASSERT_EQ(img.size(), header.size() + 4);
  EXPECT_EQ(img.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(img[header.size()]), 0x80);
  EXPECT_EQ(static_cast<unsigned char>(img[header.size() + 1]), 0x80);
  EXPECT_EQ(img[header.size() + 2], '\0');
}

TEST(Render, PgmGrays) {
  const std::string img = render_spacetime({{0, 1, 2}}, 3);
  const std::string header = "P5\n3 1\n255\n";
  ASSERT_EQ(img.size(), header.size() + 3);
  EXPECT_EQ(static_cast<unsigned char>(img[header.size()]), 255);
  EXPECT_EQ(static_cast<unsigned char>(img[header.size() + 1]), 128);
  EXPECT_EQ(static_cast<unsigned char>(img[header.size() + 2]), 0);
  EXPECT_THROW(render_spacetime({{0, 1}, {0}}, 2), Error);
}

TEST(Trajectory, CsvHeaderAndRows) {
  const Alphabet A = Alphabet::numeric(2);
  const WindowLanguage lang =
      WindowLanguage::sft(SFT::from_periodic(A, {A.parse("0"), A.parse("1"), A.parse("01")}, 3));
  const DefectTrajectory tr =
      track(LocalRule::wolfram(184), lang, Configuration::periodic(A.parse("0"), {}, A.parse("1"), 0), 3);
  std::ostringstream os;
  write_trajectory_csv(os, tr, A);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,z,L,R,defect_word");
  int n = 0;
  while (std::getline(is, line)) ++n;
  EXPECT_EQ(n, 4);
}

TEST(Spacetime, MaskMarksTheDefect) {
  const Alphabet A = Alphabet::numeric(2);
  const WindowLanguage lang = WindowLanguage::markov(MarkovShift::from_cycles(A, {A.parse("01")}));
  const Spacetime st = simulate_spacetime(LocalRule::wolfram(184), lang,
                                          Configuration::periodic(A.parse("01"), A.parse("00"), A.parse("10"), 0), 4,
                                          -10, 10);
  ASSERT_EQ(st.rows.size(), 5u);
  for (std::size_t t = 0; t < st.mask.size(); ++t) {
    std::size_t marked = 0;
    for (bool b : st.mask[t]) marked += b;
    EXPECT_GT(marked, 0u) << "t " << t;
    EXPECT_LE(marked, 4u);
  }
}

TEST(Hash, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, RecordsWrittenFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "defectkin_manifest_test";
  std::filesystem::remove_all(dir);
  {
    Manifest m(dir);
    m.write("a.txt", "abc");
    m.write_json("b.json", Json{{"k", 1}});
    m.finish();
    const Json j = m.to_json();
    EXPECT_EQ(j.dump().find("manifest.json"), std::string::npos);
    EXPECT_NE(j.dump().find(sha256_hex("abc")), std::string::npos);
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
  std::ifstream in(dir / "a.txt");
  std::string s;
  in >> s;
  EXPECT_EQ(s, "abc");
  std::filesystem::remove_all(dir);
}
