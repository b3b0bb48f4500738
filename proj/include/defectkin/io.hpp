#pragma once

#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "defectkin/defect.hpp"
#include "defectkin/diffusive.hpp"
#include "defectkin/turing.hpp"

namespace defectkin {

using Json = nlohmann::json;

// Parsing errors name the offending field as a JSON-pointer-like path
// (ConfigError::path()).

Json read_json_file(const std::filesystem::path& path);

Word word_from_json(const Json& j, const Alphabet& A, const std::string& path);
Json word_to_json(const Word& w, const Alphabet& A);

// {"alphabet", "edges": [[a, b], ...]} (Markov),
// {"alphabet", "radius": q, "admissible": [words]} (SFT),
// {"alphabet", "radius": q, "periodic": [words]} (cyclic q-windows),
// {"named": "diffuse-background"}.
struct ShiftSpec {
  std::optional<MarkovShift> markov;
  std::optional<SFT> sft;

  const Alphabet& alphabet() const;
  WindowLanguage language() const;
  // Markov shifts as is; SFTs of radius <= 2 via the 1-block recoding.
  MarkovShift as_markov() const;
};
ShiftSpec shift_from_json(const Json& j, const std::string& path = "");
Json shift_to_json(const MarkovShift& s);

// {"wolfram": n} | {"alphabet": [...], "radius": r, "table": {...}} |
// {"linear": {"n": m, "coeffs": [a, b, c]}} | {"named": "diffuse"}.
// Partial tables are rejected.
LocalRule rule_from_json(const Json& j, const std::string& path = "");
Json rule_to_json(const LocalRule& rule);

// {"left": w, "core": w, "right": w, "origin": z} with periodic sides.
Configuration seed_from_json(const Json& j, const Alphabet& A, const std::string& path = "");

// {"defects": [{"word": w, "p": x}, ...]}
std::vector<std::pair<Word, double>> delta_from_json(const Json& j, const Alphabet& A, const std::string& path = "");

// {"states": [...], "tape_alphabet": [...], "blank": s, "halt": q,
//  "transitions": [{"state", "read", "write", "move", "next"}, ...]}
struct TMSpec {
  ClassicalTM tm;
  Alphabet tape;
  Symbol blank = 0;
};
TMSpec tm_from_json(const Json& j, const std::string& path = "");

// ---------------------------------------------------------------- exports

void write_trajectory_csv(std::ostream& out, const DefectTrajectory& traj, const Alphabet& A);
Json trajectory_summary(const DefectTrajectory& traj);

// PBM (P4) for binary alphabets, PGM (P5) otherwise; row t is time t.
// Symbol 0 is white; the others are evenly spaced darker grays.
std::string render_spacetime(const std::vector<Word>& rows, std::size_t alphabet_size);
std::string render_mask(const std::vector<std::vector<bool>>& mask);

struct Spacetime {
  std::vector<Word> rows;
  std::vector<std::vector<bool>> mask;  // cells next to inadmissible transitions
};
// Cells [lo, hi) for steps 0..T.
Spacetime simulate_spacetime(const LocalRule& rule, const WindowLanguage& lang, Configuration config,
                             std::int64_t T, std::int64_t lo, std::int64_t hi);

// ---------------------------------------------------------------- files

std::string sha256_hex(const std::string& bytes);

// Files written under one output directory, with their hashes.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path dir);
  const std::filesystem::path& dir() const { return dir_; }
  // Writes the file (relative name) and records it.
  void write(const std::string& name, const std::string& bytes);
  void write_json(const std::string& name, const Json& j);
  Json to_json() const;
  // manifest.json itself is not listed.
  void finish() const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> hashes_;
};

}  // namespace defectkin
