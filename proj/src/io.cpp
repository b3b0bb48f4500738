#include "defectkin/io.hpp"

#include <openssl/sha.h>

#include <fstream>
#include <iomanip>
#include <sstream>

#include "defectkin/errors.hpp"

namespace defectkin {

namespace fs = std::filesystem;

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
}

namespace {

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "/" + key, "missing field");
  return *it;
}

Alphabet alphabet_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty array of labels");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) throw ConfigError(path + "/" + std::to_string(i), "label must be a string");
    labels.push_back(j[i].get<std::string>());
  }
  try {
    return Alphabet(std::move(labels));
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

Json alphabet_to_json(const Alphabet& A) { return A.labels(); }

template <class F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

Word word_from_json(const Json& j, const Alphabet& A, const std::string& path) {
  if (j.is_string()) return wrap(path, [&] { return A.parse(j.get<std::string>()); });
  if (!j.is_array()) throw ConfigError(path, "word must be a string or an index array");
  Word w;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_unsigned() || j[i].get<std::size_t>() >= A.size())
      throw ConfigError(path + "/" + std::to_string(i), "symbol index out of range");
    w.push_back(j[i].get<Symbol>());
  }
  return w;
}

Json word_to_json(const Word& w, const Alphabet& A) {
  if (A.single_char()) return A.format(w);
  return Json(w);
}

// ---------------------------------------------------------------- shifts

const Alphabet& ShiftSpec::alphabet() const { return markov ? markov->alphabet() : sft->alphabet(); }

WindowLanguage ShiftSpec::language() const {
  return markov ? WindowLanguage::markov(*markov) : WindowLanguage::sft(*sft);
}

MarkovShift ShiftSpec::as_markov() const {
  if (markov) return *markov;
  if (sft->radius() <= 2) return sft_to_markov(*sft).shift;
  throw Error("shift has window length " + std::to_string(sft->radius()) + "; a Markov shift is required here");
}

ShiftSpec shift_from_json(const Json& j, const std::string& path) {
  if (j.is_object() && j.contains("named")) {
    const Json& n = j["named"];
    if (n != "diffuse-background") throw ConfigError(path + "/named", "unknown shift name");
    return ShiftSpec{diffuse_example_background(), std::nullopt};
  }
  const Alphabet A = alphabet_from_json(field(j, "alphabet", path), path + "/alphabet");
  ShiftSpec spec;
  if (j.contains("edges")) {
    const Json& e = j["edges"];
    if (!e.is_array()) throw ConfigError(path + "/edges", "expected an array");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const std::string p = path + "/edges/" + std::to_string(i);
      if (!e[i].is_array() || e[i].size() != 2) throw ConfigError(p, "edge must be a pair");
      Symbol ab[2];
      for (int k = 0; k < 2; ++k) {
        const Json& x = e[i][static_cast<std::size_t>(k)];
        if (x.is_number_unsigned() && x.get<std::size_t>() < A.size())
          ab[k] = x.get<Symbol>();
        else if (x.is_string())
          ab[k] = wrap(p, [&] { return A.index_of(x.get<std::string>()); });
        else
          throw ConfigError(p, "vertex out of range");
      }
      edges.emplace_back(ab[0], ab[1]);
    }
    spec.markov = wrap(path, [&] { return MarkovShift(A, edges); });
    return spec;
  }
  if (j.contains("periodic")) {
    const Json& pw = j["periodic"];
    if (!pw.is_array() || pw.empty()) throw ConfigError(path + "/periodic", "expected a nonempty array of words");
    std::vector<Word> words;
    for (std::size_t i = 0; i < pw.size(); ++i)
      words.push_back(word_from_json(pw[i], A, path + "/periodic/" + std::to_string(i)));
    const int q = field(j, "radius", path).get<int>();
    if (q < 1) throw ConfigError(path + "/radius", "radius must be positive");
    if (q == 1) throw ConfigError(path + "/radius", "periodic shifts need radius >= 2");
    const SFT sft = wrap(path, [&] { return SFT::from_periodic(A, words, q); });
    if (q == 2) {
      std::vector<Edge> edges;
      for (const Word& w : sft.admissible()) edges.emplace_back(w[0], w[1]);
      spec.markov = wrap(path, [&] { return MarkovShift(A, edges); });
    } else {
      spec.sft = sft;
    }
    return spec;
  }
  const int q = field(j, "radius", path).get<int>();
  const Json& words = field(j, "admissible", path);
  if (!words.is_array()) throw ConfigError(path + "/admissible", "expected an array");
  std::set<Word> adm;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string p = path + "/admissible/" + std::to_string(i);
    Word w = word_from_json(words[i], A, p);
    if (static_cast<int>(w.size()) != q) throw ConfigError(p, "word length differs from radius");
    adm.insert(std::move(w));
  }
  spec.sft = wrap(path, [&] { return SFT(A, q, std::move(adm)); });
  return spec;
}

Json shift_to_json(const MarkovShift& s) {
  Json edges = Json::array();
  for (const Edge& e : s.edges()) edges.push_back({e.first, e.second});
  return {{"alphabet", alphabet_to_json(s.alphabet())}, {"edges", edges}};
}

// ---------------------------------------------------------------- rules

LocalRule rule_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (j.contains("named")) {
    if (j["named"] != "diffuse") throw ConfigError(path + "/named", "unknown rule name");
    return diffuse_example_rule();
  }
  if (j.contains("wolfram")) {
    const Json& n = j["wolfram"];
    if (!n.is_number_integer() || n.get<int>() < 0 || n.get<int>() > 255)
      throw ConfigError(path + "/wolfram", "expected an integer in 0..255");
    return LocalRule::wolfram(n.get<int>());
  }
  if (j.contains("linear")) {
    const Json& l = j["linear"];
    const std::string p = path + "/linear";
    const int n = field(l, "n", p).get<int>();
    const Json& c = field(l, "coeffs", p);
    if (!c.is_array() || c.size() != 3) throw ConfigError(p + "/coeffs", "expected three coefficients");
    return wrap(p, [&] { return LocalRule::linear({n, c[0].get<int>(), c[1].get<int>(), c[2].get<int>()}); });
  }
  const Alphabet A = alphabet_from_json(field(j, "alphabet", path), path + "/alphabet");
  const int r = field(j, "radius", path).get<int>();
  if (r < 0) throw ConfigError(path + "/radius", "radius must be nonnegative");
  const Json& table = field(j, "table", path);
  if (!table.is_object()) throw ConfigError(path + "/table", "expected an object");
  const std::size_t width = static_cast<std::size_t>(2 * r + 1);
  std::size_t total = 1;
  for (std::size_t i = 0; i < width; ++i) total *= A.size();
  std::vector<Symbol> out(total);
  std::vector<bool> seen(total, false);
  for (auto it = table.begin(); it != table.end(); ++it) {
    const std::string p = path + "/table/" + it.key();
    const Word nb = wrap(p, [&] { return A.parse(it.key()); });
    if (nb.size() != width) throw ConfigError(p, "neighbourhood has the wrong length");
    std::size_t idx = 0;
    for (Symbol s : nb) idx = idx * A.size() + s;
    const Word img = word_from_json(it.value(), A, p);
    if (img.size() != 1) throw ConfigError(p, "image must be one symbol");
    out[idx] = img[0];
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < total; ++i)
    if (!seen[i]) {
      Word nb(width);
      std::size_t v = i;
      for (std::size_t k = width; k-- > 0;) {
        nb[k] = static_cast<Symbol>(v % A.size());
        v /= A.size();
      }
      throw ConfigError(path + "/table", "partial table: no entry for " + A.format(nb));
    }
  return LocalRule(A, r, std::move(out));
}

Json rule_to_json(const LocalRule& rule) {
  const Alphabet& A = rule.alphabet();
  const std::size_t width = static_cast<std::size_t>(rule.width());
  Json table = Json::object();
  for (std::size_t i = 0; i < rule.table().size(); ++i) {
    Word nb(width);
    std::size_t v = i;
    for (std::size_t k = width; k-- > 0;) {
      nb[k] = static_cast<Symbol>(v % A.size());
      v /= A.size();
    }
    table[A.format(nb)] = A.format({rule.table()[i]});
  }
  return {{"alphabet", alphabet_to_json(A)}, {"radius", rule.radius()}, {"table", table}};
}

Configuration seed_from_json(const Json& j, const Alphabet& A, const std::string& path) {
  const Word left = word_from_json(field(j, "left", path), A, path + "/left");
  const Word core = word_from_json(field(j, "core", path), A, path + "/core");
  const Word right = word_from_json(field(j, "right", path), A, path + "/right");
  if (left.empty()) throw ConfigError(path + "/left", "background word must be nonempty");
  if (right.empty()) throw ConfigError(path + "/right", "background word must be nonempty");
  const std::int64_t origin = j.value("origin", std::int64_t{0});
  return Configuration::periodic(left, core, right, origin);
}

std::vector<std::pair<Word, double>> delta_from_json(const Json& j, const Alphabet& A, const std::string& path) {
  const Json& d = field(j, "defects", path);
  if (!d.is_array() || d.empty()) throw ConfigError(path + "/defects", "expected a nonempty array");
  std::vector<std::pair<Word, double>> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string p = path + "/defects/" + std::to_string(i);
    Word w = word_from_json(field(d[i], "word", p), A, p + "/word");
    const double pr = field(d[i], "p", p).get<double>();
    if (!(pr >= 0.0)) throw ConfigError(p + "/p", "probability must be nonnegative");
    out.emplace_back(std::move(w), pr);
  }
  return out;
}

TMSpec tm_from_json(const Json& j, const std::string& path) {
  const Alphabet states = alphabet_from_json(field(j, "states", path), path + "/states");
  const Alphabet tape = alphabet_from_json(field(j, "tape_alphabet", path), path + "/tape_alphabet");
  auto symbol = [&](const Json& x, const std::string& p) {
    if (!x.is_string()) throw ConfigError(p, "expected a tape symbol");
    return wrap(p, [&] { return tape.index_of(x.get<std::string>()); });
  };
  auto state = [&](const Json& x, const std::string& p) {
    if (!x.is_string()) throw ConfigError(p, "expected a state label");
    return static_cast<HeadState>(wrap(p, [&] { return states.index_of(x.get<std::string>()); }));
  };
  TMSpec spec;
  spec.tape = tape;
  spec.blank = j.contains("blank") ? symbol(j["blank"], path + "/blank") : 0;
  ClassicalTM& tm = spec.tm;
  tm.tape_symbols = tape.size();
  tm.states = states.size();
  tm.state_labels = states.labels();
  const std::size_t n = tm.tape_symbols * tm.states;
  tm.write.assign(n, 0);
  tm.next.assign(n, 0);
  tm.move.assign(n, 0);
  std::vector<bool> seen(n, false);
  if (j.contains("halt")) {
    tm.halt = state(j["halt"], path + "/halt");
    for (Symbol t = 0; t < tm.tape_symbols; ++t) {
      const std::size_t i = t * tm.states + *tm.halt;
      tm.write[i] = t;
      tm.next[i] = *tm.halt;
      tm.move[i] = 0;
      seen[i] = true;
    }
  }
  const Json& tr = field(j, "transitions", path);
  if (!tr.is_array()) throw ConfigError(path + "/transitions", "expected an array");
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const std::string p = path + "/transitions/" + std::to_string(k);
    const HeadState d = state(field(tr[k], "state", p), p + "/state");
    const Symbol t = symbol(field(tr[k], "read", p), p + "/read");
    const std::size_t i = t * tm.states + d;
    if (tm.halt && d == *tm.halt) throw ConfigError(p, "the halt state has no transitions");
    if (seen[i]) throw ConfigError(p, "duplicate transition");
    seen[i] = true;
    tm.write[i] = symbol(field(tr[k], "write", p), p + "/write");
    tm.next[i] = state(field(tr[k], "next", p), p + "/next");
    const Json& mv = field(tr[k], "move", p);
    if (mv.is_string()) {
      const std::string m = mv.get<std::string>();
      if (m == "L")
        tm.move[i] = -1;
      else if (m == "R")
        tm.move[i] = 1;
      else if (m == "S")
        tm.move[i] = 0;
      else
        throw ConfigError(p + "/move", "expected L, R or S");
    } else if (mv.is_number_integer() && std::abs(mv.get<int>()) <= 1) {
      tm.move[i] = mv.get<int>();
    } else {
      throw ConfigError(p + "/move", "expected L, R, S or -1, 0, 1");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i])
      throw ConfigError(path + "/transitions", "no transition for state " + states.label(static_cast<Symbol>(i % tm.states)) +
                                                   " reading " + tape.label(static_cast<Symbol>(i / tm.states)));
  wrap(path, [&] {
    tm.validate();
    return 0;
  });
  return spec;
}

// ---------------------------------------------------------------- exports

void write_trajectory_csv(std::ostream& out, const DefectTrajectory& traj, const Alphabet& A) {
  out << "t,z,L,R,defect_word\n";
  for (const DefectRecord& r : traj.records) out << r.t << ',' << r.z << ',' << r.L << ',' << r.R << ',' << A.format(r.d) << '\n';
}

Json trajectory_summary(const DefectTrajectory& traj) {
  Json j;
  j["verdict"] = traj.verdict.str();
  j["steps"] = traj.records.empty() ? 0 : traj.records.back().t;
  std::int64_t wmax = 0;
  for (const auto& r : traj.records) wmax = std::max(wmax, r.width());
  j["max_width"] = wmax;
  if (traj.records.size() > 1) {
    const auto& a = traj.records.front();
    const auto& b = traj.records.back();
    j["displacement"] = b.z - a.z;
    j["average_velocity"] = static_cast<double>(b.z - a.z) / static_cast<double>(b.t - a.t);
  }
  const VelocityBoundsCheck c = check_velocity_bounds(traj);
  j["velocity_bound_violations"] = c.violations_a + c.violations_b;
  return j;
}

std::string render_spacetime(const std::vector<Word>& rows, std::size_t alphabet_size) {
  if (rows.empty()) throw Error("no rows to render");
  const std::size_t w = rows.front().size();
  for (const Word& r : rows)
    if (r.size() != w) throw Error("ragged spacetime rows");
  std::ostringstream os;
  if (alphabet_size <= 2) {
    os << "P4\n" << w << ' ' << rows.size() << '\n';
    for (const Word& r : rows) {
      std::string line((w + 7) / 8, '\0');
      for (std::size_t x = 0; x < w; ++x)
        if (r[x]) line[x / 8] = static_cast<char>(line[x / 8] | (0x80 >> (x % 8)));
      os << line;
    }
    return os.str();
  }
  os << "P5\n" << w << ' ' << rows.size() << "\n255\n";
  for (const Word& r : rows)
    for (Symbol s : r) {
      if (s >= alphabet_size) throw Error("symbol outside the alphabet");
      os << static_cast<char>(255 - (s * 255) / (alphabet_size - 1));
    }
  return os.str();
}

std::string render_mask(const std::vector<std::vector<bool>>& mask) {
  std::vector<Word> rows;
  for (const auto& m : mask) rows.emplace_back(m.begin(), m.end());
  return render_spacetime(rows, 2);
}

Spacetime simulate_spacetime(const LocalRule& rule, const WindowLanguage& lang, Configuration config,
                             std::int64_t T, std::int64_t lo, std::int64_t hi) {
  Spacetime st;
  const int q = lang.markov_mode() ? 2 : lang.q();
  const int o = lang.markov_mode() ? 0 : lang.offset();
  for (std::int64_t t = 0; t <= T; ++t) {
    if (config.sampled(Side::Left) || config.sampled(Side::Right)) config.materialize(lo - q, hi + q);
    st.rows.push_back(config.window(lo, hi));
    const Word w = config.window(lo - q, hi + q);
    std::vector<bool> m(static_cast<std::size_t>(hi - lo), false);
    for (std::int64_t z = lo - q; z + q <= hi + q; ++z) {
      const std::int64_t start = lang.markov_mode() ? z : z + o;
      if (start < lo - q || start + q > hi + q) continue;
      if (lang.window_ok(w.data() + (start - (lo - q)))) continue;
      for (std::int64_t x = start; x < start + q; ++x)
        if (x >= lo && x < hi) m[static_cast<std::size_t>(x - lo)] = true;
    }
    st.mask.push_back(std::move(m));
    if (t < T) config = apply(rule, std::move(config));
  }
  return st;
}

// ---------------------------------------------------------------- files

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  std::ostringstream os;
  for (unsigned char c : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
  return os.str();
}

Manifest::Manifest(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void Manifest::write(const std::string& name, const std::string& bytes) {
  const fs::path p = dir_ / name;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << bytes;
  hashes_[name] = sha256_hex(bytes);
}

void Manifest::write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

Json Manifest::to_json() const {
  Json files = Json::array();
  for (const auto& [name, h] : hashes_) files.push_back({{"path", name}, {"sha256", h}});
  return {{"files", files}};
}

void Manifest::finish() const {
  std::ofstream out(dir_ / "manifest.json", std::ios::binary);
  out << to_json().dump(2) << "\n";
}

}  // namespace defectkin
