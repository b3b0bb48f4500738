// defectkin command-line front end.
//
//   defectkin simulate | classify | walk | compile-tm | run-tm | verify
//   global: --config PATH --seed N --out DIR --json-errors
//
// Exit codes: 0 ok, 1 a check or bisimulation failed, 2 bad usage or
// config, 3 runtime error.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>

#include "defectkin/ballistic.hpp"
#include "defectkin/diffusive.hpp"
#include "defectkin/errors.hpp"
#include "defectkin/io.hpp"
#include "defectkin/turing.hpp"

namespace fs = std::filesystem;
using namespace defectkin;

namespace {

struct CheckFailed {
  std::string what;
};

// Config sections come from a flag (file path), else from the config
// object; string values there are paths relative to the config file.
struct Context {
  Json config = Json::object();
  fs::path base = ".";
  std::map<std::string, std::string> files;  // flag overrides
  std::optional<std::uint64_t> seed;
  fs::path out;

  bool has(const std::string& key) const { return files.count(key) || config.contains(key); }

  Json section(const std::string& key) const {
    if (auto it = files.find(key); it != files.end()) return read_json_file(it->second);
    if (!config.contains(key)) throw ConfigError("/" + key, "missing field");
    const Json& v = config[key];
    if (v.is_string()) return read_json_file(base / v.get<std::string>());
    return v;
  }

  template <class T>
  T value(const std::string& key, T fallback) const {
    if (!config.contains(key)) return fallback;
    try {
      return config[key].get<T>();
    } catch (const Json::exception&) {
      throw ConfigError("/" + key, "wrong type");
    }
  }

  std::uint64_t rng_seed() const { return seed ? *seed : value<std::uint64_t>("seed", 1); }
};

std::string image_name(const std::string& stem, std::size_t alphabet_size) {
  return stem + (alphabet_size <= 2 ? ".pbm" : ".pgm");
}

std::string rational_str(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Phi^p(w) == sigma^q(w) on the periodic point w.
bool rotates(const LocalRule& rule, const Word& w, int p, int q) {
  Word x = w;
  for (int i = 0; i < p; ++i) x = rule.apply_cyclic(x);
  const std::int64_t n = static_cast<std::int64_t>(w.size());
  for (std::int64_t i = 0; i < n; ++i)
    if (x[static_cast<std::size_t>(i)] != w[static_cast<std::size_t>(floor_mod(i + q, n))]) return false;
  return true;
}

// ---------------------------------------------------------------- simulate

int run_simulate(const Context& ctx) {
  const LocalRule rule = rule_from_json(ctx.section("rule"), "/rule");
  const Alphabet& A = rule.alphabet();
  const Configuration init = seed_from_json(ctx.section("defect"), A, "/defect");
  const std::int64_t T = ctx.value<std::int64_t>("steps", 120);
  const std::int64_t cells = ctx.value<std::int64_t>("cells", 300);
  if (T < 0) throw ConfigError("/steps", "must be nonnegative");
  if (cells <= 0) throw ConfigError("/cells", "must be positive");
  const std::int64_t lo = ctx.value<std::int64_t>("left_edge", -cells / 2);

  Manifest out(ctx.out);
  Json summary = {{"steps", T}, {"cells", cells}, {"left_edge", lo}};
  if (ctx.has("shift")) {
    const ShiftSpec shift = shift_from_json(ctx.section("shift"), "/shift");
    const WindowLanguage lang = shift.language();
    const Spacetime st = simulate_spacetime(rule, lang, init, T, lo, lo + cells);
    out.write(image_name("spacetime", A.size()), render_spacetime(st.rows, A.size()));
    out.write("mask.pbm", render_mask(st.mask));
    const DefectTrajectory traj = track(rule, lang, init, T, ctx.value<std::int64_t>("width_cap", kDefaultWidthCap));
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, A);
    out.write("trajectory.csv", csv.str());
    summary["trajectory"] = trajectory_summary(traj);
  } else {
    // No language: plain spacetime only.
    Configuration c = init;
    std::vector<Word> rows;
    for (std::int64_t t = 0; t <= T; ++t) {
      rows.push_back(c.window(lo, lo + cells));
      if (t < T) c = apply(rule, std::move(c));
    }
    out.write(image_name("spacetime", A.size()), render_spacetime(rows, A.size()));
  }
  out.write_json("summary.json", summary);
  out.finish();
  return 0;
}

// ---------------------------------------------------------------- classify

int run_classify(const Context& ctx, bool render) {
  const LocalRule rule = rule_from_json(ctx.section("rule"), "/rule");
  const ShiftSpec shift = shift_from_json(ctx.section("shift"), "/shift");
  const WindowLanguage lang = shift.language();
  const Alphabet& A = rule.alphabet();

  std::vector<Configuration> seeds;
  if (ctx.has("seeds")) {
    const Json s = ctx.section("seeds");
    if (!s.is_array()) throw ConfigError("/seeds", "expected an array");
    for (std::size_t i = 0; i < s.size(); ++i) seeds.push_back(seed_from_json(s[i], A, "/seeds/" + std::to_string(i)));
  } else {
    seeds = enumerate_seeds(rule, lang, ctx.value<int>("max_middle", 0));
  }
  ClassifyOptions opt;
  opt.steps = ctx.value<std::int64_t>("steps", opt.steps);
  opt.width_cap = ctx.value<std::int64_t>("width_cap", opt.width_cap);
  const Classification c = classify(rule, lang, seeds, opt);

  Json types = Json::array();
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> report_of;
  for (std::size_t k = 0; k < c.reports.size(); ++k) {
    const TypeReport& r = c.reports[k];
    report_of[{r.system, r.type}] = k;
    Json orbit = Json::array();
    for (const Presentation& p : r.members)
      orbit.push_back({{"left", word_to_json(p.left, A)},
                       {"defect", word_to_json(p.d, A)},
                       {"right", word_to_json(p.right, A)},
                       {"fused", word_to_json(p.fused, A)},
                       {"velocity", p.velocity}});
    types.push_back({{"left_component", word_to_json(r.left_component, A)},
                     {"right_component", word_to_json(r.right_component, A)},
                     {"period", r.period},
                     {"displacement", r.displacement},
                     {"velocity", static_cast<double>(r.displacement) / r.period},
                     {"conjugacy", verify_conjugacy(c.systems[r.system], c.types[r.system][r.type])},
                     {"orbit", orbit}});
  }
  Json trans = Json::array();
  for (std::size_t s = 0; s < c.transients.size(); ++s)
    for (const Transient& t : c.transients[s]) {
      const Presentation p = present(c.systems[s], t.state);
      trans.push_back({{"type", report_of.at({s, t.type})},
                       {"depth", t.depth},
                       {"defect", word_to_json(p.d, A)},
                       {"velocity", p.velocity}});
    }
  Json verdicts = Json::object();
  for (const auto& [k, n] : c.verdict_counts) verdicts[k] = n;

  Manifest out(ctx.out);
  out.write_json("report.json", {{"seeds", c.seeds},
                                 {"particle_seeds", c.particle_seeds},
                                 {"verdicts", verdicts},
                                 {"types", types},
                                 {"transients", trans}});
  if (render) {
    const std::int64_t T = ctx.value<std::int64_t>("render_steps", 120);
    const std::int64_t cells = ctx.value<std::int64_t>("render_cells", 120);
    for (std::size_t k = 0; k < c.reports.size(); ++k) {
      const TypeReport& r = c.reports[k];
      const KinematicSystem& sys = c.systems[r.system];
      const Configuration init = sys.realize(sys.state(c.types[r.system][r.type].orbit.front()), 0);
      const Spacetime st = simulate_spacetime(rule, lang, init, T, -cells / 2, cells - cells / 2);
      out.write(image_name("type_" + std::to_string(k), A.size()), render_spacetime(st.rows, A.size()));
      out.write("type_" + std::to_string(k) + "_mask.pbm", render_mask(st.mask));
    }
  }
  out.finish();
  return 0;
}

// ---------------------------------------------------------------- walk

int run_walk(const Context& ctx, bool trajectories) {
  const LocalRule rule = rule_from_json(ctx.section("rule"), "/rule");
  const MarkovShift L = shift_from_json(ctx.section("left_shift"), "/left_shift").as_markov();
  const MarkovShift R = shift_from_json(ctx.section("right_shift"), "/right_shift").as_markov();
  const int W = ctx.value<int>("width", 1);

  WalkOptions opt;
  opt.steps = ctx.value<std::int64_t>("steps", opt.steps);
  opt.samples = ctx.value<std::size_t>("samples", opt.samples);
  opt.seed = ctx.rng_seed();
  opt.threads = ctx.value<unsigned>("threads", 0);
  if (ctx.has("delta")) opt.delta = delta_from_json(ctx.section("delta"), rule.alphabet(), "/delta");
  if (opt.steps <= 0) throw ConfigError("/steps", "must be positive");
  if (opt.samples == 0) throw ConfigError("/samples", "must be positive");

  const ResolvingSystemReport report = verify_resolving_system(rule, L, R);
  Json resolving = {{"markov_union", report.markov_union.ok}, {"left", report.left.ok},
                    {"right", report.right.ok},               {"parry", report.parry.ok}};
  for (const auto& [name, cond] : {std::pair{"markov_union", &report.markov_union}, {"left", &report.left},
                                   {"right", &report.right}, {"parry", &report.parry}})
    if (!cond->ok) resolving[std::string(name) + "_witness"] = cond->witness;

  std::optional<WalkKernel> kernel;
  Json kjson;
  if (report.pass() && W <= 2) {
    kernel = build_walk_kernel(rule, L, R, W, opt.delta);
    Json classes = Json::array();
    for (const RecurrentClass& rc : stationary_and_drift(*kernel))
      classes.push_back({{"states", rc.states.size()}, {"drift", rc.drift}});
    kjson = {{"states", kernel->size()}, {"recurrent_classes", classes}};
  }
  const WalkResult res = sample_walks(rule, L, R, W, kernel ? &*kernel : nullptr, opt);
  const WalkStatistics& s = res.stats;
  Json stats = {{"samples", s.samples},
                {"excluded", s.excluded},
                {"steps", s.horizon},
                {"seed", opt.seed},
                {"drift", s.drift},
                {"variance_per_step", s.variance_per_step},
                {"resolving_system", resolving}};
  if (kernel) {
    const MarkovTestReport mt = markov_property_test(res, *kernel);
    kjson["markov_test"] = {{"max_tv", mt.max_tv},
                            {"weighted_tv", mt.weighted_tv},
                            {"rows", mt.rows.size()},
                            {"inconclusive", mt.inconclusive},
                            {"pass", mt.pass},
                            {"max_tv_order1", mt.max_tv_order1}};
    stats["kernel"] = kjson;
  }

  Manifest out(ctx.out);
  out.write_json("stats.json", stats);
  std::map<std::int64_t, std::size_t> hist;
  for (const WalkSample& w : res.samples)
    if (!w.excluded) ++hist[w.z.back() - w.z.front()];
  std::ostringstream h;
  h << "displacement,count\n";
  for (const auto& [d, n] : hist) h << d << ',' << n << '\n';
  out.write("histogram.csv", h.str());
  if (trajectories)
    for (std::size_t i = 0; i < res.samples.size(); ++i) {
      const WalkSample& w = res.samples[i];
      std::ostringstream csv;
      csv << "t,z\n";
      for (std::size_t t = 0; t < w.z.size(); ++t) csv << static_cast<std::int64_t>(t) * opt.stride << ',' << w.z[t] << '\n';
      std::ostringstream name;
      name << "samples/sample_" << std::setw(4) << std::setfill('0') << i << ".csv";
      out.write(name.str(), csv.str());
    }
  out.finish();
  return 0;
}

// ---------------------------------------------------------------- Turing

struct TuringSetup {
  TMSpec spec;
  MarkovShift L, R;
};

TuringSetup load_turing(const Context& ctx) {
  TMSpec spec = tm_from_json(ctx.section("tm"), "/tm");
  if (spec.tape.size() != 2) throw ConfigError("/tm/tape_alphabet", "only binary tapes are supported");
  const MarkovShift full = MarkovShift::full(Alphabet::numeric(2));
  MarkovShift L = ctx.has("left_shift") ? shift_from_json(ctx.section("left_shift"), "/left_shift").as_markov() : full;
  MarkovShift R = ctx.has("right_shift") ? shift_from_json(ctx.section("right_shift"), "/right_shift").as_markov() : full;
  return {std::move(spec), std::move(L), std::move(R)};
}

int run_compile_tm(const Context& ctx) {
  const TuringSetup setup = load_turing(ctx);
  const ClassicalEmbedding emb = classical_to_lr(setup.spec.tm, setup.L, setup.R);
  const CompiledCA ca = turing_to_ca(emb.machine);
  const LRTuringMachine& m = emb.machine;
  const Alphabet& A = m.alphabet;

  Json heads = Json::array();
  for (const auto& h : emb.heads)
    heads.push_back({{"dir", h.dir},
                     {"k", h.k},
                     {"state", setup.spec.tm.state_labels.at(h.d)},
                     {"symbol", setup.spec.tape.label(h.t)},
                     {"buffer", word_to_json(h.buffer, A)}});
  auto block_json = [&](const CycleEncoder& e) {
    return Json{{"0", word_to_json(e.block(0), A)}, {"1", word_to_json(e.block(1), A)}};
  };
  Manifest out(ctx.out);
  out.write_json("coder.json", {{"block_length", emb.P},
                                {"left_blocks", block_json(emb.left)},
                                {"right_blocks", block_json(emb.right)},
                                {"left_shift", shift_to_json(setup.L)},
                                {"right_shift", shift_to_json(setup.R)},
                                {"heads", heads}});

  // Machine tables over the whole local domain.
  const std::size_t n = A.size();
  Json tau_L = Json::array(), tau_C = Json::array(), tau_R = Json::array(), ups = Json::array(), vel = Json::array();
  for (HeadState d = 0; d < m.heads; ++d)
    for (Symbol a = 0; a < n; ++a)
      for (Symbol b = 0; b < n; ++b) {
        tau_L.push_back({a, b, d, m.tau_L(a, b, d)});
        tau_C.push_back({a, d, b, m.tau_C(a, d, b)});
        tau_R.push_back({d, a, b, m.tau_R(d, a, b)});
        vel.push_back({a, d, b, m.velocity(a, d, b)});
        for (Symbol c = 0; c < n; ++c)
          for (Symbol e = 0; e < n; ++e) ups.push_back({a, b, d, c, e, m.upsilon(a, b, d, c, e)});
      }
  out.write_json("machine.json", {{"alphabet", A.labels()},
                                  {"heads", m.heads},
                                  {"tau_L", tau_L},
                                  {"tau_C", tau_C},
                                  {"tau_R", tau_R},
                                  {"upsilon", ups},
                                  {"velocity", vel}});

  const std::size_t N = ca.alphabet().size();
  const std::size_t max_entries = ctx.value<std::size_t>("max_table", std::size_t{1} << 22);
  Json ca_json = {{"alphabet", ca.alphabet().labels()}, {"radius", ca.radius()}, {"letters", n}};
  std::size_t entries = 1;
  for (int i = 0; i < 5 && entries <= max_entries; ++i) entries *= N;
  if (entries <= max_entries) {
    ca_json["rule"] = rule_to_json(ca.to_local_rule(max_entries));
  } else {
    ca_json["rule"] = nullptr;
    ca_json["note"] = "full table has " + std::to_string(N) + "^5 entries; the local rule is defined by machine.json";
  }
  out.write_json("ca_rule.json", ca_json);
  out.finish();
  return 0;
}

ClassicalConfig tape_from_json(const Json& j, const TMSpec& spec) {
  ClassicalConfig c;
  c.blank = spec.blank;
  if (!j.is_object()) throw ConfigError("/tape", "expected an object");
  if (j.contains("cells")) c.cells = word_from_json(j["cells"], spec.tape, "/tape/cells");
  c.origin = j.value("origin", std::int64_t{0});
  c.head = j.value("head", std::int64_t{0});
  if (j.contains("state")) {
    const Json& s = j["state"];
    const auto& labels = spec.tm.state_labels;
    auto it = s.is_string() ? std::find(labels.begin(), labels.end(), s.get<std::string>()) : labels.end();
    if (it == labels.end()) throw ConfigError("/tape/state", "unknown state");
    c.state = static_cast<HeadState>(it - labels.begin());
  }
  return c;
}

// Decoded cells must match over the written region plus a margin.
std::pair<std::int64_t, std::int64_t> extent(const ClassicalConfig& c) {
  const std::int64_t lo = std::min(c.origin, c.head);
  const std::int64_t hi = std::max(c.origin + static_cast<std::int64_t>(c.cells.size()), c.head + 1);
  return {lo - 2, hi + 2};
}

int run_run_tm(const Context& ctx) {
  const TuringSetup setup = load_turing(ctx);
  const ClassicalTM& tm = setup.spec.tm;
  const ClassicalEmbedding emb = classical_to_lr(tm, setup.L, setup.R);
  const CompiledCA ca = turing_to_ca(emb.machine);
  const Json tj = ctx.has("tape") ? ctx.section("tape") : Json::object();
  ClassicalConfig direct = tape_from_json(tj, setup.spec);
  const std::int64_t steps = ctx.value<std::int64_t>("macro_steps", 200);
  if (steps < 0) throw ConfigError("/macro_steps", "must be nonnegative");

  MachineState lr = emb.encode(direct);
  Configuration cfg = ca.encode(lr);
  std::ostringstream trace;
  trace << "step,state,head,tape_lo,classical,lr,ca\n";
  std::optional<std::int64_t> mismatch;
  std::int64_t micro = 0;
  for (std::int64_t i = 1; i <= steps && !mismatch; ++i) {
    direct = step_classical(tm, direct);
    do {
      lr = step_lrtm(emb.machine, lr);
      cfg = ca.step(cfg);
      ++micro;
    } while (!emb.idle(lr.head));
    const MachineState from_ca = ca.decode(cfg);
    const auto [lo, hi] = extent(direct);
    const std::int64_t radius = std::max(direct.head - lo, hi - direct.head);
    const ClassicalConfig a = emb.decode(lr, radius);
    const ClassicalConfig b = emb.decode(from_ca, radius);
    const Word wd = direct.window(lo, hi), wa = a.window(lo, hi), wb = b.window(lo, hi);
    const Alphabet& T = setup.spec.tape;
    trace << i << ',' << tm.state_labels.at(direct.state) << ',' << direct.head << ',' << lo << ',' << T.format(wd) << ','
          << T.format(wa) << ',' << T.format(wb) << '\n';
    const bool ok = wd == wa && wd == wb && a.head == direct.head && b.head == direct.head &&
                    a.state == direct.state && b.state == direct.state && same_state(lr, from_ca);
    if (!ok) mismatch = i;
  }
  Manifest out(ctx.out);
  out.write("trace.csv", trace.str());
  Json report = {{"macro_steps", steps},
                 {"micro_steps", micro},
                 {"block_length", emb.P},
                 {"heads", emb.machine.heads},
                 {"ca_alphabet", ca.alphabet().size()},
                 {"match", !mismatch}};
  if (mismatch) report["first_mismatch"] = *mismatch;
  out.write_json("report.json", report);
  out.finish();
  if (mismatch) throw CheckFailed{"decoded tapes differ at macro-step " + std::to_string(*mismatch)};
  return 0;
}

// ---------------------------------------------------------------- verify

int run_verify(const Context& ctx) {
  Json results = Json::array();
  bool all = true;
  auto record = [&](Json r) {
    all = all && r["pass"].get<bool>();
    results.push_back(std::move(r));
  };
  std::optional<LocalRule> rule;
  if (ctx.has("rule")) rule = rule_from_json(ctx.section("rule"), "/rule");

  if (ctx.has("backgrounds")) {
    if (!rule) throw ConfigError("/rule", "backgrounds need a rule");
    const Json bg = ctx.section("backgrounds");
    if (!bg.is_array()) throw ConfigError("/backgrounds", "expected an array");
    for (std::size_t i = 0; i < bg.size(); ++i) {
      const std::string p = "/backgrounds/" + std::to_string(i);
      const Word w = word_from_json(bg[i].at("word"), rule->alphabet(), p + "/word");
      const int pw = bg[i].value("p", 1), q = bg[i].value("q", 0);
      record({{"check", "background"}, {"word", word_to_json(w, rule->alphabet())}, {"p", pw}, {"q", q},
              {"pass", rotates(*rule, w, pw, q)}});
    }
  }
  std::vector<std::pair<std::string, MarkovShift>> shifts;
  for (const char* key : {"shift", "left_shift", "right_shift"})
    if (ctx.has(key)) {
      const ShiftSpec s = shift_from_json(ctx.section(key), std::string("/") + key);
      if (rule) {
        SFT sft = s.sft ? *s.sft : [&] {
          std::set<Word> words;
          for (const Edge& e : s.markov->edges()) words.insert({e.first, e.second});
          return SFT(s.markov->alphabet(), 2, std::move(words));
        }();
        record({{"check", "invariance"}, {"shift", key}, {"pass", check_invariance(*rule, sft)}});
      }
      if (s.markov || s.sft->radius() <= 2) shifts.emplace_back(key, s.as_markov());
    }
  for (const auto& [key, s] : shifts) {
    const double h = entropy(s);
    Json r = {{"check", "parry"}, {"shift", key}, {"entropy", h}};
    try {
      const MarkovMeasure mu = parry_measure(s);
      r["stationarity_residual"] = mu.stationarity_residual();
      r["pass"] = mu.stationarity_residual() <= 1e-12;
    } catch (const Error& e) {
      r["error"] = e.what();
      r["pass"] = false;
    }
    record(r);
  }
  const MarkovShift* L = nullptr;
  const MarkovShift* R = nullptr;
  for (const auto& [key, s] : shifts) {
    if (key == "left_shift") L = &s;
    if (key == "right_shift") R = &s;
  }
  if (L && R) {
    const Regime g = regime_of(*L, *R);
    record({{"check", "regime"}, {"regime", to_string(g)}, {"pass", true}});
    if (rule) {
      const ResolvingSystemReport rep = verify_resolving_system(*rule, *L, *R);
      Json r = {{"check", "resolving_system"}, {"pass", rep.pass()}};
      for (const auto& [name, cond] : {std::pair{"markov_union", &rep.markov_union}, {"left", &rep.left},
                                       {"right", &rep.right}, {"parry", &rep.parry}})
        r[name] = cond->ok ? Json("ok") : Json(cond->witness);
      record(r);
      const int W = ctx.value<int>("width", 1);
      if (rep.pass() && W <= 2) {
        const WalkKernel k = build_walk_kernel(*rule, *L, *R, W);
        std::set<Rational> values;
        bool sums = true;
        for (std::size_t i = 0; i < k.size(); ++i) {
          Rational sum(0);
          for (const auto& [j, p] : k.row(i)) {
            values.insert(p);
            sum += p;
          }
          sums = sums && sum == Rational(1);
        }
        Json vals = Json::array();
        for (const Rational& v : values) vals.push_back(rational_str(v));
        record({{"check", "kernel"}, {"states", k.size()}, {"entries", vals}, {"pass", sums}});
      }
    }
  }
  if (results.empty()) throw ConfigError("/", "nothing to verify: give backgrounds, shifts or a rule with left and right shifts");
  Manifest out(ctx.out);
  out.write_json("verify.json", {{"pass", all}, {"checks", results}});
  out.finish();
  if (!all) throw CheckFailed{"one or more checks failed"};
  return 0;
}

void emit_error(bool json, const std::string& kind, const std::string& message, const std::string& path = "") {
  if (json) {
    Json e = {{"kind", kind}, {"message", message}};
    if (!path.empty()) e["path"] = path;
    std::cout << Json{{"error", e}}.dump() << std::endl;
  } else {
    std::cerr << "defectkin: " << kind << " error";
    if (!path.empty()) std::cerr << " at " << path;
    std::cerr << ": " << message << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool json_errors = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--json-errors") json_errors = true;

  CLI::App app{"Defect particles in one-dimensional cellular automata"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master RNG seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_flag("--json-errors", json_errors, "Report errors as JSON on stdout");

  std::map<std::string, std::string> files;
  std::map<std::string, std::string> numbers;
  auto file_opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option(flag, files[key + "@" + sub->get_name()], help)->check(CLI::ExistingFile);
  };
  auto num_opt = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
    sub->add_option(flag, numbers[key + "@" + sub->get_name()], help);
  };

  auto* sim = app.add_subcommand("simulate", "Simulate, render the spacetime diagram and track the defect");
  file_opt(sim, "--rule", "rule", "Rule file");
  file_opt(sim, "--shift", "shift", "Background shift file");
  file_opt(sim, "--defect", "defect", "Initial configuration file");
  num_opt(sim, "--steps", "steps", "Time steps");
  num_opt(sim, "--cells", "cells", "Rendered width");

  auto* cls = app.add_subcommand("classify", "Enumerate particle types of a ballistic system");
  file_opt(cls, "--rule", "rule", "Rule file");
  file_opt(cls, "--shift", "shift", "Background shift file");
  file_opt(cls, "--seeds", "seeds", "Seed configurations (JSON array)");
  num_opt(cls, "--max-middle", "max_middle", "Middle word length for enumerated seeds");
  bool render = false;
  cls->add_flag("--render", render, "Render one spacetime diagram per type");

  auto* walk = app.add_subcommand("walk", "Sample defect random walks");
  file_opt(walk, "--rule", "rule", "Rule file");
  file_opt(walk, "--left-shift", "left_shift", "Left background shift");
  file_opt(walk, "--right-shift", "right_shift", "Right background shift");
  file_opt(walk, "--delta", "delta", "Initial defect distribution");
  num_opt(walk, "--steps", "steps", "Steps per sample");
  num_opt(walk, "--samples", "samples", "Number of samples");
  num_opt(walk, "--width", "width", "Defect width");
  num_opt(walk, "--threads", "threads", "Worker threads (0: all cores)");
  bool trajectories = false;
  walk->add_flag("--trajectories", trajectories, "Write one CSV per sample");

  auto* ctm = app.add_subcommand("compile-tm", "Compile a binary Turing machine into a CA");
  file_opt(ctm, "--tm", "tm", "Turing machine file");
  file_opt(ctm, "--left-shift", "left_shift", "Left background shift");
  file_opt(ctm, "--right-shift", "right_shift", "Right background shift");

  auto* rtm = app.add_subcommand("run-tm", "Run a Turing machine directly and through its CA, and diff the tapes");
  file_opt(rtm, "--tm", "tm", "Turing machine file");
  file_opt(rtm, "--tape", "tape", "Initial tape file");
  file_opt(rtm, "--left-shift", "left_shift", "Left background shift");
  file_opt(rtm, "--right-shift", "right_shift", "Right background shift");
  num_opt(rtm, "--macro-steps", "macro_steps", "Machine steps");

  auto* ver = app.add_subcommand("verify", "Check background, measure and kernel facts");
  file_opt(ver, "--rule", "rule", "Rule file");
  file_opt(ver, "--shift", "shift", "Shift file");
  file_opt(ver, "--left-shift", "left_shift", "Left background shift");
  file_opt(ver, "--right-shift", "right_shift", "Right background shift");
  file_opt(ver, "--backgrounds", "backgrounds", "Periodic points to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(json_errors, "usage", e.what());
    return 2;
  }

  try {
    Context ctx;
    if (!config_path.empty()) {
      ctx.config = read_json_file(config_path);
      if (!ctx.config.is_object()) throw ConfigError("/", "config must be an object");
      ctx.base = fs::path(config_path).parent_path();
    }
    std::string mode;
    for (auto* sub : app.get_subcommands()) mode = sub->get_name();
    if (mode.empty()) {
      if (!ctx.config.contains("mode")) throw ConfigError("/mode", "no subcommand given and the config has no mode");
      mode = ctx.config["mode"].get<std::string>();
      if (!app.get_subcommand_no_throw(mode)) throw ConfigError("/mode", "unknown mode " + mode);
    } else if (ctx.config.contains("mode") && ctx.config["mode"] != mode) {
      throw ConfigError("/mode", "config is for mode " + ctx.config["mode"].dump() + ", not " + mode);
    }
    const std::string suffix = "@" + mode;
    for (const auto& [k, v] : files)
      if (!v.empty() && k.size() > suffix.size() && k.ends_with(suffix)) ctx.files[k.substr(0, k.size() - suffix.size())] = v;
    for (const auto& [k, v] : numbers)
      if (!v.empty() && k.ends_with(suffix)) {
        const std::string key = k.substr(0, k.size() - suffix.size());
        try {
          ctx.config[key] = std::stoll(v);
        } catch (const std::exception&) {
          throw ConfigError("--" + key, "expected an integer, got " + v);
        }
      }
    if (*seed_opt) ctx.seed = seed;
    ctx.out = !out_dir.empty() ? fs::path(out_dir) : fs::path(ctx.value<std::string>("out", "defectkin-out"));

    if (mode == "simulate") return run_simulate(ctx);
    if (mode == "classify") return run_classify(ctx, render || ctx.value<bool>("render", false));
    if (mode == "walk") return run_walk(ctx, trajectories || ctx.value<bool>("trajectories", false));
    if (mode == "compile-tm") return run_compile_tm(ctx);
    if (mode == "run-tm") return run_run_tm(ctx);
    return run_verify(ctx);
  } catch (const CheckFailed& e) {
    emit_error(json_errors, "check", e.what);
    return 1;
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    if (msg.starts_with(e.path() + ": ")) msg.erase(0, e.path().size() + 2);
    emit_error(json_errors, "config", msg, e.path());
    return 2;
  } catch (const Json::exception& e) {
    emit_error(json_errors, "config", e.what());
    return 2;
  } catch (const std::exception& e) {
    emit_error(json_errors, "runtime", e.what());
    return 3;
  }
}
