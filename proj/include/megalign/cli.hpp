#ifndef MEGALIGN_CLI_HPP
#define MEGALIGN_CLI_HPP

// Command-line driver. Every stage reads a RunConfig and writes its artifacts under `out`.
// Exit codes: 0 success, 1 usage or config, 2 data validation, 3 numeric failure.

#include "megalign/augment.hpp"
#include "megalign/corpus.hpp"
#include "megalign/plots.hpp"
#include "megalign/provenance.hpp"
#include "megalign/sensitivity.hpp"
#include "megalign/sim.hpp"

#include <CLI11.hpp>

namespace megalign {

namespace cli {

struct Globals {
  std::string config;
  std::vector<std::string> overrides;
  unsigned threads = 0;
  bool emit_plots = false;
};

inline RunConfig load(const Globals &g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_config(g.config);
  for (const auto &kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
  }
  if (g.threads > 0)
    c.threads = g.threads;
  return c;
}

inline fs::path out_dir(const RunConfig &c) {
  const auto p = c.resolve(c.out);
  fs::create_directories(p);
  return p;
}

inline void write_csv(const fs::path &p, const Provenance &prov, const std::string &body) {
  write_text_file(p, prov.stamp() + body);
}

inline void write_svg(const fs::path &p, const std::string &svg) { write_text_file(p, svg); }

inline std::string svg_stamp(const Provenance &prov) { return prov.stamp("<!-- ", " -->"); }

inline FitOptions fit_options(const RunConfig &c) {
  FitOptions f;
  f.grid = LambdaGrid(c.lambdas);
  f.mode = c.lambda_mode == "per_target" ? LambdaMode::per_target : LambdaMode::shared;
  f.threads = c.threads;
  return f;
}

inline EvalOptions eval_options(const RunConfig &c) {
  EvalOptions e;
  e.fit = fit_options(c);
  e.exclude_same_word = c.exclude_same_word;
  e.pair_cap = c.pair_cap;
  e.pair_seed = c.pair_seed;
  e.train_on_subset = c.train_on_subset;
  return e;
}

inline OovPolicy oov_policy(const RunConfig &c) { return c.glove_oov == "zero" ? OovPolicy::zero : OovPolicy::reject; }

/// Features for `stimuli` according to `feature_model`; `manifest_field` names the manifest
/// path field used in manifest mode.
inline FeatureMatrix resolve_features(const RunConfig &c, const std::vector<SentenceStimulus> &stimuli,
                                      Provenance &prov, const std::string &manifest_field = "features") {
  if (c.feature_model == "manifest") {
    const auto p = require_path(c, manifest_field);
    prov.input(manifest_field, p.parent_path().empty() ? p : p.parent_path());
    auto all = load_activations(p, stimuli);
    if (all.size() == 1 && (c.layer.empty() || all.front().layer_id == c.layer))
      return all.front();
    if (c.layer.empty())
      throw ConfigError("config field 'layer' is required: " + p.string() + " holds " + std::to_string(all.size()) +
                        " matrices");
    for (auto &fm : all)
      if (fm.layer_id == c.layer)
        return fm;
    throw ConfigError("config field 'layer': no matrix with layer id '" + c.layer + "' in " + p.string());
  }
  if (c.feature_model == "random" || c.feature_model == "random_occurrence") {
    prov.seed("random_seed", c.random_seed);
    return random_embedding(stimuli, c.random_seed,
                            c.feature_model == "random" ? RandomMode::per_word_type : RandomMode::per_occurrence);
  }
  const auto gp = require_path(c, "glove");
  prov.input("glove", gp);
  const auto lex = load_glove(gp);
  return c.feature_model == "glove" ? glove_word_features(stimuli, lex, oov_policy(c))
                                    : glove_additive_features(stimuli, lex, oov_policy(c));
}

inline std::vector<SentenceStimulus> stimuli_input(const RunConfig &c, Provenance &prov,
                                                   const std::string &field = "stimuli") {
  const auto p = require_path(c, field);
  prov.input(field, p);
  return load_stimuli(p);
}

inline std::vector<BrainResponse> responses_input(const RunConfig &c, Provenance &prov,
                                                  const std::string &field = "responses") {
  const auto p = require_path(c, field);
  prov.input(field, p);
  return load_responses(p);
}

inline FoldSpec folds_of(const RunConfig &c, const std::vector<SentenceStimulus> &stimuli, Provenance &prov) {
  prov.seed("fold_seed", c.fold_seed);
  return make_folds(stimuli, c.folds, c.fold_seed);
}

inline json folds_json(const FoldSpec &f) {
  return {{"k", f.k}, {"seed", f.seed}, {"sizes", f.sizes()}, {"assignment", f.assignment}};
}

// ---------------------------------------------------------------------------
// Stages

inline void cmd_prep(const RunConfig &c, std::ostream &out) {
  Provenance prov(c, "prep");
  const auto dir = require_path(c, "epochs");
  prov.input("epochs", dir);
  std::ostringstream warn;
  const auto epochs = load_epochs(dir, warn);
  if (epochs.empty())
    throw DataError("no epochs in " + dir.string() + (warn.str().empty() ? "" : ": " + warn.str()));
  const auto rs = prepare_responses(epochs, c.window_ms, parse_repetition_policy(c.repetition), c.threads);
  const auto od = out_dir(c) / "responses";
  save_responses(od, rs, c.window_ms, prov.to_json(), {{"repetition_policy", c.repetition}});
  out << "prep: " << rs.size() << " responses -> " << od.string() << "\n";
}

inline void cmd_fit(const RunConfig &c, std::ostream &out) {
  Provenance prov(c, "fit");
  const auto stimuli = stimuli_input(c, prov);
  const auto fm = resolve_features(c, stimuli, prov);
  const auto rs = responses_input(c, prov);
  const auto d = align(fm, rs);
  EncoderOptions eo;
  const auto fo = fit_options(c);
  eo.grid = fo.grid;
  eo.mode = fo.mode;
  const auto fit = fit_encoder(d.X, d.Y, eo);
  const auto od = out_dir(c) / "model";
  save_model(od, fit.model,
             {{"model_id", fm.model_id},
              {"layer_id", fm.layer_id},
              {"sensors", d.sensors},
              {"windows", d.windows},
              {"gcv", to_json(fit.gcv)},
              {"provenance", prov.to_json()}});
  out << "fit: " << fm.name() << " lambda=" << fit.model.lambda << " -> " << od.string() << "\n";
}

inline void cmd_eval(const RunConfig &c, std::size_t permute, bool plots, std::ostream &out) {
  Provenance prov(c, "eval");
  const auto stimuli = stimuli_input(c, prov);
  const auto fm = resolve_features(c, stimuli, prov);
  const auto rs = responses_input(c, prov);
  const auto folds = folds_of(c, stimuli, prov);
  std::vector<SubsetFilter> subsets;
  for (const auto &s : c.subsets)
    subsets.push_back(parse_subset(s));
  if (subsets.empty())
    throw ConfigError("config field 'subsets' is empty");
  std::optional<RegionAtlas> atlas;
  for (const auto &r : c.regions)
    if (r != "all" && !atlas) {
      const auto ap = require_path(c, "atlas");
      prov.input("atlas", ap);
      atlas = load_atlas(ap);
    }
  const auto opts = eval_options(c);
  std::vector<EvalResult> results;
  for (const auto &r : c.regions) {
    const auto sel = parse_region(r);
    auto part = cross_validated_eval(fm, rs, stimuli, folds, subsets, sel, atlas ? &*atlas : nullptr, opts);
    results.insert(results.end(), part.begin(), part.end());
  }
  const std::size_t n_perm = permute ? permute : c.n_perm;
  json perms = json::array();
  std::optional<double> chance;
  if (n_perm > 0) {
    prov.seed("perm_seed", c.perm_seed);
    for (const auto &sub : subsets) {
      const auto p = permutation_test(fm, rs, stimuli, folds, n_perm, c.perm_seed, sub, opts);
      if (!chance)
        chance = p.mean;
      auto j = to_json(p);
      j["subset"] = sub.name;
      perms.push_back(j);
    }
  }
  json res = json::array();
  for (const auto &r : results)
    res.push_back(to_json(r));
  const auto od = out_dir(c);
  write_json_file(od / "eval.json",
                  {{"provenance", prov.to_json()}, {"folds", folds_json(folds)}, {"results", res}, {"permutations", perms}});
  write_csv(od / "eval.csv", prov, eval_csv(results));
  if (plots) {
    std::vector<Bar> bars;
    for (const auto &r : results)
      bars.push_back({r.region + "/" + r.subset, r.accuracy(), 0.0});
    write_svg(od / "eval.svg", bar_chart_svg(bars, "2v2 accuracy " + fm.name(), chance.value_or(0.5), svg_stamp(prov)));
  }
  for (const auto &r : results)
    out << "eval: " << r.region << "/" << r.subset << " accuracy=" << format_fixed(r.accuracy()) << " (" << r.correct
        << "/" << r.total << ")\n";
}

inline void cmd_sensitivity(const RunConfig &c, const std::string &type, bool plots, std::ostream &out) {
  Provenance prov(c, "sensitivity");
  const auto stimuli = stimuli_input(c, prov);
  const auto fm = resolve_features(c, stimuli, prov);
  const auto rs = responses_input(c, prov);
  const auto folds = folds_of(c, stimuli, prov);
  const auto spec = SensitivitySpec::for_class(parse_varied_class(type.empty() ? c.sensitivity : type));
  const auto pairs = enumerate_pairs(stimuli, spec);
  const auto res = run_sensitivity(fm, rs, pairs, folds, spec, fit_options(c));
  json pj = json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto j = to_json(pairs[i]);
    j["scored"] = static_cast<bool>(res.pair_scored[i]);
    if (res.pair_scored[i])
      j["correct"] = static_cast<bool>(res.pair_correct[i]);
    pj.push_back(j);
  }
  const auto od = out_dir(c);
  const std::string tag = to_string(spec.varied);
  write_json_file(od / ("sensitivity_" + tag + ".json"), {{"provenance", prov.to_json()},
                                                           {"varied", tag},
                                                           {"repetition", spec.repetition},
                                                           {"folds", folds_json(folds)},
                                                           {"result", to_json(res.eval)},
                                                           {"map_examples", res.pooled.examples},
                                                           {"pairs", pj}});
  write_csv(od / ("agreement_" + tag + ".csv"), prov, agreement_csv(res.pooled));
  if (plots)
    write_svg(od / ("agreement_" + tag + ".svg"),
              heatmap_svg(res.pooled.values, "sign agreement, " + tag + " test", 1.0, svg_stamp(prov)));
  out << "sensitivity " << tag << ": " << pairs.size() << " pairs, accuracy=" << format_fixed(res.eval.accuracy())
      << " (" << res.eval.correct << "/" << res.eval.total << ")\n";
}

inline void cmd_synth(const RunConfig &c, std::ostream &out) {
  Provenance prov(c, "synth");
  const auto mdir = require_path(c, "model");
  prov.input("model", mdir);
  json manifest;
  const auto enc = load_model(mdir, &manifest);
  const auto generated = stimuli_input(c, prov, "generated");
  const auto fm_all = resolve_features(c, generated, prov, "generated_features");
  const auto fm = restrict_rows(fm_all, first_candidates(generated, parse_subset(c.selector)));
  const auto sensors = manifest.value("sensors", Eigen::Index{0});
  const auto windows = manifest.value("windows", Eigen::Index{0});
  if (sensors <= 0 || windows <= 0)
    throw DataError("model.json lacks sensors/windows");
  FeatureMatrix tagged = fm;
  tagged.model_id = manifest.value("model_id", fm.model_id);
  tagged.layer_id = manifest.value("layer_id", fm.layer_id);
  const auto samples = synthesize(enc, tagged, sensors, windows);
  const auto od = out_dir(c) / "synthetic";
  save_responses(od, responses_of(samples), 0.0, prov.to_json(),
                 {{"synthetic", true},
                  {"encoder_model", tagged.model_id},
                  {"encoder_layer", tagged.layer_id},
                  {"selector", c.selector}});
  out << "synth: " << samples.size() << " samples -> " << od.string() << "\n";
}

inline void cmd_augment(const RunConfig &c, bool plots, std::ostream &out) {
  Provenance prov(c, "augment");
  const auto stimuli = stimuli_input(c, prov);
  const auto rs = responses_input(c, prov);
  const auto gp = require_path(c, "glove");
  prov.input("glove", gp);
  const auto lex = load_glove(gp);
  const auto real_x = glove_word_features(stimuli, lex, oov_policy(c));

  AugmentInputs in;
  in.real_features = &real_x;
  in.real_responses = &rs;
  in.real_stimuli = &stimuli;
  std::vector<SentenceStimulus> generated;
  std::vector<BrainResponse> syn;
  FeatureMatrix syn_x;
  if (!c.synthetic.empty()) {
    generated = stimuli_input(c, prov, "generated");
    syn = responses_input(c, prov, "synthetic");
    std::vector<StimulusKey> keys;
    for (const auto &r : syn)
      keys.push_back(r.key());
    syn_x = restrict_rows(glove_word_features(generated, lex, oov_policy(c)), keys);
    in.synthetic_features = &syn_x;
    in.synthetic_responses = &syn;
    in.synthetic_stimuli = &generated;
  }
  AugmentOptions ao;
  ao.selector = c.selector;
  ao.folds = c.augment_folds;
  ao.n_perm = c.augment_perm;
  ao.seed = c.perm_seed;
  ao.synthetic_weight = c.synthetic_weight;
  ao.within_category = c.within_category;
  ao.fit = fit_options(c);
  prov.seed("perm_seed", c.perm_seed);
  const auto rep = augmentation_experiment(in, ao);
  const auto od = out_dir(c);
  auto j = to_json(rep);
  j["provenance"] = prov.to_json();
  write_json_file(od / "augment.json", j);
  write_csv(od / "augment.csv", prov, augmentation_csv(rep));
  if (plots)
    write_svg(od / "augment.svg", bar_chart_svg({{"real", rep.baseline_accuracy(), 0.0},
                                                 {"real+synth", rep.augmented_accuracy(), 0.0},
                                                 {"chance", rep.chance.mean, rep.chance.stddev}},
                                                "augmentation, " + c.selector, 0.5, svg_stamp(prov)));
  out << "augment " << c.selector << ": baseline=" << format_fixed(rep.baseline_accuracy())
      << " augmented=" << format_fixed(rep.augmented_accuracy()) << " chance=" << format_fixed(rep.chance.mean) << "\n";
}

inline std::string sentence_lines(const std::vector<SentenceStimulus> &stimuli) {
  std::string out;
  for (const auto &s : stimuli)
    out += s.text() + "\n";
  return out;
}

inline void cmd_corpus(const RunConfig &c, const std::string &action, std::ostream &out) {
  const auto od = out_dir(c);
  if (action == "gen") {
    Provenance prov(c, "corpus gen");
    const auto tp = require_path(c, "triples");
    const auto vp = require_path(c, "verb_allowlist");
    const auto ep = require_path(c, "entity_allowlist");
    prov.input("triples", tp).input("verb_allowlist", vp).input("entity_allowlist", ep);
    const auto kept = subsample(load_triples(tp), c.frequency_threshold, load_allowlist(vp), load_allowlist(ep));
    const auto gen = dedup(generate_all(kept));
    std::vector<SentenceStimulus> st;
    for (const auto &g : gen)
      st.push_back(g.stimulus);
    save_stimuli(od / "generated.json", st);
    write_text_file(od / "generated.txt", sentence_lines(st));
    write_json_file(od / "corpus_gen.json",
                    {{"provenance", prov.to_json()}, {"triples_kept", kept.size()}, {"sentences", st.size()}});
    out << "corpus gen: " << kept.size() << " triples -> " << st.size() << " sentences\n";
  } else if (action == "extract") {
    Provenance prov(c, "corpus extract");
    const auto tp = require_path(c, "tagged");
    prov.input("tagged", tp);
    std::ifstream in(tp);
    const auto ex = extract_patterns(parse_tagged_lines(in));
    std::vector<SentenceStimulus> st;
    json flagged = json::array();
    for (const auto &e : ex) {
      st.push_back(e.stimulus);
      if (e.trailing_clause)
        flagged.push_back(e.stimulus.sentence_id);
    }
    save_stimuli(od / "extracted.json", st);
    write_text_file(od / "extracted.txt", sentence_lines(st));
    write_json_file(od / "corpus_extract.json",
                    {{"provenance", prov.to_json()}, {"matched", st.size()}, {"trailing_clause", flagged}});
    out << "corpus extract: " << st.size() << " matches (" << flagged.size() << " with trailing clause)\n";
  } else if (action == "stats") {
    Provenance prov(c, "corpus stats");
    const auto st = stimuli_input(c, prov);
    const auto s = corpus_stats(st);
    write_json_file(od / "corpus_stats.json", {{"provenance", prov.to_json()},
                                               {"sentences", s.sentences},
                                               {"active", s.active},
                                               {"passive", s.passive},
                                               {"tokens", s.tokens},
                                               {"vocabulary", s.vocabulary}});
    out << "corpus stats: " << s.sentences << " sentences (" << s.active << " active, " << s.passive << " passive), "
        << s.tokens << " tokens, vocabulary " << s.vocabulary << "\n";
  } else {
    throw UsageError("corpus expects gen|extract|stats, got '" + action + "'");
  }
}

inline void cmd_simulate(const RunConfig &c, std::ostream &out) {
  Provenance prov(c, "simulate");
  const auto stimuli = stimuli_input(c, prov);
  prov.seed("sim_seed", c.sim_seed);
  const auto od = out_dir(c);
  FeatureMatrix fm;
  if (c.sim_features == "glove_additive") {
    // The simulated world owns its lexicon; it also covers generated sentences for synth/augment.
    auto words = vocabulary(stimuli);
    if (!c.generated.empty()) {
      const auto more = vocabulary(stimuli_input(c, prov, "generated"));
      words.insert(words.end(), more.begin(), more.end());
      std::sort(words.begin(), words.end());
      words.erase(std::unique(words.begin(), words.end()), words.end());
    }
    const auto lex = random_lexicon(words, c.sim_d_in, c.sim_seed);
    save_glove(od / "glove.txt", lex);
    fm = glove_additive_features(stimuli, lex, OovPolicy::reject);
  } else {
    fm = random_embedding(stimuli, c.sim_seed,
                          c.sim_features == "random" ? RandomMode::per_word_type : RandomMode::per_occurrence,
                          c.sim_d_in);
  }
  const auto truth = make_truth(fm.dim(), c.sim_sensors, c.sim_windows, c.sim_seed, c.sim_noise);
  const auto reps = simulate(truth, fm, c.sim_repetitions, c.sim_noise);
  RecordingShape shape;
  shape.sensors = c.sim_sensors;
  shape.window_ms = c.window_ms;
  shape.epoch_ms = c.window_ms * c.sim_windows;
  shape.sample_rate = c.sim_sample_rate;
  const auto pj = prov.to_json();
  save_epochs(od / "epochs", responses_to_epochs(reps, shape), shape.epoch_ms, pj);
  save_responses(od / "responses", average_responses(reps), c.window_ms, pj, {{"repetition_policy", "average"}});
  save_responses(od / "responses_rep", reps, c.window_ms, pj, {{"repetition_policy", "all"}});
  save_activations(od / "features" / "features.json", {fm}, pj);
  write_json_file(od / "truth.json", {{"provenance", pj}, {"truth", to_json(truth)}, {"features", fm.name()}});
  out << "simulate: " << stimuli.size() << " sentences, " << fm.size() << " stimuli x " << c.sim_repetitions
      << " repetitions -> " << od.string() << "\n";
}

/// Collects existing JSON reports under `out` into report.md.
inline void cmd_report(const RunConfig &c, bool plots, std::ostream &out) {
  Provenance prov(c, "report");
  const auto od = out_dir(c);
  std::vector<fs::path> files;
  for (const auto &e : fs::directory_iterator(od))
    if (e.is_regular_file() && e.path().extension() == ".json")
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string md = "# megalign report\n\n" + prov.stamp("<!-- ", " -->") + "\n";
  std::size_t n = 0;
  for (const auto &f : files) {
    const auto name = f.filename().string();
    const json j = read_json_file(f);
    if (name == "eval.json") {
      md += "## 2v2 evaluation\n\n| region | subset | correct | pairs | accuracy |\n|---|---|---|---|---|\n";
      for (const auto &r : j.at("results"))
        md += "| " + r.at("region").get<std::string>() + " | " + r.at("subset").get<std::string>() + " | " +
              std::to_string(r.at("correct").get<std::size_t>()) + " | " +
              std::to_string(r.at("pairs").get<std::size_t>()) + " | " + format_fixed(r.at("accuracy").get<double>()) +
              " |\n";
      for (const auto &p : j.at("permutations"))
        md += "\nchance (" + p.at("subset").get<std::string>() + ", " + std::to_string(p.at("count").get<std::size_t>()) +
              " permutations): " + format_fixed(p.at("mean").get<double>()) + " +/- " +
              format_fixed(p.at("stddev").get<double>()) + "\n";
      md += "\n";
      ++n;
    } else if (name.rfind("sensitivity_", 0) == 0) {
      const auto &r = j.at("result");
      md += "## Sensitivity (" + j.at("varied").get<std::string>() + ")\n\naccuracy " +
            format_fixed(r.at("accuracy").get<double>()) + " over " + std::to_string(r.at("pairs").get<std::size_t>()) +
            " scored pairs\n\n";
      ++n;
    } else if (name == "augment.json") {
      md += "## Augmentation (" + j.at("selector").get<std::string>() + ")\n\n| series | accuracy |\n|---|---|\n";
      md += "| real | " + format_fixed(j.at("baseline_accuracy").get<double>()) + " |\n";
      md += "| real+synthetic | " + format_fixed(j.at("augmented_accuracy").get<double>()) + " |\n";
      md += "| chance | " + format_fixed(j.at("chance").at("mean").get<double>()) + " |\n\n";
      if (plots)
        write_svg(od / "augment.svg",
                  bar_chart_svg({{"real", j.at("baseline_accuracy").get<double>(), 0.0},
                                 {"real+synth", j.at("augmented_accuracy").get<double>(), 0.0},
                                 {"chance", j.at("chance").at("mean").get<double>(),
                                  j.at("chance").at("stddev").get<double>()}},
                                "augmentation, " + j.at("selector").get<std::string>(), 0.5, svg_stamp(prov)));
      ++n;
    }
  }
  if (n == 0)
    throw DataError("report: no eval, sensitivity or augment results in " + od.string());
  write_text_file(od / "report.md", md);
  out << "report: " << n << " sections -> " << (od / "report.md").string() << "\n";
}

} // namespace cli

/// Runs the command line; never throws.
inline int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"megalign: align language-model features with MEG responses"};
  app.require_subcommand(1);
  app.fallthrough();
  cli::Globals g;
  app.add_option("-c,--config", g.config, "config file (key = value)");
  app.add_option("--set", g.overrides, "override a config key: key=value")->take_all();
  app.add_option("-j,--threads", g.threads, "worker threads (overrides config)");
  app.add_flag("--emit-plots", g.emit_plots, "also write SVG plots");

  std::size_t permute = 0;
  std::string type;
  std::string corpus_action;
  auto *prep = app.add_subcommand("prep", "epochs -> windowed responses");
  auto *fit = app.add_subcommand("fit", "fit an encoder on all stimuli");
  auto *eval = app.add_subcommand("eval", "cross-validated 2v2 evaluation");
  eval->add_option("--permute", permute, "permutations for the chance distribution");
  auto *sens = app.add_subcommand("sensitivity", "micro-context sensitivity test");
  sens->add_option("--type", type, "noun|verb|det|adj");
  auto *synth = app.add_subcommand("synth", "synthesize responses for generated sentences");
  auto *aug = app.add_subcommand("augment", "augmentation experiment");
  auto *corpus = app.add_subcommand("corpus", "simple sentence corpus tools");
  corpus->add_option("action", corpus_action, "gen|extract|stats")->required();
  auto *simulate = app.add_subcommand("simulate", "simulate epochs from a linear ground truth");
  auto *report = app.add_subcommand("report", "summarize results under out");
  auto *schema = app.add_subcommand("schema", "print the config schema");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (schema->parsed()) {
      out << config_schema_text();
      return 0;
    }
    const RunConfig c = cli::load(g);
    if (prep->parsed())
      cli::cmd_prep(c, out);
    else if (fit->parsed())
      cli::cmd_fit(c, out);
    else if (eval->parsed())
      cli::cmd_eval(c, permute, g.emit_plots, out);
    else if (sens->parsed())
      cli::cmd_sensitivity(c, type, g.emit_plots, out);
    else if (synth->parsed())
      cli::cmd_synth(c, out);
    else if (aug->parsed())
      cli::cmd_augment(c, g.emit_plots, out);
    else if (corpus->parsed())
      cli::cmd_corpus(c, corpus_action, out);
    else if (simulate->parsed())
      cli::cmd_simulate(c, out);
    else if (report->parsed())
      cli::cmd_report(c, g.emit_plots, out);
    return 0;
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError &e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError &e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const json::exception &e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error &e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

} // namespace megalign

#endif // MEGALIGN_CLI_HPP
