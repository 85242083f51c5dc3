#ifndef MEGALIGN_CORPUS_HPP
#define MEGALIGN_CORPUS_HPP

// Simple-sentence corpus: active/passive sentences from subject-verb-object triples and
// pattern extraction over POS-tagged text.

#include "megalign/core_data.hpp"
#include "megalign/irregular_verbs.hpp"

#include <cctype>
#include <unordered_map>

namespace megalign {

struct VerbForms {
  std::string past;
  std::string participle;
};

/// Lemma -> (simple past, past participle).
class IrregularLexicon {
public:
  IrregularLexicon() = default;

  static IrregularLexicon builtin() {
    std::istringstream in(kIrregularVerbsTsv);
    return parse(in);
  }

  static IrregularLexicon parse(std::istream &in) {
    IrregularLexicon lex;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#')
        continue;
      std::istringstream ss(line);
      std::string lemma, past, part;
      if (!(ss >> lemma >> past >> part))
        throw DataError("irregular verb line " + std::to_string(lineno) + ": expected lemma past participle");
      lex.forms_[lemma] = {past, part};
    }
    return lex;
  }

  static IrregularLexicon load(const fs::path &path) {
    std::ifstream in(path);
    if (!in)
      throw DataError("cannot open irregular verb list " + path.string());
    return parse(in);
  }

  const VerbForms *find(const std::string &lemma) const {
    auto it = forms_.find(lemma);
    return it == forms_.end() ? nullptr : &it->second;
  }
  std::size_t size() const { return forms_.size(); }

private:
  std::unordered_map<std::string, VerbForms> forms_;
};

namespace detail {
inline bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

inline std::size_t vowel_groups(const std::string &w) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_group)
      ++groups;
    in_group = v;
  }
  return groups;
}

inline void check_lemma(const std::string &lemma) {
  if (lemma.empty())
    throw DataError("verb inflection: empty lemma");
  for (char c : lemma)
    if (!std::islower(static_cast<unsigned char>(c)))
      throw DataError("verb inflection: lemma '" + lemma + "' is not lowercase alphabetic");
}

/// Regular -ed spelling: e-merge, consonant+y -> ied, single-syllable CVC doubling.
inline std::string regular_past(const std::string &w) {
  const auto n = w.size();
  if (w.back() == 'e')
    return w + "d";
  if (n >= 2 && w.back() == 'y' && !is_vowel(w[n - 2]))
    return w.substr(0, n - 1) + "ied";
  if (n >= 3 && !is_vowel(w[n - 1]) && is_vowel(w[n - 2]) && !is_vowel(w[n - 3]) && w[n - 1] != 'w' &&
      w[n - 1] != 'x' && w[n - 1] != 'y' && vowel_groups(w) == 1)
    return w + w.back() + "ed";
  return w + "ed";
}
} // namespace detail

inline std::string past_tense(const std::string &lemma, const IrregularLexicon &lex = IrregularLexicon::builtin()) {
  detail::check_lemma(lemma);
  if (const auto *f = lex.find(lemma))
    return f->past;
  return detail::regular_past(lemma);
}

inline std::string past_participle(const std::string &lemma,
                                   const IrregularLexicon &lex = IrregularLexicon::builtin()) {
  detail::check_lemma(lemma);
  if (const auto *f = lex.find(lemma))
    return f->participle;
  return detail::regular_past(lemma);
}

// ---------------------------------------------------------------------------
// Templates

struct SvoTriple {
  std::string subject;
  std::string verb; // lemma
  std::string object;
  long frequency = 0;

  auto operator<=>(const SvoTriple &) const = default;
};

struct GeneratedSentence {
  SentenceStimulus stimulus;
  SvoTriple source;
  Voice template_id = Voice::active;
};

namespace detail {
inline void push_words(SentenceStimulus &s, const std::string &words, const std::string &pos) {
  std::istringstream in(words);
  std::string w;
  while (in >> w)
    s.tokens.push_back({lowercase(w), pos, s.sentence_id, s.tokens.size()});
}

inline std::string default_sentence_id(const std::string &text) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}
} // namespace detail

/// active:  the [subject] [past] the [object]
/// passive: the [object] was [participle] by the [subject]
inline GeneratedSentence generate(const SvoTriple &t, Voice voice,
                                  const IrregularLexicon &lex = IrregularLexicon::builtin(),
                                  std::string sentence_id = {}) {
  if (t.subject.empty() || t.verb.empty() || t.object.empty())
    throw DataError("generate: triple has an empty field");
  if (t.frequency < 0)
    throw DataError("generate: negative frequency");
  GeneratedSentence g;
  g.source = t;
  g.template_id = voice;
  auto &s = g.stimulus;
  s.voice = voice;
  s.dataset_id = DatasetId::generated;
  s.sentence_id = std::move(sentence_id);
  if (voice == Voice::active) {
    detail::push_words(s, "the", "DT");
    detail::push_words(s, t.subject, "NN");
    detail::push_words(s, past_tense(t.verb, lex), "VBD");
    detail::push_words(s, "the", "DT");
    detail::push_words(s, t.object, "NN");
  } else {
    detail::push_words(s, "the", "DT");
    detail::push_words(s, t.object, "NN");
    detail::push_words(s, "was", "VBD");
    detail::push_words(s, past_participle(t.verb, lex), "VBN");
    detail::push_words(s, "by", "IN");
    detail::push_words(s, "the", "DT");
    detail::push_words(s, t.subject, "NN");
  }
  if (s.sentence_id.empty())
    s.sentence_id = detail::default_sentence_id(s.text());
  for (auto &tok : s.tokens)
    tok.sentence_id = s.sentence_id;
  return g;
}

/// Both voices for every triple (2|triples| sentences, input order, active first per triple).
inline std::vector<GeneratedSentence> generate_all(const std::vector<SvoTriple> &triples,
                                                   const IrregularLexicon &lex = IrregularLexicon::builtin()) {
  std::vector<GeneratedSentence> out;
  out.reserve(triples.size() * 2);
  for (const auto &t : triples) {
    out.push_back(generate(t, Voice::active, lex));
    out.push_back(generate(t, Voice::passive, lex));
  }
  return out;
}

/// Sorts by sentence text, drops repeated texts, and assigns ids `<prefix>000001`, ...
inline std::vector<GeneratedSentence> dedup(std::vector<GeneratedSentence> sentences,
                                            const std::string &id_prefix = "ssc-") {
  std::stable_sort(sentences.begin(), sentences.end(), [](const auto &a, const auto &b) {
    return a.stimulus.text() < b.stimulus.text();
  });
  std::vector<GeneratedSentence> out;
  for (auto &g : sentences)
    if (out.empty() || out.back().stimulus.text() != g.stimulus.text())
      out.push_back(std::move(g));
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", i + 1);
    out[i].stimulus.sentence_id = id_prefix + buf;
    for (auto &tok : out[i].stimulus.tokens)
      tok.sentence_id = out[i].stimulus.sentence_id;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Triple filtering

inline std::vector<SvoTriple> parse_triples(std::istream &in) {
  std::vector<SvoTriple> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty() || line[0] == '#')
      continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, '\t'))
      f.push_back(cell);
    if (f.size() != 4)
      throw DataError("triples line " + std::to_string(lineno) + ": expected 4 tab-separated fields");
    SvoTriple t{lowercase(f[0]), lowercase(f[1]), lowercase(f[2]), 0};
    try {
      std::size_t used = 0;
      t.frequency = std::stol(f[3], &used);
      if (used != f[3].size())
        throw std::invalid_argument(f[3]);
    } catch (const std::exception &) {
      throw DataError("triples line " + std::to_string(lineno) + ": bad frequency '" + f[3] + "'");
    }
    if (t.subject.empty() || t.verb.empty() || t.object.empty() || t.frequency < 0)
      throw DataError("triples line " + std::to_string(lineno) + ": empty field or negative frequency");
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<SvoTriple> load_triples(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open triples file " + path.string());
  return parse_triples(in);
}

inline std::set<std::string> load_allowlist(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open allowlist " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (!line.empty() && line[0] != '#')
      out.insert(lowercase(line));
  }
  return out;
}

inline constexpr long kDefaultFrequencyThreshold = 6;

/// Keeps frequency >= threshold with an allowed verb and allowed subject and object,
/// sorted lexicographically.
inline std::vector<SvoTriple> subsample(const std::vector<SvoTriple> &triples, long threshold,
                                        const std::set<std::string> &verbs, const std::set<std::string> &entities) {
  std::vector<SvoTriple> out;
  for (const auto &t : triples)
    if (t.frequency >= threshold && verbs.count(t.verb) && entities.count(t.subject) && entities.count(t.object))
      out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Pattern extraction

struct ExtractedSentence {
  SentenceStimulus stimulus; // voice labelled
  std::string subject;
  std::string verb; // inflected form as it appears
  std::string object;
  bool trailing_clause = false; // tokens after the final noun group were kept
};

namespace detail {
inline std::size_t take_while(const std::vector<WordToken> &t, std::size_t i, bool (*pred)(const WordToken &)) {
  while (i < t.size() && pred(t[i]))
    ++i;
  return i;
}

inline bool noun_token(const WordToken &t) { return is_noun_tag(t.pos); }
inline bool verb_token(const WordToken &t) { return is_main_verb(t); }

inline std::string join_text(const std::vector<WordToken> &t, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i)
    s += (s.empty() ? "" : " ") + t[i].text;
  return s;
}
} // namespace detail

/// Matches "the [noun+] was [verb+] by the [noun+]" (passive) or "the [noun+] [verb+] the
/// [noun+]" (active) from the first token. Tokens after the final noun group are kept and the
/// match is flagged; a final "." token is dropped.
inline std::optional<ExtractedSentence> match_pattern(const SentenceStimulus &s) {
  std::vector<WordToken> t = s.tokens;
  if (!t.empty() && (t.back().text == "." || t.back().pos == "."))
    t.pop_back();
  if (t.empty() || t[0].text != "the")
    return std::nullopt;
  const auto n1 = detail::take_while(t, 1, detail::noun_token);
  if (n1 == 1 || n1 >= t.size())
    return std::nullopt;
  ExtractedSentence ex;
  std::size_t obj_start = 0;
  std::size_t i = n1;
  if (t[i].text == "was") {
    const auto v = detail::take_while(t, i + 1, detail::verb_token);
    if (v == i + 1 || v + 1 >= t.size() || t[v].text != "by" || t[v + 1].text != "the")
      return std::nullopt;
    ex.stimulus.voice = Voice::passive;
    ex.object = detail::join_text(t, 1, n1);
    ex.verb = detail::join_text(t, i + 1, v);
    obj_start = v + 2;
  } else {
    const auto v = detail::take_while(t, i, detail::verb_token);
    if (v == i || v >= t.size() || t[v].text != "the")
      return std::nullopt;
    ex.stimulus.voice = Voice::active;
    ex.subject = detail::join_text(t, 1, n1);
    ex.verb = detail::join_text(t, i, v);
    obj_start = v + 1;
  }
  const auto n2 = detail::take_while(t, obj_start, detail::noun_token);
  if (n2 == obj_start)
    return std::nullopt;
  const auto last = detail::join_text(t, obj_start, n2);
  if (ex.stimulus.voice == Voice::passive)
    ex.subject = last;
  else
    ex.object = last;
  ex.trailing_clause = n2 < t.size();
  ex.stimulus.sentence_id = s.sentence_id;
  ex.stimulus.dataset_id = s.dataset_id;
  for (std::size_t k = 0; k < t.size(); ++k)
    ex.stimulus.tokens.push_back({t[k].text, t[k].pos, s.sentence_id, k});
  return ex;
}

inline std::vector<ExtractedSentence> extract_patterns(const std::vector<SentenceStimulus> &tagged) {
  std::vector<ExtractedSentence> out;
  for (const auto &s : tagged)
    if (auto m = match_pattern(s))
      out.push_back(std::move(*m));
  return out;
}

/// One sentence per line, tokens written word/TAG.
inline std::vector<SentenceStimulus> parse_tagged_lines(std::istream &in, const std::string &id_prefix = "w") {
  std::vector<SentenceStimulus> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06zu", ++n);
    out.push_back(make_sentence(id_prefix + buf, line, Voice::active, DatasetId::generated));
  }
  return out;
}

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t active = 0;
  std::size_t passive = 0;
  std::size_t tokens = 0;
  std::size_t vocabulary = 0;
};

inline CorpusStats corpus_stats(const std::vector<SentenceStimulus> &stimuli) {
  CorpusStats st;
  std::set<std::string> vocab;
  for (const auto &s : stimuli) {
    ++st.sentences;
    (s.voice == Voice::active ? st.active : st.passive) += 1;
    st.tokens += s.tokens.size();
    for (const auto &t : s.tokens)
      vocab.insert(t.text);
  }
  st.vocabulary = vocab.size();
  return st;
}

} // namespace megalign

#endif // MEGALIGN_CORPUS_HPP
