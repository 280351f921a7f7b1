// Copyright 2026 The OVT Authors
// SPDX-License-Identifier: Apache-2.0

#include "ovt/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace ovt {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {
      "a",       "an",      "the",     "and",      "or",       "of",
      "in",      "on",      "with",    "to",       "is",       "are",
      "this",    "that",    "it",      "its",      "as",       "at",
      "by",      "for",     "from",    "into",     "no",       "not",
      "now",     "here",    "there",   "describe", "scene",    "combining",
      "vision",  "audio",   "subtitle", "caption", "captions", "one",
      "sentence", "video",  "clip",    "using",    "given",    "write"};
  return kStop;
}

const std::vector<std::string>& vision_templates() {
  static const std::vector<std::string> kTemplates = {
      "a % pattern fills the frame", "bright % shapes on screen",
      "the % texture appears", "a steady % image",
      "colorful % stripes visible"};
  return kTemplates;
}

const std::vector<std::string>& audio_templates() {
  static const std::vector<std::string> kTemplates = {
      "a % tone plays", "steady % humming sound", "the % pitch rings",
      "a clear % note", "soft % ringing heard"};
  return kTemplates;
}

std::string fill_template(const std::string& tmpl, const std::string& word) {
  std::string out = tmpl;
  const auto pos = out.find('%');
  out.replace(pos, 1, word);
  return out;
}

std::string replace_slot(std::string text, const std::string& slot,
                         const std::string& value, const char* name) {
  const auto first = text.find(slot);
  if (first == std::string::npos)
    throw ConfigError(std::string("prompt template: missing slot ") + name);
  if (text.find(slot, first + 1) != std::string::npos)
    throw ConfigError(std::string("prompt template: duplicate slot ") + name);
  text.replace(first, slot.size(), value);
  return text;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

PromptTemplate PromptTemplate::standard() {
  return PromptTemplate{
      "describe one video clip combining vision: {vision_caps} audio: "
      "{audio_caps} subtitle: {subtitle}"};
}

void SynthConfig::validate() const {
  if (n_clips < 1) throw ConfigError("SynthConfig: n_clips must be >= 1");
  if (n_concepts < 1) throw ConfigError("SynthConfig: n_concepts must be >= 1");
  if (n_concepts > vocab_size)
    throw ConfigError("SynthConfig: n_concepts must not exceed vocab_size");
  if (frame_h < 1 || frame_w < 1 || frame_c < 1)
    throw ConfigError("SynthConfig: frame dimensions must be positive");
  if (sample_rate <= 0)
    throw ConfigError("SynthConfig: sample_rate must be positive");
  if (n_frames < 1) throw ConfigError("SynthConfig: n_frames must be >= 1");
  if (wave_seconds <= 0)
    throw ConfigError("SynthConfig: wave_seconds must be positive");
  if (captions_per_modality < 3)
    throw ConfigError("SynthConfig: captions_per_modality must be >= 3");
}

std::vector<std::string> concept_word_pool(int vocab_size) {
  static const char* kConsonants = "bdfgklmnprstvz";
  static const char* kVowels = "aeiou";
  std::vector<std::string> pool;
  std::set<std::string> seen;
  int counter = 0;
  while (static_cast<int>(pool.size()) < vocab_size) {
    // Enumerate two-syllable pseudo-words in a scrambled but fixed order.
    const int idx = counter * 37 + 11;
    std::string word;
    word += kConsonants[idx % 14];
    word += kVowels[(idx / 14) % 5];
    word += kConsonants[(idx / 70) % 14];
    word += kVowels[(idx / 980) % 5];
    ++counter;
    if (counter > 1000000)
      throw ConfigError("concept_word_pool: vocab_size too large");
    if (seen.count(word) || StubIntegrator::is_stopword(word)) continue;
    seen.insert(word);
    pool.push_back(word);
  }
  return pool;
}

bool StubIntegrator::is_stopword(const std::string& word) {
  return stopwords().count(word) > 0;
}

std::string StubIntegrator::integrate(const std::string& prompt) {
  std::vector<std::string> content;
  std::set<std::string> seen;
  for (const auto& w : split_words(prompt)) {
    if (is_stopword(w) || seen.count(w)) continue;
    seen.insert(w);
    content.push_back(w);
  }
  if (content.empty()) return "nothing notable";
  return join(content, " ");
}

std::string assemble_omni_prompt(const CaptionSet& caps,
                                 const std::string& subtitle,
                                 const PromptTemplate& tmpl, Rng& rng) {
  if (caps.vision.size() < 3)
    throw DataError("assemble_omni_prompt: fewer than 3 vision captions");
  if (caps.audio.size() < 3)
    throw DataError("assemble_omni_prompt: fewer than 3 audio captions");

  const auto v_idx =
      rng.sample_without_replacement(static_cast<int>(caps.vision.size()), 3);
  const auto a_idx =
      rng.sample_without_replacement(static_cast<int>(caps.audio.size()), 3);
  std::vector<std::string> v_sel, a_sel;
  for (int i : v_idx) v_sel.push_back(caps.vision[i]);
  for (int i : a_idx) a_sel.push_back(caps.audio[i]);

  std::string text = tmpl.text;
  text = replace_slot(text, "{vision_caps}", join(v_sel, "; "), "vision_caps");
  text = replace_slot(text, "{audio_caps}", join(a_sel, "; "), "audio_caps");
  text = replace_slot(text, "{subtitle}",
                      subtitle.empty() ? "(no subtitle)" : subtitle,
                      "subtitle");
  return text;
}

std::string compose_omni_caption(const std::string& prompt,
                                 CaptionIntegrator& client) {
  if (prompt.empty()) throw DataError("compose_omni_caption: empty prompt");
  try {
    return client.integrate(prompt);
  } catch (const std::exception& e) {
    throw DataError(std::string("caption integration failed: ") + e.what() +
                    " [prompt: " + prompt + "]");
  }
}

SynthCorpus generate_synthetic_corpus_full(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const auto pool = concept_word_pool(config.vocab_size);
  const PromptTemplate tmpl = PromptTemplate::standard();
  StubIntegrator stub;

  SynthCorpus out;
  out.clips.reserve(config.n_clips);
  const int wave_len = static_cast<int>(
      std::llround(config.wave_seconds * config.sample_rate));
  const double nyquist = config.sample_rate / 2.0;

  for (int i = 0; i < config.n_clips; ++i) {
    const int k = i % config.n_concepts;
    const std::string& concept = pool[k];

    OmniClip clip;
    {
      std::ostringstream id;
      id << "clip-";
      id.width(5);
      id.fill('0');
      id << i;
      clip.clip_id = id.str();
    }
    clip.duration_s = config.wave_seconds;
    clip.sample_rate = config.sample_rate;

    // Concept-indexed frame pattern: per-concept base color and stripe
    // frequencies, plus small per-pixel noise.
    clip.frames_t = config.n_frames;
    clip.frames_h = config.frame_h;
    clip.frames_w = config.frame_w;
    clip.frames_c = config.frame_c;
    clip.frames.resize(static_cast<std::size_t>(config.n_frames) *
                       config.frame_h * config.frame_w * config.frame_c);
    std::vector<double> base(config.frame_c);
    for (int c = 0; c < config.frame_c; ++c) {
      const double phi = 0.618033988749895 * (k + 1) * (c + 1);
      base[c] = 0.15 + 0.7 * (phi - std::floor(phi));
    }
    const int fx = 1 + k % 4;
    const int fy = 1 + (k / 4) % 4;
    std::size_t p = 0;
    for (int t = 0; t < config.n_frames; ++t) {
      for (int y = 0; y < config.frame_h; ++y) {
        for (int x = 0; x < config.frame_w; ++x) {
          const double stripe =
              0.75 + 0.25 * std::cos(2.0 * kPi *
                                     (fx * x + fy * y) /
                                     config.frame_h);
          for (int c = 0; c < config.frame_c; ++c) {
            double v = base[c] * stripe + 0.03 * rng.normal();
            clip.frames[p++] =
                static_cast<float>(std::clamp(v, 0.0, 1.0));
          }
        }
      }
    }

    // Concept-indexed tone with mild noise.
    const double freq =
        nyquist * (0.06 + 0.88 * (k + 0.5) / config.n_concepts);
    clip.waveform.resize(wave_len);
    for (int s = 0; s < wave_len; ++s) {
      const double tsec = s / config.sample_rate;
      const double v =
          0.45 * std::sin(2.0 * kPi * freq * tsec) + 0.015 * rng.normal();
      clip.waveform[s] = static_cast<float>(v);
    }

    clip.subtitle = "now showing " + concept + " footage";

    for (int v = 0; v < config.captions_per_modality; ++v)
      clip.captions.vision.push_back(
          fill_template(vision_templates()[v % 5], concept));
    for (int a = 0; a < config.captions_per_modality; ++a)
      clip.captions.audio.push_back(
          fill_template(audio_templates()[a % 5], concept));

    const std::string prompt =
        assemble_omni_prompt(clip.captions, clip.subtitle, tmpl, rng);
    clip.captions.omni = compose_omni_caption(prompt, stub);

    out.clips.push_back(std::move(clip));
    out.concept_of_clip.push_back(concept);
  }
  return out;
}

std::vector<OmniClip> generate_synthetic_corpus(const SynthConfig& config) {
  return generate_synthetic_corpus_full(config).clips;
}

StatsReport corpus_stats(const std::vector<OmniClip>& corpus) {
  if (corpus.empty()) throw DataError("corpus_stats: empty corpus");
  StatsReport r;
  r.clip_count = corpus.size();
  double dur = 0.0;
  double v_len = 0.0, a_len = 0.0, o_len = 0.0;
  std::size_t v_n = 0, a_n = 0, o_n = 0;
  for (const auto& clip : corpus) {
    dur += clip.duration_s;
    for (const auto& c : clip.captions.vision) {
      v_len += static_cast<double>(split_words(c).size());
      ++v_n;
    }
    for (const auto& c : clip.captions.audio) {
      a_len += static_cast<double>(split_words(c).size());
      ++a_n;
    }
    if (!clip.captions.omni.empty()) {
      o_len += static_cast<double>(split_words(clip.captions.omni).size());
      ++o_n;
    }
  }
  r.mean_duration_s = dur / corpus.size();
  r.mean_vision_caption_len = v_n ? v_len / v_n : 0.0;
  r.mean_audio_caption_len = a_n ? a_len / a_n : 0.0;
  r.mean_omni_caption_len = o_n ? o_len / o_n : 0.0;
  return r;
}

StatsReport corpus_stats(const SynthCorpus& corpus) {
  StatsReport r = corpus_stats(corpus.clips);
  for (const auto& c : corpus.concept_of_clip) ++r.concept_histogram[c];
  return r;
}

std::string StatsReport::to_text() const {
  std::ostringstream os;
  os << "clips: " << clip_count << "\n";
  os << "mean_duration_s: " << mean_duration_s << "\n";
  os << "mean_vision_caption_len: " << mean_vision_caption_len << "\n";
  os << "mean_audio_caption_len: " << mean_audio_caption_len << "\n";
  os << "mean_omni_caption_len: " << mean_omni_caption_len << "\n";
  if (!concept_histogram.empty()) {
    os << "concepts:\n";
    for (const auto& [word, count] : concept_histogram)
      os << "  " << word << ": " << count << "\n";
  }
  return os.str();
}

}  // namespace ovt
