// src/registry_io.cpp

// Copyright 2026  The emocascade authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "emocascade/registry_io.hpp"

#include <fstream>

#include "json.hpp"

namespace emocascade {
namespace {

using nlohmann::json;

json ToJson(const Matrix &m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix MatrixFromJson(const json &j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>(), 0.0);
  m.data = j.at("data").get<std::vector<double>>();
  if (static_cast<int>(m.data.size()) != m.rows * m.cols) {
    throw IoError("matrix data length does not match its shape");
  }
  return m;
}

json ToJson(const GaussianMixture &g) {
  return json{{"weights", g.weights},
              {"means", ToJson(g.means)},
              {"variances", ToJson(g.variances)}};
}

GaussianMixture GmmFromJson(const json &j) {
  GaussianMixture g;
  g.weights = j.at("weights").get<std::vector<double>>();
  g.means = MatrixFromJson(j.at("means"));
  g.variances = MatrixFromJson(j.at("variances"));
  return g;
}

json ToJson(const HmmModel &m) {
  json emissions = json::array();
  for (const GaussianMixture &g : m.emissions) emissions.push_back(ToJson(g));
  return json{{"n_states", m.n_states},
              {"initial", m.initial},
              {"transitions", ToJson(m.transitions)},
              {"emissions", emissions}};
}

HmmModel HmmFromJson(const json &j) {
  HmmModel m;
  m.n_states = j.at("n_states").get<int>();
  m.initial = j.at("initial").get<std::vector<double>>();
  m.transitions = MatrixFromJson(j.at("transitions"));
  for (const json &g : j.at("emissions")) {
    m.emissions.push_back(GmmFromJson(g));
  }
  return m;
}

json ToJson(const SuprasegmentalModel &m) {
  json states = json::array();
  for (const GaussianMixture &g : m.state_emissions) states.push_back(ToJson(g));
  return json{{"transitions", ToJson(m.transitions)},
              {"state_emissions", states},
              {"utterance_emission", ToJson(m.utterance_emission)},
              {"state_grouping", m.state_grouping}};
}

SuprasegmentalModel SupraFromJson(const json &j) {
  SuprasegmentalModel m;
  m.transitions = MatrixFromJson(j.at("transitions"));
  for (const json &g : j.at("state_emissions")) {
    m.state_emissions.push_back(GmmFromJson(g));
  }
  m.utterance_emission = GmmFromJson(j.at("utterance_emission"));
  m.state_grouping = j.at("state_grouping").get<std::vector<int>>();
  return m;
}

json ToJson(const EmotionModelPair &p) {
  return json{{"acoustic", ToJson(p.acoustic)}, {"supra", ToJson(p.supra)}};
}

EmotionModelPair PairFromJson(const json &j) {
  return {HmmFromJson(j.at("acoustic")), SupraFromJson(j.at("supra"))};
}

json ToJson(const FeatureConfig &c) {
  return json{{"preemphasis_coeff", c.preemphasis_coeff},
              {"frame_len_ms", c.frame_len_ms},
              {"frame_hop_ms", c.frame_hop_ms},
              {"n_mel_filters", c.n_mel_filters},
              {"n_cepstra", c.n_cepstra},
              {"pitch_min_hz", c.pitch_min_hz},
              {"pitch_max_hz", c.pitch_max_hz}};
}

FeatureConfig FeatureFromJson(const json &j) {
  FeatureConfig c;
  c.preemphasis_coeff = j.at("preemphasis_coeff").get<double>();
  c.frame_len_ms = j.at("frame_len_ms").get<double>();
  c.frame_hop_ms = j.at("frame_hop_ms").get<double>();
  c.n_mel_filters = j.at("n_mel_filters").get<int>();
  c.n_cepstra = j.at("n_cepstra").get<int>();
  c.pitch_min_hz = j.at("pitch_min_hz").get<double>();
  c.pitch_max_hz = j.at("pitch_max_hz").get<double>();
  return c;
}

json ToJson(const TrainingConfig &c) {
  return json{{"max_iters", c.max_iters},
              {"ll_rel_tol", c.ll_rel_tol},
              {"variance_floor_scale", c.variance_floor_scale},
              {"seed", c.seed}};
}

TrainingConfig TrainingFromJson(const json &j) {
  TrainingConfig c;
  c.max_iters = j.at("max_iters").get<int>();
  c.ll_rel_tol = j.at("ll_rel_tol").get<double>();
  c.variance_floor_scale = j.at("variance_floor_scale").get<double>();
  c.seed = j.at("seed").get<uint64_t>();
  return c;
}

std::string EmotionKey(Gender g, Emotion e) {
  return std::string(ToLabel(g)) + "/" + ToLabel(e);
}

}  // namespace

void SaveRegistry(const ModelRegistry &registry, const std::string &path) {
  json doc;
  doc["format_version"] = kArchiveFormatVersion;
  doc["feature_config"] = ToJson(registry.feature_config);
  doc["training_config"] = ToJson(registry.training_config);
  doc["n_states"] = registry.n_states;
  doc["n_mix"] = registry.n_mix;
  doc["n_emotion_mix"] = registry.n_emotion_mix;
  doc["n_speaker_mix"] = registry.n_speaker_mix;
  doc["n_supra_mix"] = registry.n_supra_mix;
  doc["alpha"] = registry.alpha;
  doc["threshold"] = registry.threshold;
  doc["imposter_mean_of_logs"] = registry.imposter_mean_of_logs;
  doc["claimants"] = registry.claimants;

  json claimant_gender = json::object();
  for (const auto &[id, g] : registry.claimant_gender) {
    claimant_gender[id] = ToLabel(g);
  }
  doc["claimant_gender"] = claimant_gender;

  json gender_models = json::object();
  for (const auto &[g, model] : registry.gender_models) {
    gender_models[ToLabel(g)] = ToJson(model);
  }
  doc["gender_models"] = gender_models;

  json emotion_models = json::object();
  for (const auto &[key, pair] : registry.emotion_models) {
    emotion_models[EmotionKey(key.first, key.second)] = ToJson(pair);
  }
  doc["emotion_models"] = emotion_models;

  json speaker_models = json::object();
  for (const auto &[key, model] : registry.speaker_models) {
    speaker_models[key.first + "/" + ToLabel(key.second)] = ToJson(model);
  }
  doc["speaker_models"] = speaker_models;

  json pooled = json::object();
  for (const auto &[id, model] : registry.pooled_speaker_models) {
    pooled[id] = ToJson(model);
  }
  doc["pooled_speaker_models"] = pooled;

  json gi = json::object();
  for (const auto &[e, pair] : registry.gi_emotion_models) {
    gi[ToLabel(e)] = ToJson(pair);
  }
  doc["gi_emotion_models"] = gi;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open registry archive for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing registry archive: " + path);
}

ModelRegistry LoadRegistry(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open registry archive: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception &e) {
    throw IoError("cannot parse registry archive " + path + ": " + e.what());
  }
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kArchiveFormatVersion) {
      throw IoError("registry archive " + path + " has format_version " +
                    std::to_string(version) + "; expected " +
                    std::to_string(kArchiveFormatVersion));
    }
    ModelRegistry registry;
    registry.feature_config = FeatureFromJson(doc.at("feature_config"));
    registry.training_config = TrainingFromJson(doc.at("training_config"));
    registry.n_states = doc.at("n_states").get<int>();
    registry.n_mix = doc.at("n_mix").get<int>();
    registry.n_emotion_mix = doc.at("n_emotion_mix").get<int>();
    registry.n_speaker_mix = doc.at("n_speaker_mix").get<int>();
    registry.n_supra_mix = doc.at("n_supra_mix").get<int>();
    registry.alpha = doc.at("alpha").get<double>();
    registry.threshold = doc.at("threshold").get<double>();
    registry.imposter_mean_of_logs =
        doc.at("imposter_mean_of_logs").get<bool>();
    registry.claimants =
        doc.at("claimants").get<std::vector<std::string>>();
    for (const auto &[id, label] : doc.at("claimant_gender").items()) {
      registry.claimant_gender[id] = GenderFromLabel(label.get<std::string>());
    }
    for (const auto &[label, model] : doc.at("gender_models").items()) {
      registry.gender_models[GenderFromLabel(label)] = HmmFromJson(model);
    }
    for (const auto &[key, pair] : doc.at("emotion_models").items()) {
      const size_t slash = key.find('/');
      if (slash == std::string::npos) {
        throw IoError("bad emotion model key: " + key);
      }
      registry.emotion_models[{GenderFromLabel(key.substr(0, slash)),
                               EmotionFromLabel(key.substr(slash + 1))}] =
          PairFromJson(pair);
    }
    for (const auto &[key, model] : doc.at("speaker_models").items()) {
      const size_t slash = key.find('/');
      if (slash == std::string::npos) {
        throw IoError("bad speaker model key: " + key);
      }
      registry.speaker_models[{key.substr(0, slash),
                               EmotionFromLabel(key.substr(slash + 1))}] =
          HmmFromJson(model);
    }
    for (const auto &[id, model] : doc.at("pooled_speaker_models").items()) {
      registry.pooled_speaker_models[id] = HmmFromJson(model);
    }
    for (const auto &[label, pair] : doc.at("gi_emotion_models").items()) {
      registry.gi_emotion_models[EmotionFromLabel(label)] =
          PairFromJson(pair);
    }
    return registry;
  } catch (const IoError &) {
    throw;
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw IoError("registry archive " + path + " is incomplete: " + e.what());
  }
}

}  // namespace emocascade
