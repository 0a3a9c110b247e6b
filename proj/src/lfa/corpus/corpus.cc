// lfa/corpus/corpus.cc
//
// Copyright 2026 The lfadapt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lfa/corpus/corpus.h"

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

#include "lfa/base/bin-io.h"
#include "lfa/base/common.h"

namespace lfa {
namespace {

constexpr char kFeatureMagic[] = "LFX1";
constexpr uint32_t kFeatureVersion = 1;

std::string PadNumber(int n, int width) {
  std::ostringstream os;
  os << std::setw(width) << std::setfill('0') << n;
  return os.str();
}

// Row-stochastic transition matrix and start distribution over the
// non-silence tokens, drawn once per corpus seed.
struct TokenChain {
  std::vector<int32_t> tokens;
  Eigen::VectorXd start;
  Eigen::MatrixXd trans;
};

TokenChain BuildTokenChain(const TokenInventory& inventory, uint64_t seed) {
  TokenChain chain;
  for (int32_t t = 0; t < inventory.NumTokens(); ++t) {
    if (t != inventory.SilenceId()) chain.tokens.push_back(t);
  }
  const int n = static_cast<int>(chain.tokens.size());
  LFA_CHECK(n >= 1);
  Rng rng = Rng::ForStream(seed, "corpus/chain");
  chain.start.resize(n);
  for (int i = 0; i < n; ++i) chain.start[i] = 0.2 + rng.Uniform();
  chain.start /= chain.start.sum();
  chain.trans.resize(n, n);
  for (int i = 0; i < n; ++i) {
    // No immediate repeats: a repeated token has the same emission
    // distribution as one longer token, so no decoder could tell them
    // apart and every repeat would score as a deletion.
    for (int j = 0; j < n; ++j)
      chain.trans(i, j) = (j == i && n > 1) ? 0.0 : 0.2 + rng.Uniform();
    chain.trans.row(i) /= chain.trans.row(i).sum();
  }
  return chain;
}

int SampleIndex(const Eigen::VectorXd& dist, Rng& rng) {
  const double u = rng.Uniform();
  double acc = 0.0;
  for (int i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    if (u < acc) return i;
  }
  return static_cast<int>(dist.size()) - 1;
}

Eigen::VectorXd SampleFrame(const Eigen::MatrixXd& means, int32_t token,
                            double noise_sigma, Rng& rng) {
  Eigen::VectorXd x(means.cols());
  for (int d = 0; d < means.cols(); ++d) {
    x[d] = means(token, d) + noise_sigma * rng.Normal();
  }
  return x;
}

void WriteDoubles(std::ostream& os, const double* data, Eigen::Index n) {
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < n; ++i) os << ' ' << data[i];
}

Eigen::VectorXd ParseDoubles(std::istringstream& is, Eigen::Index n,
                             const std::string& what) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(is >> v[i])) {
      throw CorruptArchive("model.txt: short " + what + " row");
    }
  }
  return v;
}

}  // namespace

void CorpusSpec::Validate() const {
  if (num_speakers < 1) throw InvalidArgument("corpus: num_speakers < 1");
  if (utts_per_speaker < 1) {
    throw InvalidArgument("corpus: utts_per_speaker < 1");
  }
  if (speaker_prefix.empty()) {
    throw InvalidArgument("corpus: empty speaker_prefix");
  }
  if (feature_dim < 1) throw InvalidArgument("corpus: feature_dim < 1");
  if (min_tokens < 1 || max_tokens < min_tokens) {
    throw InvalidArgument("corpus: need 1 <= min_tokens <= max_tokens");
  }
  if (min_duration < 1 || max_duration < min_duration) {
    throw InvalidArgument("corpus: need 1 <= min_duration <= max_duration");
  }
  if (!(separation >= 0.0)) throw InvalidArgument("corpus: separation < 0");
  if (!(noise_sigma > 0.0)) throw InvalidArgument("corpus: noise_sigma <= 0");
  if (!(warp_log_scale >= 0.0) || !(warp_offset >= 0.0)) {
    throw InvalidArgument("corpus: negative warp range");
  }
  if (lead_silence_prob < 0.0 || lead_silence_prob > 1.0 ||
      trail_silence_prob < 0.0 || trail_silence_prob > 1.0) {
    throw InvalidArgument("corpus: silence prob outside [0, 1]");
  }
}

Corpus GenerateCorpus(const TokenInventory& inventory, const CorpusSpec& spec) {
  spec.Validate();
  Corpus corpus(inventory);
  const int dim = spec.feature_dim;
  const int num_tokens = inventory.NumTokens();

  // Token means are a function of (seed, separation) only, so corpora
  // that differ in speakers or sizes still share the same classes.
  Rng means_rng = Rng::ForStream(spec.seed, "corpus/means");
  corpus.model.token_means.resize(num_tokens, dim);
  for (int t = 0; t < num_tokens; ++t) {
    for (int d = 0; d < dim; ++d) {
      corpus.model.token_means(t, d) = spec.separation * means_rng.Normal();
    }
  }
  corpus.model.noise_sigma = spec.noise_sigma;

  const TokenChain chain = BuildTokenChain(inventory, spec.seed);
  const int32_t sil = inventory.SilenceId();

  for (int s = 0; s < spec.num_speakers; ++s) {
    SpeakerProfile profile;
    profile.id = spec.speaker_prefix + PadNumber(s, 2);
    Rng spk_rng = Rng::ForStream(spec.seed, "corpus/speaker/" + profile.id);
    profile.scale.resize(dim);
    profile.offset.resize(dim);
    for (int d = 0; d < dim; ++d) {
      // A zero-width warp range means no warp on that axis.
      profile.scale[d] =
          spec.warp_log_scale > 0.0
              ? std::exp(spk_rng.Uniform(-spec.warp_log_scale,
                                         spec.warp_log_scale))
              : 1.0;
      profile.offset[d] =
          spec.warp_offset > 0.0
              ? spk_rng.Uniform(-spec.warp_offset, spec.warp_offset)
              : 0.0;
    }
    if (spec.identity_speakers) {
      profile.scale.setOnes();
      profile.offset.setZero();
    }

    for (int u = 0; u < spec.utts_per_speaker; ++u) {
      Utterance utt;
      utt.speaker = profile.id;
      utt.id = profile.id + "-u" + PadNumber(u, 4);
      Rng rng = Rng::ForStream(spec.seed, "corpus/utt/" + utt.id);

      const int core = rng.UniformInt(spec.min_tokens, spec.max_tokens);
      std::vector<int32_t> labels;
      if (rng.Uniform() < spec.lead_silence_prob) labels.push_back(sil);
      int state = -1;
      for (int i = 0; i < core; ++i) {
        state = (state < 0) ? SampleIndex(chain.start, rng)
                            : SampleIndex(chain.trans.row(state), rng);
        labels.push_back(chain.tokens[state]);
      }
      if (rng.Uniform() < spec.trail_silence_prob) labels.push_back(sil);

      std::vector<int> durations(labels.size());
      int total = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        durations[i] = rng.UniformInt(spec.min_duration, spec.max_duration);
        total += durations[i];
      }

      utt.features.resize(total, dim);
      int row = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        for (int f = 0; f < durations[i]; ++f) {
          Eigen::VectorXd x =
              SampleFrame(corpus.model.token_means, labels[i],
                          spec.noise_sigma, rng);
          utt.features.row(row++) =
              (profile.scale.array() * x.array() + profile.offset.array())
                  .matrix()
                  .transpose();
        }
      }
      utt.labels = std::move(labels);
      corpus.utts.push_back(std::move(utt));
    }
    corpus.model.profiles.push_back(std::move(profile));
  }
  return corpus;
}

Utterance SilencePad(const Utterance& utt, int target_frames,
                     const CorpusModel& model, int32_t silence_token,
                     Rng& rng) {
  const int frames = static_cast<int>(utt.features.rows());
  if (target_frames < frames) {
    throw InvalidArgument("SilencePad: target " + std::to_string(target_frames) +
                          " below existing " + std::to_string(frames) +
                          " frames");
  }
  if (silence_token < 0 || silence_token >= model.token_means.rows()) {
    throw InvalidArgument("SilencePad: silence token out of range");
  }
  Utterance padded = utt;
  if (target_frames == frames) return padded;
  padded.features.conservativeResize(target_frames, Eigen::NoChange);
  for (int t = frames; t < target_frames; ++t) {
    // Padding is drawn from the canonical silence distribution, not a
    // speaker-warped one: at adaptation time the true warp is unknown.
    padded.features.row(t) =
        SampleFrame(model.token_means, silence_token, model.noise_sigma, rng)
            .transpose();
  }
  padded.labels.push_back(silence_token);
  return padded;
}

void SaveCorpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);

  {
    std::ofstream os(dir + "/inventory.txt");
    if (!os) throw Error("cannot write " + dir + "/inventory.txt");
    corpus.inventory.Save(os);
  }

  {
    std::ofstream os(dir + "/model.txt");
    if (!os) throw Error("cannot write " + dir + "/model.txt");
    const Eigen::MatrixXd& means = corpus.model.token_means;
    os << "dim " << means.cols() << '\n';
    os << "tokens " << means.rows() << '\n';
    os << "noise_sigma " << std::setprecision(17) << corpus.model.noise_sigma
       << '\n';
    for (Eigen::Index t = 0; t < means.rows(); ++t) {
      os << "mean";
      Eigen::VectorXd row = means.row(t);
      WriteDoubles(os, row.data(), row.size());
      os << '\n';
    }
    os << "profiles " << corpus.model.profiles.size() << '\n';
    for (const SpeakerProfile& p : corpus.model.profiles) {
      os << "profile " << p.id << " scale";
      WriteDoubles(os, p.scale.data(), p.scale.size());
      os << " offset";
      WriteDoubles(os, p.offset.data(), p.offset.size());
      os << '\n';
    }
  }

  std::vector<uint64_t> offsets;
  offsets.reserve(corpus.utts.size());
  {
    std::ofstream os(dir + "/features.bin", std::ios::binary);
    if (!os) throw Error("cannot write " + dir + "/features.bin");
    WriteMagic(os, kFeatureMagic);
    WriteU32(os, kFeatureVersion);
    WriteU32(os, static_cast<uint32_t>(corpus.utts.size()));
    for (const Utterance& utt : corpus.utts) {
      offsets.push_back(static_cast<uint64_t>(os.tellp()));
      std::ostringstream payload;
      WriteMatrix(payload, utt.features);
      const std::string bytes = payload.str();
      WriteBytes(os, bytes.data(), bytes.size());
      WriteU64(os, Fnv1a64(bytes));
    }
    if (!os) throw Error("short write to " + dir + "/features.bin");
  }

  {
    std::ofstream os(dir + "/manifest.txt");
    if (!os) throw Error("cannot write " + dir + "/manifest.txt");
    for (std::size_t i = 0; i < corpus.utts.size(); ++i) {
      const Utterance& utt = corpus.utts[i];
      os << utt.id << ' ' << utt.speaker << ' ' << offsets[i] << ' '
         << utt.features.rows();
      for (int32_t lab : utt.labels) {
        os << ' ' << corpus.inventory.TokenText(lab);
      }
      os << '\n';
    }
  }
}

Corpus LoadCorpus(const std::string& dir) {
  std::ifstream inv_is(dir + "/inventory.txt");
  if (!inv_is) throw MissingRecord("missing " + dir + "/inventory.txt");
  Corpus corpus{TokenInventory::Load(inv_is)};

  {
    std::ifstream is(dir + "/model.txt");
    if (!is) throw MissingRecord("missing " + dir + "/model.txt");
    std::string line, key;
    Eigen::Index dim = -1, tokens = -1, next_mean = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      ls >> key;
      if (key == "dim") {
        ls >> dim;
      } else if (key == "tokens") {
        ls >> tokens;
        if (dim < 1 || tokens < 1) {
          throw CorruptArchive("model.txt: bad dim/tokens header");
        }
        corpus.model.token_means.resize(tokens, dim);
      } else if (key == "noise_sigma") {
        ls >> corpus.model.noise_sigma;
      } else if (key == "mean") {
        if (next_mean >= tokens) throw CorruptArchive("model.txt: extra mean");
        corpus.model.token_means.row(next_mean++) =
            ParseDoubles(ls, dim, "mean").transpose();
      } else if (key == "profiles") {
        // Count is implied by the profile lines that follow.
      } else if (key == "profile") {
        SpeakerProfile p;
        std::string tag;
        ls >> p.id >> tag;
        if (tag != "scale") throw CorruptArchive("model.txt: bad profile line");
        p.scale = ParseDoubles(ls, dim, "scale");
        ls >> tag;
        if (tag != "offset") {
          throw CorruptArchive("model.txt: bad profile line");
        }
        p.offset = ParseDoubles(ls, dim, "offset");
        corpus.model.profiles.push_back(std::move(p));
      } else {
        throw CorruptArchive("model.txt: unknown key " + key);
      }
    }
    if (next_mean != tokens) throw CorruptArchive("model.txt: missing means");
  }

  std::ifstream feat(dir + "/features.bin", std::ios::binary);
  if (!feat) throw MissingRecord("missing " + dir + "/features.bin");
  ExpectMagic(feat, kFeatureMagic);
  const uint32_t version = ReadU32(feat);
  if (version != kFeatureVersion) {
    throw CorruptArchive("features.bin: unsupported version " +
                         std::to_string(version));
  }
  const uint32_t count = ReadU32(feat);
  feat.seekg(0, std::ios::end);
  const uint64_t file_size = static_cast<uint64_t>(feat.tellg());

  std::ifstream man(dir + "/manifest.txt");
  if (!man) throw MissingRecord("missing " + dir + "/manifest.txt");
  std::string line;
  while (std::getline(man, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Utterance utt;
    uint64_t offset = 0;
    int64_t frames = 0;
    if (!(ls >> utt.id >> utt.speaker >> offset >> frames)) {
      throw CorruptArchive("manifest.txt: bad line: " + line);
    }
    std::string text;
    while (ls >> text) {
      const int32_t id = corpus.inventory.FindToken(text);
      if (id < 0) {
        throw CorruptArchive("manifest.txt: unknown token " + text);
      }
      utt.labels.push_back(id);
    }
    if (offset >= file_size) {
      throw MissingRecord("features.bin: record for " + utt.id +
                          " at offset " + std::to_string(offset) +
                          " is past end of file");
    }
    feat.clear();
    feat.seekg(static_cast<std::streamoff>(offset));
    std::string err;
    try {
      utt.features = ReadMatrix(feat);
      std::ostringstream payload;
      WriteMatrix(payload, utt.features);
      if (ReadU64(feat) != Fnv1a64(payload.str())) {
        err = "checksum mismatch";
      }
    } catch (const CorruptArchive& e) {
      err = e.what();
    }
    if (!err.empty()) {
      throw CorruptArchive("features.bin: record for " + utt.id + ": " + err);
    }
    if (utt.features.rows() != frames) {
      throw CorruptArchive("features.bin: " + utt.id + " has " +
                           std::to_string(utt.features.rows()) +
                           " frames, manifest says " + std::to_string(frames));
    }
    if (utt.features.cols() != corpus.model.token_means.cols()) {
      throw CorruptArchive("features.bin: " + utt.id + " dim mismatch");
    }
    corpus.utts.push_back(std::move(utt));
  }
  if (corpus.utts.size() != count) {
    throw CorruptArchive("manifest.txt lists " +
                         std::to_string(corpus.utts.size()) +
                         " utts, features.bin has " + std::to_string(count));
  }
  return corpus;
}

}  // namespace lfa
