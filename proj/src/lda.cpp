#include "precog/lda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace precog {

using nlohmann::json;

namespace {

constexpr int kInferBurnIn = 20;
constexpr int kInferSamples = 30;

int sample_discrete(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
}

}  // namespace

std::vector<std::string> LdaModel::top_terms(int k, std::size_t n) const {
  std::vector<int> order(vocab.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return topicTerm(k, a) > topicTerm(k, b); });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n && i < order.size(); ++i) out.push_back(vocab[static_cast<std::size_t>(order[i])]);
  return out;
}

LdaModel fit_lda(const std::vector<std::vector<std::string>>& docs, const LdaParams& params) {
  if (docs.empty()) throw Error("fit_lda: empty corpus");
  if (params.K < 2) throw Error("fit_lda: K must be at least 2");
  if (params.iterations < 1 || !(params.alpha > 0) || !(params.beta > 0)) throw Error("fit_lda: invalid parameters");

  LdaModel m;
  m.K = params.K;
  m.alpha = params.alpha;
  m.beta = params.beta;
  m.seed = params.seed;
  std::set<std::string> terms;
  for (const auto& d : docs) terms.insert(d.begin(), d.end());
  if (terms.empty()) throw Error("fit_lda: vocabulary empty after stopwording");
  m.vocab.assign(terms.begin(), terms.end());
  for (std::size_t i = 0; i < m.vocab.size(); ++i) m.index[m.vocab[i]] = static_cast<int>(i);

  const auto K = static_cast<std::size_t>(params.K);
  const std::size_t V = m.vocab.size();
  std::vector<std::vector<int>> words(docs.size()), z(docs.size());
  std::vector<std::vector<int>> ndk(docs.size(), std::vector<int>(K, 0));
  std::vector<std::vector<int>> nkw(K, std::vector<int>(V, 0));
  std::vector<int> nk(K, 0);
  Rng rng(params.seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : docs[d]) {
      const int w = m.index.at(t);
      const int k = static_cast<int>(rng.below(K));
      words[d].push_back(w);
      z[d].push_back(k);
      ++ndk[d][static_cast<std::size_t>(k)];
      ++nkw[static_cast<std::size_t>(k)][static_cast<std::size_t>(w)];
      ++nk[static_cast<std::size_t>(k)];
    }
  }

  const double Vbeta = static_cast<double>(V) * params.beta;
  std::vector<double> cumulative(K);
  for (int it = 0; it < params.iterations; ++it) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const auto w = static_cast<std::size_t>(words[d][i]);
        auto k = static_cast<std::size_t>(z[d][i]);
        --ndk[d][k];
        --nkw[k][w];
        --nk[k];
        double acc = 0.0;
        for (std::size_t t = 0; t < K; ++t) {
          acc += (ndk[d][t] + params.alpha) * (nkw[t][w] + params.beta) / (nk[t] + Vbeta);
          cumulative[t] = acc;
        }
        k = static_cast<std::size_t>(sample_discrete(rng, cumulative));
        z[d][i] = static_cast<int>(k);
        ++ndk[d][k];
        ++nkw[k][w];
        ++nk[k];
      }
    }
  }

  m.topicTerm.resize(params.K, static_cast<Eigen::Index>(V));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t w = 0; w < V; ++w)
      m.topicTerm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) = (nkw[k][w] + params.beta) / (nk[k] + Vbeta);
    m.topicTerm.row(static_cast<Eigen::Index>(k)) /= m.topicTerm.row(static_cast<Eigen::Index>(k)).sum();
  }
  return m;
}

TopicInference infer_topic_dist(const LdaModel& model, const std::vector<std::string>& tokens) {
  const auto K = static_cast<std::size_t>(model.K);
  std::vector<int> words;
  std::uint64_t h = fnv1a("lda-infer");
  for (const auto& t : tokens) {
    auto it = model.index.find(t);
    if (it == model.index.end()) continue;
    words.push_back(it->second);
    h = fnv1a(t, h);
    h = fnv1a("\x1f", h);
  }
  TopicInference out;
  if (words.empty()) {
    out.dist = Vector::Constant(model.K, 1.0 / model.K);
    out.inVocabulary = false;
    return out;
  }

  Rng rng(h ^ model.seed);
  std::vector<int> z(words.size());
  std::vector<int> nd(K, 0);
  for (auto& k : z) {
    k = static_cast<int>(rng.below(K));
    ++nd[static_cast<std::size_t>(k)];
  }
  std::vector<double> cumulative(K);
  Vector acc = Vector::Zero(model.K);
  for (int sweep = 0; sweep < kInferBurnIn + kInferSamples; ++sweep) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --nd[static_cast<std::size_t>(z[i])];
      double a = 0.0;
      for (std::size_t t = 0; t < K; ++t) {
        a += (nd[t] + model.alpha) * model.topicTerm(static_cast<Eigen::Index>(t), words[i]);
        cumulative[t] = a;
      }
      z[i] = sample_discrete(rng, cumulative);
      ++nd[static_cast<std::size_t>(z[i])];
    }
    if (sweep >= kInferBurnIn)
      for (std::size_t t = 0; t < K; ++t)
        acc[static_cast<Eigen::Index>(t)] += (nd[t] + model.alpha) / (static_cast<double>(words.size()) + model.K * model.alpha);
  }
  out.dist = acc / acc.sum();
  return out;
}

double entropy(const Vector& dist) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < dist.size(); ++i)
    if (dist[i] > 0) h -= dist[i] * std::log(dist[i]);
  return h;
}

json to_json(const LdaModel& m) {
  json rows = json::array();
  for (Eigen::Index k = 0; k < m.topicTerm.rows(); ++k) {
    std::vector<double> r(static_cast<std::size_t>(m.topicTerm.cols()));
    for (Eigen::Index w = 0; w < m.topicTerm.cols(); ++w) r[static_cast<std::size_t>(w)] = m.topicTerm(k, w);
    rows.push_back(r);
  }
  return {{"K", m.K}, {"alpha", m.alpha}, {"beta", m.beta}, {"vocab", m.vocab}, {"topicTerm", rows}, {"seed", m.seed}};
}

LdaModel lda_from_json(const json& j) {
  LdaModel m;
  m.K = j.at("K").get<int>();
  m.alpha = j.at("alpha").get<double>();
  m.beta = j.at("beta").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.vocab = j.at("vocab").get<std::vector<std::string>>();
  for (std::size_t i = 0; i < m.vocab.size(); ++i) m.index[m.vocab[i]] = static_cast<int>(i);
  const auto& rows = j.at("topicTerm");
  if (rows.size() != static_cast<std::size_t>(m.K)) throw Error("lda: topicTerm row count does not match K");
  m.topicTerm.resize(m.K, static_cast<Eigen::Index>(m.vocab.size()));
  for (int k = 0; k < m.K; ++k) {
    const auto r = rows.at(static_cast<std::size_t>(k)).get<std::vector<double>>();
    if (r.size() != m.vocab.size()) throw Error("lda: topicTerm row length does not match vocabulary");
    for (std::size_t w = 0; w < r.size(); ++w) m.topicTerm(k, static_cast<Eigen::Index>(w)) = r[w];
  }
  return m;
}

}  // namespace precog
