#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "recarena/domain.hpp"
#include "recarena/ingest.hpp"
#include "recarena/rng.hpp"

namespace recarena {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  void fill_gaussian(Rng& rng, double scale) {
    for (auto& v : data) v = scale * rng.normal();
  }
};

inline double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

enum class RecKind { Random, MostPopular, MF, LightGCN };

inline const char* to_string(RecKind k) {
  switch (k) {
    case RecKind::Random: return "random";
    case RecKind::MostPopular: return "most_popular";
    case RecKind::MF: return "mf";
    case RecKind::LightGCN: return "lightgcn";
  }
  return "unknown";
}

inline std::optional<RecKind> rec_kind_from_string(const std::string& s) {
  if (s == "random") return RecKind::Random;
  if (s == "most_popular") return RecKind::MostPopular;
  if (s == "mf") return RecKind::MF;
  if (s == "lightgcn") return RecKind::LightGCN;
  return std::nullopt;
}

struct RatedInteraction {
  UserId user;
  ItemId item;
  int rating = 0;
};

inline std::vector<RatedInteraction> flatten_interactions(const Dataset& ds) {
  std::vector<RatedInteraction> out;
  for (const auto& [user, history] : ds.users)
    for (const auto& h : history) out.push_back({user, h.item_id, h.rating});
  return out;
}

// ---------------------------------------------------------------------------
// Bipartite user-item graph with symmetric-normalized propagation.

struct BipartiteGraph {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // unique (user, item)
  std::vector<std::size_t> deg_user;
  std::vector<std::size_t> deg_item;

  static BipartiteGraph from_edges(std::size_t n_users, std::size_t n_items,
                                   std::vector<std::pair<std::size_t, std::size_t>> edges) {
    BipartiteGraph g;
    g.n_users = n_users;
    g.n_items = n_items;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    g.deg_user.assign(n_users, 0);
    g.deg_item.assign(n_items, 0);
    for (const auto& [u, i] : g.edges) {
      ++g.deg_user.at(u);
      ++g.deg_item.at(i);
    }
    return g;
  }
};

// Exact symmetric-normalized propagation: layer rule
// E^{(k+1)} = D^{-1/2} A D^{-1/2} E^{(k)}, output = mean of layers 0..K.
// Nodes without edges keep their layer-0 rows.
inline std::pair<Matrix, Matrix> propagate_embeddings(const BipartiteGraph& g, const Matrix& e0_user,
                                                      const Matrix& e0_item, int layers) {
  if (e0_user.rows != g.n_users || e0_item.rows != g.n_items)
    throw std::invalid_argument("propagate_embeddings: embedding rows do not match graph");
  const std::size_t d = e0_user.cols;
  Matrix cur_u = e0_user, cur_i = e0_item;
  Matrix acc_u = e0_user, acc_i = e0_item;
  for (int k = 0; k < layers; ++k) {
    Matrix next_u(g.n_users, d), next_i(g.n_items, d);
    for (const auto& [u, i] : g.edges) {
      const double w = 1.0 / std::sqrt(double(g.deg_user[u]) * double(g.deg_item[i]));
      const double* iu = cur_u.row(u);
      const double* ii = cur_i.row(i);
      double* ou = next_u.row(u);
      double* oi = next_i.row(i);
      for (std::size_t c = 0; c < d; ++c) {
        ou[c] += w * ii[c];
        oi[c] += w * iu[c];
      }
    }
    cur_u = std::move(next_u);
    cur_i = std::move(next_i);
    for (std::size_t r = 0; r < g.n_users; ++r)
      for (std::size_t c = 0; c < d; ++c) acc_u.at(r, c) += cur_u.at(r, c);
    for (std::size_t r = 0; r < g.n_items; ++r)
      for (std::size_t c = 0; c < d; ++c) acc_i.at(r, c) += cur_i.at(r, c);
  }
  const double inv = 1.0 / double(layers + 1);
  for (auto& v : acc_u.data) v *= inv;
  for (auto& v : acc_i.data) v *= inv;
  for (std::size_t r = 0; r < g.n_users; ++r)
    if (g.deg_user[r] == 0)
      for (std::size_t c = 0; c < d; ++c) acc_u.at(r, c) = e0_user.at(r, c);
  for (std::size_t r = 0; r < g.n_items; ++r)
    if (g.deg_item[r] == 0)
      for (std::size_t c = 0; c < d; ++c) acc_i.at(r, c) = e0_item.at(r, c);
  return {std::move(acc_u), std::move(acc_i)};
}

// ---------------------------------------------------------------------------
// BPR objective over (user, positive, negative) triples.

struct BprTriple {
  std::size_t user;
  std::size_t pos;
  std::size_t neg;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double bpr_mean_loss(const Matrix& users, const Matrix& items,
                            const std::vector<BprTriple>& triples) {
  if (triples.empty()) return 0.0;
  double loss = 0.0;
  for (const auto& t : triples) {
    const double x = dot(users.row(t.user), items.row(t.pos), users.cols) -
                     dot(users.row(t.user), items.row(t.neg), users.cols);
    // -ln sigma(x), written for numerical stability at large |x|
    loss += x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
  }
  return loss / double(triples.size());
}

inline double frobenius_sq(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return s;
}

// Full LightGCN training objective at fixed triples: mean BPR loss on the
// propagated embeddings plus l2 * ||E0||_F^2.
inline double lightgcn_loss(const BipartiteGraph& g, const Matrix& e0_user, const Matrix& e0_item,
                            int layers, const std::vector<BprTriple>& triples, double l2) {
  const auto [fu, fi] = propagate_embeddings(g, e0_user, e0_item, layers);
  return bpr_mean_loss(fu, fi, triples) + l2 * (frobenius_sq(e0_user) + frobenius_sq(e0_item));
}

// Exact gradient of lightgcn_loss w.r.t. the layer-0 embeddings. The
// propagation is linear and self-adjoint, so the chain rule is one more
// propagation applied to the final-embedding gradients.
inline std::pair<Matrix, Matrix> lightgcn_grad(const BipartiteGraph& g, const Matrix& e0_user,
                                               const Matrix& e0_item, int layers,
                                               const std::vector<BprTriple>& triples, double l2) {
  const std::size_t d = e0_user.cols;
  const auto [fu, fi] = propagate_embeddings(g, e0_user, e0_item, layers);
  Matrix gu(g.n_users, d), gi(g.n_items, d);
  const double inv = triples.empty() ? 0.0 : 1.0 / double(triples.size());
  for (const auto& t : triples) {
    const double x = dot(fu.row(t.user), fi.row(t.pos), d) - dot(fu.row(t.user), fi.row(t.neg), d);
    const double coeff = (sigmoid(x) - 1.0) * inv;  // d(-ln sigma)/dx
    const double* u = fu.row(t.user);
    const double* ip = fi.row(t.pos);
    const double* in = fi.row(t.neg);
    for (std::size_t c = 0; c < d; ++c) {
      gu.at(t.user, c) += coeff * (ip[c] - in[c]);
      gi.at(t.pos, c) += coeff * u[c];
      gi.at(t.neg, c) -= coeff * u[c];
    }
  }
  auto [du, di] = propagate_embeddings(g, gu, gi, layers);
  for (std::size_t r = 0; r < du.rows; ++r)
    for (std::size_t c = 0; c < d; ++c) du.at(r, c) += 2.0 * l2 * e0_user.at(r, c);
  for (std::size_t r = 0; r < di.rows; ++r)
    for (std::size_t c = 0; c < d; ++c) di.at(r, c) += 2.0 * l2 * e0_item.at(r, c);
  return {std::move(du), std::move(di)};
}

// ---------------------------------------------------------------------------
// Trained ranking backends.

struct TrainedModel {
  RecKind kind = RecKind::Random;
  std::uint64_t seed = 0;
  int layers = 0;
  std::vector<UserId> user_ids;
  std::vector<ItemId> item_ids;
  std::map<UserId, std::size_t> user_index;
  std::map<ItemId, std::size_t> item_index;
  Matrix user_emb;  // final scoring embeddings
  Matrix item_emb;
  std::map<ItemId, long> popularity;  // historical interaction counts
  std::vector<double> epoch_losses;   // fixed-triple eval loss after each epoch
};

namespace detail {

struct IndexedInteractions {
  std::vector<UserId> user_ids;
  std::vector<ItemId> item_ids;
  std::map<UserId, std::size_t> user_index;
  std::map<ItemId, std::size_t> item_index;
  std::vector<std::pair<std::size_t, std::size_t>> positives;  // unique (u, i)
  std::vector<std::set<std::size_t>> positive_sets;            // per user
  std::map<ItemId, long> popularity;
};

inline IndexedInteractions index_interactions(const std::vector<RatedInteraction>& interactions,
                                              int positive_threshold) {
  IndexedInteractions ix;
  std::set<UserId> users;
  std::set<ItemId> items;
  for (const auto& r : interactions) {
    users.insert(r.user);
    items.insert(r.item);
    ++ix.popularity[r.item];
  }
  ix.user_ids.assign(users.begin(), users.end());
  ix.item_ids.assign(items.begin(), items.end());
  for (std::size_t i = 0; i < ix.user_ids.size(); ++i) ix.user_index[ix.user_ids[i]] = i;
  for (std::size_t i = 0; i < ix.item_ids.size(); ++i) ix.item_index[ix.item_ids[i]] = i;
  ix.positive_sets.assign(ix.user_ids.size(), {});
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& r : interactions) {
    if (r.rating < positive_threshold) continue;
    const auto u = ix.user_index[r.user];
    const auto i = ix.item_index[r.item];
    if (seen.insert({u, i}).second) {
      ix.positives.push_back({u, i});
      ix.positive_sets[u].insert(i);
    }
  }
  return ix;
}

inline std::size_t sample_negative(Rng& rng, std::size_t n_items,
                                   const std::set<std::size_t>& positives) {
  if (positives.size() >= n_items)
    throw std::runtime_error("cannot sample a negative: user interacted with every item");
  for (;;) {
    const std::size_t j = rng.below(n_items);
    if (!positives.count(j)) return j;
  }
}

inline std::vector<BprTriple> sample_triples(const IndexedInteractions& ix, int neg_per_pos,
                                             Rng& rng) {
  std::vector<BprTriple> triples;
  triples.reserve(ix.positives.size() * std::size_t(neg_per_pos));
  for (const auto& [u, i] : ix.positives)
    for (int t = 0; t < neg_per_pos; ++t)
      triples.push_back({u, i, sample_negative(rng, ix.item_ids.size(), ix.positive_sets[u])});
  return triples;
}

}  // namespace detail

// Classic BPR matrix factorization: per-triple SGD with a fixed learning
// rate. Reported per-epoch losses are measured on one fixed, seeded triple
// set so progress is comparable across epochs.
inline TrainedModel train_mf(const std::vector<RatedInteraction>& interactions,
                             const RecTrainConfig& cfg) {
  auto ix = detail::index_interactions(interactions, cfg.positive_threshold);
  if (ix.positives.empty())
    throw std::invalid_argument("train_mf: no positive interactions at threshold");

  TrainedModel m;
  m.kind = RecKind::MF;
  m.seed = cfg.seed;
  m.user_ids = ix.user_ids;
  m.item_ids = ix.item_ids;
  m.user_index = ix.user_index;
  m.item_index = ix.item_index;
  m.popularity = ix.popularity;

  Rng rng(mix_seed(cfg.seed, "mf-train"));
  m.user_emb = Matrix(ix.user_ids.size(), cfg.dim);
  m.item_emb = Matrix(ix.item_ids.size(), cfg.dim);
  m.user_emb.fill_gaussian(rng, 0.1);
  m.item_emb.fill_gaussian(rng, 0.1);

  Rng eval_rng(mix_seed(cfg.seed, "mf-eval"));
  const auto eval_triples = detail::sample_triples(ix, 1, eval_rng);

  std::vector<std::size_t> order(ix.positives.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<double> u_old(cfg.dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (const auto idx : order) {
      const auto [u, ip] = ix.positives[idx];
      for (int t = 0; t < cfg.negatives_per_positive; ++t) {
        const std::size_t in = detail::sample_negative(rng, ix.item_ids.size(),
                                                       ix.positive_sets[u]);
        double* pu = m.user_emb.row(u);
        double* qi = m.item_emb.row(ip);
        double* qj = m.item_emb.row(in);
        const double x = dot(pu, qi, cfg.dim) - dot(pu, qj, cfg.dim);
        const double g = 1.0 - sigmoid(x);
        std::copy(pu, pu + cfg.dim, u_old.begin());
        for (int c = 0; c < cfg.dim; ++c) {
          pu[c] += cfg.learning_rate * (g * (qi[c] - qj[c]) - cfg.l2 * pu[c]);
          qi[c] += cfg.learning_rate * (g * u_old[c] - cfg.l2 * qi[c]);
          qj[c] += cfg.learning_rate * (-g * u_old[c] - cfg.l2 * qj[c]);
        }
      }
    }
    m.epoch_losses.push_back(bpr_mean_loss(m.user_emb, m.item_emb, eval_triples));
  }
  return m;
}

// LightGCN: full-batch gradient descent on the BPR loss over propagated
// embeddings, with exact gradients through the (linear) propagation.
inline TrainedModel train_lightgcn(const std::vector<RatedInteraction>& interactions,
                                   const RecTrainConfig& cfg) {
  auto ix = detail::index_interactions(interactions, cfg.positive_threshold);
  if (ix.positives.empty())
    throw std::invalid_argument("train_lightgcn: no positive interactions at threshold");

  TrainedModel m;
  m.kind = RecKind::LightGCN;
  m.seed = cfg.seed;
  m.layers = cfg.layers;
  m.user_ids = ix.user_ids;
  m.item_ids = ix.item_ids;
  m.user_index = ix.user_index;
  m.item_index = ix.item_index;
  m.popularity = ix.popularity;

  const auto graph =
      BipartiteGraph::from_edges(ix.user_ids.size(), ix.item_ids.size(), ix.positives);

  Rng rng(mix_seed(cfg.seed, "lightgcn-train"));
  Matrix e0_user(ix.user_ids.size(), cfg.dim);
  Matrix e0_item(ix.item_ids.size(), cfg.dim);
  e0_user.fill_gaussian(rng, 0.1);
  e0_item.fill_gaussian(rng, 0.1);

  Rng eval_rng(mix_seed(cfg.seed, "lightgcn-eval"));
  const auto eval_triples = detail::sample_triples(ix, 1, eval_rng);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto triples = detail::sample_triples(ix, cfg.negatives_per_positive, rng);
    auto [du, di] = lightgcn_grad(graph, e0_user, e0_item, cfg.layers, triples, cfg.l2);
    for (std::size_t k = 0; k < e0_user.data.size(); ++k)
      e0_user.data[k] -= cfg.learning_rate * du.data[k];
    for (std::size_t k = 0; k < e0_item.data.size(); ++k)
      e0_item.data[k] -= cfg.learning_rate * di.data[k];
    m.epoch_losses.push_back(
        lightgcn_loss(graph, e0_user, e0_item, cfg.layers, eval_triples, cfg.l2));
  }

  auto [fu, fi] = propagate_embeddings(graph, e0_user, e0_item, cfg.layers);
  m.user_emb = std::move(fu);
  m.item_emb = std::move(fi);
  return m;
}

inline TrainedModel make_random_model(const std::vector<RatedInteraction>& interactions,
                                      std::uint64_t seed) {
  auto ix = detail::index_interactions(interactions, 1);
  TrainedModel m;
  m.kind = RecKind::Random;
  m.seed = seed;
  m.user_ids = ix.user_ids;
  m.item_ids = ix.item_ids;
  m.user_index = ix.user_index;
  m.item_index = ix.item_index;
  m.popularity = ix.popularity;
  return m;
}

// Ranking by historical interaction count. Live re-ranking against current
// store counters is layered on by the platform when enabled.
inline TrainedModel make_most_popular_model(const std::vector<RatedInteraction>& interactions) {
  auto ix = detail::index_interactions(interactions, 1);
  TrainedModel m;
  m.kind = RecKind::MostPopular;
  m.user_ids = ix.user_ids;
  m.item_ids = ix.item_ids;
  m.user_index = ix.user_index;
  m.item_index = ix.item_index;
  m.popularity = ix.popularity;
  return m;
}

inline TrainedModel train_model(RecKind kind, const std::vector<RatedInteraction>& interactions,
                                const RecTrainConfig& cfg) {
  switch (kind) {
    case RecKind::Random: return make_random_model(interactions, cfg.seed);
    case RecKind::MostPopular: return make_most_popular_model(interactions);
    case RecKind::MF: return train_mf(interactions, cfg);
    case RecKind::LightGCN: return train_lightgcn(interactions, cfg);
  }
  throw std::invalid_argument("unknown recommender kind");
}

inline double model_score(const TrainedModel& m, const UserId& user, const ItemId& item) {
  auto ui = m.user_index.find(user);
  auto ii = m.item_index.find(item);
  if (ui == m.user_index.end() || ii == m.item_index.end()) return 0.0;
  if (m.kind == RecKind::MF || m.kind == RecKind::LightGCN)
    return dot(m.user_emb.row(ui->second), m.item_emb.row(ii->second), m.user_emb.cols);
  auto pop = m.popularity.find(item);
  return pop == m.popularity.end() ? 0.0 : double(pop->second);
}

// Top-k ranking for one user. Ties break by item id; Random ignores scores
// and orders items by a per-(seed, user, context) hash, which is a uniform
// draw without replacement. context_seed lets callers vary random pages per
// step while keeping runs reproducible.
inline std::vector<ItemId> recommend(const TrainedModel& m, const UserId& user, std::size_t k,
                                     const std::set<ItemId>& exclusion = {},
                                     std::uint64_t context_seed = 0) {
  if (k == 0) throw std::invalid_argument("recommend: k must be >= 1");
  struct Scored {
    double score;
    std::uint64_t shuffle_key;
    const ItemId* id;
  };
  std::vector<Scored> scored;
  scored.reserve(m.item_ids.size());
  const bool random = m.kind == RecKind::Random;
  const bool embedding = m.kind == RecKind::MF || m.kind == RecKind::LightGCN;
  const auto ui = m.user_index.find(user);
  const bool known_user = ui != m.user_index.end();
  for (std::size_t i = 0; i < m.item_ids.size(); ++i) {
    const ItemId& id = m.item_ids[i];
    if (exclusion.count(id)) continue;
    Scored s{0.0, 0, &id};
    if (random) {
      s.shuffle_key = mix_seed(mix_seed(m.seed, context_seed), fnv1a64(user) ^ fnv1a64(id));
    } else if (embedding && known_user) {
      s.score = dot(m.user_emb.row(ui->second), m.item_emb.row(i), m.user_emb.cols);
    } else {
      auto pop = m.popularity.find(id);
      s.score = pop == m.popularity.end() ? 0.0 : double(pop->second);
    }
    scored.push_back(s);
  }
  std::sort(scored.begin(), scored.end(), [&](const Scored& a, const Scored& b) {
    if (random) return a.shuffle_key != b.shuffle_key ? a.shuffle_key < b.shuffle_key
                                                      : *a.id < *b.id;
    if (a.score != b.score) return a.score > b.score;
    return *a.id < *b.id;
  });
  std::vector<ItemId> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(*scored[i].id);
  return out;
}

// ---------------------------------------------------------------------------
// Checkpointing: JSON matrix dump with a small header.

inline void save_model(const TrainedModel& m, const std::string& path) {
  Json j{{"kind", to_string(m.kind)},
         {"seed", m.seed},
         {"layers", m.layers},
         {"dim", m.user_emb.cols},
         {"user_ids", m.user_ids},
         {"item_ids", m.item_ids},
         {"user_emb", m.user_emb.data},
         {"item_emb", m.item_emb.data},
         {"popularity", m.popularity},
         {"epoch_losses", m.epoch_losses}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model checkpoint: " + path);
  out << j.dump() << "\n";
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model checkpoint: " + path);
  Json j = Json::parse(in);
  TrainedModel m;
  const auto kind = rec_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw std::runtime_error("unknown model kind in checkpoint");
  m.kind = *kind;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.layers = get_or<int>(j, "layers", 0);
  m.user_ids = j.at("user_ids").get<std::vector<UserId>>();
  m.item_ids = j.at("item_ids").get<std::vector<ItemId>>();
  for (std::size_t i = 0; i < m.user_ids.size(); ++i) m.user_index[m.user_ids[i]] = i;
  for (std::size_t i = 0; i < m.item_ids.size(); ++i) m.item_index[m.item_ids[i]] = i;
  const std::size_t dim = j.at("dim").get<std::size_t>();
  m.user_emb = Matrix(m.user_ids.size(), dim);
  m.user_emb.data = j.at("user_emb").get<std::vector<double>>();
  m.item_emb = Matrix(m.item_ids.size(), dim);
  m.item_emb.data = j.at("item_emb").get<std::vector<double>>();
  m.popularity = j.at("popularity").get<std::map<ItemId, long>>();
  m.epoch_losses = get_or<std::vector<double>>(j, "epoch_losses", {});
  return m;
}

}  // namespace recarena
