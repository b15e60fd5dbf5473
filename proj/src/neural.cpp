#include "sentiment/neural.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "sentiment/errors.hpp"
#include "sentiment/evalmetrics.hpp"
#include "sentiment/linear.hpp"
#include "sentiment/rng.hpp"

namespace sentiment {

namespace {

// y += M x, M is rows x cols row-major.
void gemv(const double* M, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* m = M + r * cols;
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += m[c] * x[c];
    y[r] += s;
  }
}

// y += M^T x
void gemv_t(const double* M, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double xr = x[r];
    if (xr == 0.0) continue;
    const double* m = M + r * cols;
    for (std::size_t c = 0; c < cols; ++c) y[c] += m[c] * xr;
  }
}

// M += a b^T
void ger(double* M, std::size_t rows, std::size_t cols, const double* a, const double* b) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double ar = a[r];
    if (ar == 0.0) continue;
    double* m = M + r * cols;
    for (std::size_t c = 0; c < cols; ++c) m[c] += ar * b[c];
  }
}

void glorot(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (auto& v : t.data()) v = rng.uniform(-limit, limit);
}

void check_cell(const LstmCellParams& cell, std::size_t e, std::size_t h) {
  if (cell.W.size() != 4 * h * e || cell.U.size() != 4 * h * h || cell.b.size() != 4 * h) {
    throw DomainError("LSTM parameter shapes do not match the configured dimensions");
  }
}

// One LSTM step. `gates` receives (i, f, o, g) post-activation (4H).
void cell_step(const LstmCellParams& cell, std::size_t E, std::size_t H, const double* x,
               const double* h_prev, const double* c_prev, double* gates, double* c, double* tanh_c,
               double* h) {
  std::copy(cell.b.data().begin(), cell.b.data().end(), gates);
  gemv(cell.W.data().data(), 4 * H, E, x, gates);
  gemv(cell.U.data().data(), 4 * H, H, h_prev, gates);
  for (std::size_t k = 0; k < 3 * H; ++k) gates[k] = sigmoid(gates[k]);
  for (std::size_t k = 3 * H; k < 4 * H; ++k) gates[k] = std::tanh(gates[k]);
  for (std::size_t k = 0; k < H; ++k) {
    const double i = gates[k], f = gates[H + k], o = gates[2 * H + k], g = gates[3 * H + k];
    c[k] = f * c_prev[k] + i * g;
    tanh_c[k] = std::tanh(c[k]);
    h[k] = o * tanh_c[k];
  }
}

void run_direction(const LstmCellParams& cell, std::size_t E, std::size_t H, std::size_t T,
                   const std::vector<double>& x, bool reverse, ForwardCache::Direction& d) {
  d.gates.assign(T * 4 * H, 0.0);
  d.c.assign(T * H, 0.0);
  d.tanh_c.assign(T * H, 0.0);
  d.h.assign(T * H, 0.0);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t step = 0; step < T; ++step) {
    const std::size_t t = reverse ? T - 1 - step : step;
    const double* h_prev = zeros.data();
    const double* c_prev = zeros.data();
    if (step > 0) {
      const std::size_t p = reverse ? t + 1 : t - 1;
      h_prev = &d.h[p * H];
      c_prev = &d.c[p * H];
    }
    cell_step(cell, E, H, &x[t * E], h_prev, c_prev, &d.gates[t * 4 * H], &d.c[t * H],
              &d.tanh_c[t * H], &d.h[t * H]);
  }
}

// Reverse-mode through one direction. dh_ext is T x H, dx accumulates T x E.
void backprop_direction(const LstmCellParams& cell, LstmCellParams& grads_owner, std::size_t E,
                        std::size_t H, std::size_t T, const std::vector<double>& x,
                        const ForwardCache::Direction& d, bool reverse,
                        const std::vector<double>& dh_ext, std::vector<double>& dx) {
  auto gW = grads_owner.W.grad();
  auto gU = grads_owner.U.grad();
  auto gb = grads_owner.b.grad();
  std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), da(4 * H), dh_prev(H);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t step = 0; step < T; ++step) {
    // Visit positions in the opposite order to the forward recurrence.
    const std::size_t t = reverse ? step : T - 1 - step;
    const bool first = reverse ? t == T - 1 : t == 0;
    const std::size_t p = reverse ? t + 1 : t - 1;
    const double* c_prev = first ? zeros.data() : &d.c[p * H];
    const double* h_prev = first ? zeros.data() : &d.h[p * H];
    const double* gates = &d.gates[t * 4 * H];
    const double* tc = &d.tanh_c[t * H];
    for (std::size_t k = 0; k < H; ++k) {
      const double i = gates[k], f = gates[H + k], o = gates[2 * H + k], g = gates[3 * H + k];
      const double dh = dh_ext[t * H + k] + dh_next[k];
      const double d_o = dh * tc[k];
      const double dc = dc_next[k] + dh * o * (1.0 - tc[k] * tc[k]);
      da[k] = dc * g * i * (1.0 - i);
      da[H + k] = dc * c_prev[k] * f * (1.0 - f);
      da[2 * H + k] = d_o * o * (1.0 - o);
      da[3 * H + k] = dc * i * (1.0 - g * g);
      dc_next[k] = dc * f;
    }
    ger(gW.data(), 4 * H, E, da.data(), &x[t * E]);
    ger(gU.data(), 4 * H, H, da.data(), h_prev);
    for (std::size_t k = 0; k < 4 * H; ++k) gb[k] += da[k];
    gemv_t(cell.W.data().data(), 4 * H, E, da.data(), &dx[t * E]);
    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    gemv_t(cell.U.data().data(), 4 * H, H, da.data(), dh_prev.data());
    dh_next.swap(dh_prev);
  }
}

// Forward pass for one encoded sequence of length >= 1.
void forward_row(const RnnModel& m, std::span<const TokenId> ids, ForwardCache::Row& row) {
  const auto E = m.dims.embed_dim, H = m.dims.hidden, A = m.dims.attn_dim;
  const std::size_t T = ids.size();
  row.length = T;
  row.x.assign(T * E, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    if (ids[t] > m.vocab_size) throw DomainError("token id out of embedding range");
    const auto src = m.embedding.row(ids[t]);
    std::copy(src.begin(), src.end(), row.x.begin() + static_cast<std::ptrdiff_t>(t * E));
  }
  run_direction(m.forward_cell, E, H, T, row.x, false, row.fwd);
  run_direction(m.backward_cell, E, H, T, row.x, true, row.bwd);

  std::vector<double> ht(2 * H);
  row.u.assign(T * A, 0.0);
  row.alpha.assign(T, 0.0);
  std::vector<double> scores(T);
  double max_score = -INFINITY;
  for (std::size_t t = 0; t < T; ++t) {
    std::copy_n(&row.fwd.h[t * H], H, ht.begin());
    std::copy_n(&row.bwd.h[t * H], H, ht.begin() + static_cast<std::ptrdiff_t>(H));
    double* u = &row.u[t * A];
    gemv(m.attention.W.data().data(), A, 2 * H, ht.data(), u);
    double e = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      u[a] = std::tanh(u[a]);
      e += m.attention.v[a] * u[a];
    }
    scores[t] = e;
    max_score = std::max(max_score, e);
  }
  double z = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    row.alpha[t] = std::exp(scores[t] - max_score);
    z += row.alpha[t];
  }
  for (auto& a : row.alpha) a /= z;

  row.context.assign(2 * H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < H; ++k) {
      row.context[k] += row.alpha[t] * row.fwd.h[t * H + k];
      row.context[H + k] += row.alpha[t] * row.bwd.h[t * H + k];
    }
  }
  double logit = m.out_b[0];
  for (std::size_t k = 0; k < 2 * H; ++k) logit += m.out_w[k] * row.context[k];
  row.logit = logit;
}

std::span<const TokenId> row_ids(const TokenBatch& b, std::size_t r) {
  return std::span<const TokenId>(b.ids).subspan(r * b.width, b.lengths[r]);
}

}  // namespace

RnnModel RnnModel::init(std::size_t vocab_size, const RnnDims& dims, std::uint64_t seed) {
  if (dims.embed_dim == 0 || dims.hidden == 0 || dims.attn_dim == 0 || dims.max_len == 0) {
    throw DomainError("RNN dimensions must be positive");
  }
  const auto E = dims.embed_dim, H = dims.hidden, A = dims.attn_dim;
  RnnModel m;
  m.dims = dims;
  m.vocab_size = vocab_size;
  m.embedding = Tensor({vocab_size + 1, E}, true);
  for (auto* cell : {&m.forward_cell, &m.backward_cell}) {
    cell->W = Tensor({4 * H, E}, true);
    cell->U = Tensor({4 * H, H}, true);
    cell->b = Tensor({4 * H}, true);
  }
  m.attention.W = Tensor({A, 2 * H}, true);
  m.attention.v = Tensor({A}, true);
  m.out_w = Tensor({2 * H}, true);
  m.out_b = Tensor({1}, true);

  Rng rng(seed);
  glorot(m.embedding, vocab_size + 1, E, rng);
  std::fill(m.embedding.row(0).begin(), m.embedding.row(0).end(), 0.0);
  for (auto* cell : {&m.forward_cell, &m.backward_cell}) {
    // Per-gate fan: each gate block is (H x E) and (H x H).
    glorot(cell->W, E, H, rng);
    glorot(cell->U, H, H, rng);
    for (std::size_t k = H; k < 2 * H; ++k) cell->b[k] = 1.0;
  }
  glorot(m.attention.W, 2 * H, A, rng);
  glorot(m.attention.v, A, 1, rng);
  return m;
}

std::vector<std::pair<std::string, Tensor*>> RnnModel::parameters() {
  return {{"embedding", &embedding},
          {"forward.W", &forward_cell.W},
          {"forward.U", &forward_cell.U},
          {"forward.b", &forward_cell.b},
          {"backward.W", &backward_cell.W},
          {"backward.U", &backward_cell.U},
          {"backward.b", &backward_cell.b},
          {"attention.W", &attention.W},
          {"attention.v", &attention.v},
          {"output.w", &out_w},
          {"output.b", &out_b}};
}

std::vector<std::pair<std::string, const Tensor*>> RnnModel::parameters() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<RnnModel*>(this)->parameters()) out.emplace_back(name, t);
  return out;
}

void RnnModel::zero_grad() {
  for (auto& [name, t] : parameters()) {
    if (t->grad().size() != t->size()) t->enable_grad();
    t->zero_grad();
  }
}

std::string RnnModel::to_json(const std::string& vocab_ref) const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["kind"] = "rnn";
  j["dims"] = {{"embed_dim", dims.embed_dim},
               {"hidden", dims.hidden},
               {"attn_dim", dims.attn_dim},
               {"max_len", dims.max_len},
               {"vocab_size", vocab_size}};
  nlohmann::ordered_json tensors;
  for (const auto& [name, t] : parameters()) {
    tensors[name] = {t->shape(), std::vector<double>(t->data().begin(), t->data().end())};
  }
  j["tensors"] = std::move(tensors);
  j["vocab_ref"] = vocab_ref;
  return j.dump() + "\n";
}

std::pair<RnnModel, std::string> RnnModel::from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("version", 0) != 1 || j.value("kind", "") != "rnn") {
      throw IoError("not a version-1 rnn model file");
    }
    const auto& d = j.at("dims");
    RnnDims dims{d.at("embed_dim").get<std::size_t>(), d.at("hidden").get<std::size_t>(),
                 d.at("attn_dim").get<std::size_t>(), d.at("max_len").get<std::size_t>()};
    RnnModel m = RnnModel::init(d.at("vocab_size").get<std::size_t>(), dims, 0);
    for (auto& [name, t] : m.parameters()) {
      const auto& entry = j.at("tensors").at(name);
      const auto shape = entry.at(0).get<std::vector<std::size_t>>();
      auto data = entry.at(1).get<std::vector<double>>();
      if (shape != t->shape()) throw IoError("tensor '" + name + "' has an unexpected shape");
      *t = Tensor(shape, std::move(data));
      t->enable_grad();
    }
    return {std::move(m), j.at("vocab_ref").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed rnn model file: ") + e.what());
  } catch (const DomainError& e) {
    throw IoError(std::string("malformed rnn model file: ") + e.what());
  }
}

std::vector<TokenId> encode(const Vocabulary& vocab, const TokenSequence& tokens,
                            std::size_t max_len) {
  std::vector<TokenId> ids;
  for (const auto& tok : tokens) {
    if (ids.size() >= max_len) break;
    const auto i = vocab.find(tok);
    if (i >= 0) ids.push_back(static_cast<TokenId>(i + 1));
  }
  return ids;
}

TokenBatch make_batch(const std::vector<std::vector<TokenId>>& seqs,
                      const std::vector<SentimentLabel>& labels, std::size_t max_len) {
  if (seqs.empty() || seqs.size() != labels.size()) {
    throw DomainError("a batch needs at least one sequence and one label per sequence");
  }
  TokenBatch b;
  b.rows = seqs.size();
  for (const auto& s : seqs) {
    if (s.empty()) throw DomainError("batch row has no tokens");
    if (s.size() > max_len) throw DomainError("batch row longer than max_len");
    b.width = std::max(b.width, s.size());
  }
  b.ids.assign(b.rows * b.width, 0);
  b.mask.assign(b.rows * b.width, 0);
  for (std::size_t r = 0; r < b.rows; ++r) {
    for (std::size_t t = 0; t < seqs[r].size(); ++t) {
      if (seqs[r][t] == 0) throw DomainError("padding id inside a batch row");
      b.ids[r * b.width + t] = seqs[r][t];
      b.mask[r * b.width + t] = 1;
    }
    b.lengths.push_back(seqs[r].size());
    b.labels.push_back(labels[r] == SentimentLabel::Positive ? 1.0 : 0.0);
  }
  return b;
}

Tensor embed(const RnnModel& model, const TokenBatch& batch) {
  const auto E = model.dims.embed_dim;
  Tensor out({batch.rows, batch.width, E});
  for (std::size_t r = 0; r < batch.rows; ++r) {
    for (std::size_t t = 0; t < batch.width; ++t) {
      const auto id = batch.id(r, t);
      if (id > model.vocab_size) throw DomainError("token id out of embedding range");
      const auto src = model.embedding.row(id);
      std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>((r * batch.width + t) * E));
    }
  }
  return out;
}

LstmState lstm_step(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmCellParams& cell) {
  const std::size_t H = h_prev.size(), E = x.size();
  if (c_prev.size() != H) throw DomainError("LSTM state shapes differ");
  check_cell(cell, E, H);
  std::vector<double> gates(4 * H), tc(H);
  LstmState s{std::vector<double>(H), std::vector<double>(H)};
  cell_step(cell, E, H, x.data(), h_prev.data(), c_prev.data(), gates.data(), s.c.data(), tc.data(),
            s.h.data());
  return s;
}

Tensor bilstm(const RnnModel& model, const Tensor& embedded, const TokenBatch& batch) {
  const auto E = model.dims.embed_dim, H = model.dims.hidden;
  if (embedded.rank() != 3 || embedded.dim(0) != batch.rows || embedded.dim(1) != batch.width ||
      embedded.dim(2) != E) {
    throw DomainError("embedded batch has the wrong shape");
  }
  Tensor out({batch.rows, batch.width, 2 * H});
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const std::size_t T = batch.lengths[r];
    std::vector<double> x(embedded.data().begin() + static_cast<std::ptrdiff_t>(r * batch.width * E),
                          embedded.data().begin() + static_cast<std::ptrdiff_t>((r * batch.width + T) * E));
    ForwardCache::Direction f, b;
    run_direction(model.forward_cell, E, H, T, x, false, f);
    run_direction(model.backward_cell, E, H, T, x, true, b);
    for (std::size_t t = 0; t < T; ++t) {
      double* dst = &out[(r * batch.width + t) * 2 * H];
      std::copy_n(&f.h[t * H], H, dst);
      std::copy_n(&b.h[t * H], H, dst + H);
    }
  }
  return out;
}

AttentionOutput attention(const RnnModel& model, const Tensor& hidden, const TokenBatch& batch) {
  const auto H2 = 2 * model.dims.hidden, A = model.dims.attn_dim;
  if (hidden.rank() != 3 || hidden.dim(0) != batch.rows || hidden.dim(1) != batch.width ||
      hidden.dim(2) != H2) {
    throw DomainError("hidden states have the wrong shape");
  }
  AttentionOutput out{Tensor({batch.rows, H2}), Tensor({batch.rows, batch.width})};
  std::vector<double> u(A), e(batch.width);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    std::size_t live = 0;
    double max_e = -INFINITY;
    for (std::size_t t = 0; t < batch.width; ++t) {
      if (!batch.mask[r * batch.width + t]) {
        e[t] = -INFINITY;
        continue;
      }
      ++live;
      std::fill(u.begin(), u.end(), 0.0);
      gemv(model.attention.W.data().data(), A, H2, hidden.data().data() + (r * batch.width + t) * H2, u.data());
      double s = 0.0;
      for (std::size_t a = 0; a < A; ++a) s += model.attention.v[a] * std::tanh(u[a]);
      e[t] = s;
      max_e = std::max(max_e, s);
    }
    if (live == 0) throw DomainError("attention over a fully masked row");
    double z = 0.0;
    for (std::size_t t = 0; t < batch.width; ++t) {
      const double w = batch.mask[r * batch.width + t] ? std::exp(e[t] - max_e) : 0.0;
      out.alphas[r * batch.width + t] = w;
      z += w;
    }
    for (std::size_t t = 0; t < batch.width; ++t) {
      double& a = out.alphas[r * batch.width + t];
      a /= z;
      for (std::size_t k = 0; k < H2; ++k) out.context[r * H2 + k] += a * hidden[(r * batch.width + t) * H2 + k];
    }
  }
  return out;
}

ForwardCache forward_pass(const RnnModel& model, const TokenBatch& batch) {
  ForwardCache cache;
  cache.rows.resize(batch.rows);
  cache.probs.resize(batch.rows);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    forward_row(model, row_ids(batch, r), cache.rows[r]);
    cache.probs[r] = sigmoid(cache.rows[r].logit);
  }
  cache.model = &model;
  cache.batch = &batch;
  return cache;
}

std::vector<double> forward(const RnnModel& model, const TokenBatch& batch) {
  return forward_pass(model, batch).probs;
}

double weighted_bce(const ForwardCache& cache, const TokenBatch& batch, const ClassWeights& w) {
  if (!cache.valid() || cache.rows.size() != batch.rows) throw DomainError("missing forward cache");
  double total = 0.0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const double y = batch.labels[r];
    const double wy = y > 0.5 ? w.positive : w.negative;
    const double z = cache.rows[r].logit;
    total += wy * (softplus(z) - y * z);
  }
  return total / static_cast<double>(batch.rows);
}

double backward(RnnModel& model, const TokenBatch& batch, const ForwardCache& cache,
                const ClassWeights& w) {
  if (!cache.valid() || cache.model != &model || cache.batch != &batch ||
      cache.rows.size() != batch.rows) {
    throw DomainError("missing forward cache for this model and batch");
  }
  const auto E = model.dims.embed_dim, H = model.dims.hidden, A = model.dims.attn_dim;
  model.zero_grad();
  const double inv_b = 1.0 / static_cast<double>(batch.rows);

  std::vector<double> dctx(2 * H), dH, dh_f, dh_b, dx, du(A), ht(2 * H);
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const auto& row = cache.rows[r];
    const std::size_t T = row.length;
    const double y = batch.labels[r];
    const double wy = y > 0.5 ? w.positive : w.negative;
    const double dz = wy * (sigmoid(row.logit) - y) * inv_b;
    if (dz == 0.0) continue;

    for (std::size_t k = 0; k < 2 * H; ++k) {
      model.out_w.grad()[k] += dz * row.context[k];
      dctx[k] = dz * model.out_w[k];
    }
    model.out_b.grad()[0] += dz;

    // Context and softmax.
    dH.assign(T * 2 * H, 0.0);
    std::vector<double> dalpha(T, 0.0);
    double weighted = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      double s = 0.0;
      for (std::size_t k = 0; k < H; ++k) {
        s += dctx[k] * row.fwd.h[t * H + k] + dctx[H + k] * row.bwd.h[t * H + k];
        dH[t * 2 * H + k] = row.alpha[t] * dctx[k];
        dH[t * 2 * H + H + k] = row.alpha[t] * dctx[H + k];
      }
      dalpha[t] = s;
      weighted += row.alpha[t] * s;
    }
    for (std::size_t t = 0; t < T; ++t) {
      const double de = row.alpha[t] * (dalpha[t] - weighted);
      const double* u = &row.u[t * A];
      for (std::size_t a = 0; a < A; ++a) {
        model.attention.v.grad()[a] += de * u[a];
        du[a] = de * model.attention.v[a] * (1.0 - u[a] * u[a]);
      }
      std::copy_n(&row.fwd.h[t * H], H, ht.begin());
      std::copy_n(&row.bwd.h[t * H], H, ht.begin() + static_cast<std::ptrdiff_t>(H));
      ger(model.attention.W.grad().data(), A, 2 * H, du.data(), ht.data());
      gemv_t(model.attention.W.data().data(), A, 2 * H, du.data(), &dH[t * 2 * H]);
    }

    // Split per direction and run BPTT.
    dh_f.assign(T * H, 0.0);
    dh_b.assign(T * H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      std::copy_n(&dH[t * 2 * H], H, &dh_f[t * H]);
      std::copy_n(&dH[t * 2 * H + H], H, &dh_b[t * H]);
    }
    dx.assign(T * E, 0.0);
    backprop_direction(model.forward_cell, model.forward_cell, E, H, T, row.x, row.fwd, false, dh_f, dx);
    backprop_direction(model.backward_cell, model.backward_cell, E, H, T, row.x, row.bwd, true, dh_b, dx);

    const auto ids = row_ids(batch, r);
    for (std::size_t t = 0; t < T; ++t) {
      auto g = model.embedding.grad_row(ids[t]);
      for (std::size_t k = 0; k < E; ++k) g[k] += dx[t * E + k];
    }
  }
  auto pad = model.embedding.grad_row(0);
  std::fill(pad.begin(), pad.end(), 0.0);
  return weighted_bce(cache, batch, w);
}

namespace {

double sequence_logit(const RnnModel& model, std::span<const TokenId> ids) {
  if (ids.empty()) return model.out_b[0];
  ForwardCache::Row row;
  forward_row(model, ids.first(std::min(ids.size(), model.dims.max_len)), row);
  return row.logit;
}

}  // namespace

double predict_sequence(const RnnModel& model, std::span<const TokenId> ids) {
  return sigmoid(sequence_logit(model, ids));
}

std::vector<double> attention_weights(const RnnModel& model, std::span<const TokenId> ids) {
  if (ids.empty()) throw DomainError("attention over an empty sequence");
  ForwardCache::Row row;
  forward_row(model, ids.first(std::min(ids.size(), model.dims.max_len)), row);
  return row.alpha;
}

Adam::Adam(RnnModel& model, AdamConfig cfg) : model_(model), cfg_(cfg) {
  for (auto& [name, t] : model_.parameters()) {
    m_.emplace_back(t->size(), 0.0);
    v_.emplace_back(t->size(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  std::size_t p = 0;
  for (auto& [name, t] : model_.parameters()) {
    auto data = t->data();
    auto grad = t->grad();
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double g = grad[k];
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g;
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g * g;
      data[k] -= cfg_.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + cfg_.eps);
    }
    ++p;
  }
  auto pad = model_.embedding.row(0);
  std::fill(pad.begin(), pad.end(), 0.0);
}

namespace {

struct Scored {
  double loss = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

Scored score_examples(const RnnModel& model, const std::vector<EncodedExample>& data,
                      const ClassWeights& w) {
  Scored s;
  if (data.empty()) return s;
  std::vector<SentimentLabel> truth, pred;
  for (const auto& ex : data) {
    const double z = sequence_logit(model, ex.ids);
    const double p = sigmoid(z);
    const double y = ex.label == SentimentLabel::Positive ? 1.0 : 0.0;
    s.loss += w(ex.label) * (softplus(z) - y * z);
    truth.push_back(ex.label);
    pred.push_back(classify(p));
  }
  s.loss /= static_cast<double>(data.size());
  const auto m = classification_metrics(confusion(truth, pred));
  s.f1 = m.f1;
  s.accuracy = m.accuracy;
  return s;
}

}  // namespace

NeuralTrainResult train_rnn(const std::vector<EncodedExample>& train_in,
                            const std::vector<EncodedExample>& valid_in, std::size_t vocab_size,
                            const NeuralTrainConfig& cfg) {
  if (cfg.batch_size == 0 || cfg.epochs == 0) throw DomainError("invalid RNN training configuration");
  auto usable = [&](const std::vector<EncodedExample>& in) {
    std::vector<EncodedExample> out;
    for (const auto& ex : in) {
      if (ex.ids.empty()) continue;
      EncodedExample e = ex;
      if (e.ids.size() > cfg.dims.max_len) e.ids.resize(cfg.dims.max_len);
      out.push_back(std::move(e));
    }
    return out;
  };
  const auto train = usable(train_in);
  const auto valid = valid_in.empty() ? train : usable(valid_in);
  {
    std::vector<SentimentLabel> y;
    for (const auto& ex : train) y.push_back(ex.label);
    class_weights(y);  // both classes present
  }

  NeuralTrainResult result{RnnModel::init(vocab_size, cfg.dims, cfg.seed), 0.0, 0, false, {}};
  RnnModel model = result.model;
  Adam adam(model, cfg.adam);
  Rng shuffle_rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  const ClassWeights unit{};

  result.initial_loss = score_examples(model, train, cfg.class_weights).loss;
  Scored best{-1.0, -1.0, 0.0};
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::vector<TokenId>> seqs;
  std::vector<SentimentLabel> labels;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_no) {
      seqs.clear();
      labels.clear();
      for (std::size_t k = start; k < std::min(order.size(), start + cfg.batch_size); ++k) {
        seqs.push_back(train[order[k]].ids);
        labels.push_back(train[order[k]].label);
      }
      const auto batch = make_batch(seqs, labels, cfg.dims.max_len);
      const auto cache = forward_pass(model, batch);
      const double loss = backward(model, batch, cache, cfg.class_weights);
      if (!std::isfinite(loss)) {
        throw DomainError("RNN training diverged at epoch " + std::to_string(epoch) + ", batch " +
                          std::to_string(batch_no));
      }
      adam.step();
    }

    NeuralEpoch rec;
    rec.epoch = epoch;
    rec.train_loss = score_examples(model, train, cfg.class_weights).loss;
    const auto v = score_examples(model, valid, unit);
    rec.valid_loss = v.loss;
    rec.valid_f1 = v.f1;
    rec.valid_accuracy = v.accuracy;
    result.log.push_back(rec);

    const bool improved = v.f1 > best.f1 || (v.f1 == best.f1 && v.loss < best.loss);
    if (improved) {
      best = v;
      result.model = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace sentiment
