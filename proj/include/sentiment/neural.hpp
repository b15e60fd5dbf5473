#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentiment/features.hpp"
#include "sentiment/ingest.hpp"
#include "sentiment/resample.hpp"
#include "sentiment/tensor.hpp"

namespace sentiment {

using TokenId = std::uint32_t;  // 0 is padding; vocabulary index i maps to i + 1

struct RnnDims {
  std::size_t embed_dim = 64;
  std::size_t hidden = 64;  // per direction
  std::size_t attn_dim = 64;
  std::size_t max_len = 128;
};

/// Gate blocks are stacked in the order input, forget, output, candidate:
/// W is (4H x E), U is (4H x H), b is (4H).
struct LstmCellParams {
  Tensor W, U, b;
};

/// e_t = v . tanh(W h_t); W is (A x 2H), v is (A).
struct AttentionParams {
  Tensor W, v;
};

struct RnnModel {
  RnnDims dims;
  std::size_t vocab_size = 0;  // embedding has vocab_size + 1 rows
  Tensor embedding;
  LstmCellParams forward_cell, backward_cell;
  AttentionParams attention;
  Tensor out_w;  // (2H)
  Tensor out_b;  // (1)

  /// Glorot-uniform matrices, zero biases except forget gates at 1, zero
  /// output head, zero padding row.
  static RnnModel init(std::size_t vocab_size, const RnnDims& dims, std::uint64_t seed);

  /// Every trainable tensor with a stable name, in serialization order.
  std::vector<std::pair<std::string, Tensor*>> parameters();
  std::vector<std::pair<std::string, const Tensor*>> parameters() const;

  void zero_grad();

  std::string to_json(const std::string& vocab_ref) const;
  static std::pair<RnnModel, std::string> from_json(const std::string& text);
};

/// Maps tokens to ids, dropping out-of-vocabulary tokens and truncating the
/// tail beyond max_len.
std::vector<TokenId> encode(const Vocabulary& vocab, const TokenSequence& tokens, std::size_t max_len);

/// Right-padded batch. Every row has at least one real token.
struct TokenBatch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<TokenId> ids;       // rows x width
  std::vector<std::uint8_t> mask; // rows x width
  std::vector<double> labels;     // 0 or 1 per row
  std::vector<std::size_t> lengths;

  TokenId id(std::size_t r, std::size_t t) const { return ids[r * width + t]; }
};

/// Pads to the longest row. Raises DomainError for empty rows, a row longer
/// than max_len, or a padding id inside a row.
TokenBatch make_batch(const std::vector<std::vector<TokenId>>& seqs,
                      const std::vector<SentimentLabel>& labels, std::size_t max_len);

/// batch x width x E
Tensor embed(const RnnModel& model, const TokenBatch& batch);

struct LstmState {
  std::vector<double> h, c;
};

LstmState lstm_step(std::span<const double> x, std::span<const double> h_prev,
                    std::span<const double> c_prev, const LstmCellParams& cell);

/// batch x width x 2H; rows past each sequence's length are zero.
Tensor bilstm(const RnnModel& model, const Tensor& embedded, const TokenBatch& batch);

struct AttentionOutput {
  Tensor context;  // batch x 2H
  Tensor alphas;   // batch x width
};

AttentionOutput attention(const RnnModel& model, const Tensor& hidden, const TokenBatch& batch);

/// Intermediates of one forward pass, consumed by backward().
struct ForwardCache {
  struct Direction {
    std::vector<double> gates;  // T x 4H, post-activation (i, f, o, g)
    std::vector<double> c;      // T x H
    std::vector<double> tanh_c; // T x H
    std::vector<double> h;      // T x H
  };
  struct Row {
    std::size_t length = 0;
    std::vector<double> x;      // T x E
    Direction fwd, bwd;         // bwd stored in sequence order
    std::vector<double> u;      // T x A, tanh(W_a h_t)
    std::vector<double> alpha;  // T
    std::vector<double> context;
    double logit = 0.0;
  };
  std::vector<Row> rows;
  std::vector<double> probs;
  const RnnModel* model = nullptr;
  const TokenBatch* batch = nullptr;

  bool valid() const { return model != nullptr; }
};

ForwardCache forward_pass(const RnnModel& model, const TokenBatch& batch);

/// Positive-class probability for each batch row.
std::vector<double> forward(const RnnModel& model, const TokenBatch& batch);

/// Weighted BCE: -mean(w_y (y ln p + (1 - y) ln(1 - p))), from logits.
double weighted_bce(const ForwardCache& cache, const TokenBatch& batch, const ClassWeights& w);

/// Writes exact gradients of weighted_bce into every parameter's grad slot
/// (overwriting) and returns the loss. The padding row gradient is zero.
double backward(RnnModel& model, const TokenBatch& batch, const ForwardCache& cache,
                const ClassWeights& w);

/// Probability for one encoded sequence. An empty sequence takes the
/// bias-only path sigma(b_out).
double predict_sequence(const RnnModel& model, std::span<const TokenId> ids);

/// Attention weights for one non-empty encoded sequence.
std::vector<double> attention_weights(const RnnModel& model, std::span<const TokenId> ids);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(RnnModel& model, AdamConfig cfg);
  /// Applies one update from the current grad slots.
  void step();

 private:
  RnnModel& model_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

struct NeuralTrainConfig {
  RnnDims dims;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  AdamConfig adam;
  ClassWeights class_weights;
  std::uint64_t seed = 0;
  std::size_t patience = 3;  // 0 disables early stopping
};

struct EncodedExample {
  std::vector<TokenId> ids;
  SentimentLabel label = SentimentLabel::Negative;
};

struct NeuralEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double valid_loss = 0.0;
  double valid_f1 = 0.0;
  double valid_accuracy = 0.0;
};

struct NeuralTrainResult {
  RnnModel model;
  double initial_loss = 0.0;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
  std::vector<NeuralEpoch> log;
};

/// Adam on seeded, reshuffled mini-batches. After each epoch the model is
/// scored on `valid`; the best model by validation F1 (ties broken by lower
/// validation loss) is returned. Examples with no in-vocabulary tokens are
/// skipped. Raises DomainError when the loss becomes non-finite.
NeuralTrainResult train_rnn(const std::vector<EncodedExample>& train,
                            const std::vector<EncodedExample>& valid, std::size_t vocab_size,
                            const NeuralTrainConfig& cfg);

}  // namespace sentiment
