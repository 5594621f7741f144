#include "edeen/stage.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "edeen/error.hpp"
#include "edeen/kernels.hpp"
#include "edeen/rng.hpp"

namespace edeen {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void accumulate(std::vector<double>& dst, std::span<const double> src) {
  if (dst.size() != src.size()) throw ShapeError("gradient accumulation size mismatch");
  kernels::add(src.data(), dst.data(), src.size());
}

void check_grad_slots(const GradientList& grads, std::size_t needed) {
  if (grads.size() != needed)
    throw ShapeError("gradient list has " + std::to_string(grads.size()) + " tensors, expected " +
                     std::to_string(needed));
}

std::vector<LstmCell> make_cells(std::size_t first_input, std::size_t hidden, std::size_t layers) {
  std::vector<LstmCell> cells;
  for (std::size_t l = 0; l < layers; ++l) cells.emplace_back(l == 0 ? first_input : hidden, hidden);
  return cells;
}

// Runs the stacked cells over `sequence`; returns the top layer's hidden states.
std::vector<Matrix> run_stack(const std::vector<LstmCell>& cells, std::vector<Matrix> sequence,
                              std::vector<LstmCache>* caches) {
  const std::size_t batch = sequence.front().rows();
  for (const LstmCell& cell : cells) {
    const Matrix zeros(batch, cell.hidden_dim);
    LstmForward f = lstm_forward(cell, sequence, zeros, zeros);
    if (caches) caches->push_back(std::move(f.cache));
    sequence = std::move(f.hidden);
  }
  return sequence;
}

// Backward through the stacked cells; returns gradients w.r.t. the bottom inputs.
std::vector<Matrix> unwind_stack(const std::vector<LstmCell>& cells,
                                 const std::vector<LstmCache>& caches,
                                 std::vector<Matrix> grad_hidden, GradientList& grads) {
  for (std::size_t l = cells.size(); l-- > 0;) {
    LstmGradients g = lstm_backward(cells[l], caches.at(l), grad_hidden);
    accumulate(grads[2 * l], g.weights.values());
    accumulate(grads[2 * l + 1], g.bias);
    grad_hidden = std::move(g.inputs);
  }
  return grad_hidden;
}

void append_cell_params(const std::vector<LstmCell>& cells, std::vector<ConstNamedTensor>& out) {
  for (std::size_t l = 0; l < cells.size(); ++l) {
    out.push_back({"lstm" + std::to_string(l) + ".weights", cells[l].weights.values()});
    out.push_back({"lstm" + std::to_string(l) + ".bias", cells[l].bias});
  }
}

}  // namespace

// ---- DenseStack -------------------------------------------------------------

Matrix DenseStack::forward(const Matrix& x, Cache* cache) const {
  Matrix h = x;
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(x);
  }
  for (const DenseLayer& layer : layers) {
    h = dense_forward(layer, h);
    if (cache) cache->activations.push_back(h);
  }
  return h;
}

Matrix DenseStack::backward(const Cache& cache, const Matrix& grad_out, GradientList& grads) const {
  check_grad_slots(grads, 2 * layers.size());
  if (cache.activations.size() != layers.size() + 1)
    throw PreconditionError("dense stack: cache does not match layer count");
  Matrix g = grad_out;
  for (std::size_t k = layers.size(); k-- > 0;) {
    DenseGradients lg =
        dense_backward(layers[k], cache.activations[k], cache.activations[k + 1], g);
    accumulate(grads[2 * k], lg.weights.values());
    accumulate(grads[2 * k + 1], lg.bias);
    g = std::move(lg.input);
  }
  return g;
}

std::vector<ConstNamedTensor> DenseStack::parameters() const {
  std::vector<ConstNamedTensor> out;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    out.push_back({"layer" + std::to_string(k) + ".weights", layers[k].weights.values()});
    out.push_back({"layer" + std::to_string(k) + ".bias", layers[k].bias});
  }
  return out;
}

// ---- LstmEncoder ------------------------------------------------------------

Matrix LstmEncoder::forward(const Matrix& x, Cache* cache) const {
  if (x.cols() != input_dim)
    throw ShapeError("lstm encoder: input has " + std::to_string(x.cols()) +
                     " columns, expected " + std::to_string(input_dim));
  const std::size_t w = chunk();
  std::vector<Matrix> sequence(seq_len, Matrix(x.rows(), w));
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t j = 0; j < input_dim; ++j) sequence[j / w](r, j % w) = x(r, j);

  std::vector<LstmCache>* caches = nullptr;
  if (cache) {
    cache->layers.clear();
    caches = &cache->layers;
  }
  std::vector<Matrix> top = run_stack(cells, std::move(sequence), caches);
  Matrix z = dense_forward(projection, top.back());
  if (cache) {
    cache->last_hidden = std::move(top.back());
    cache->latent = z;
  }
  return z;
}

Matrix LstmEncoder::backward(const Cache& cache, const Matrix& grad_out, GradientList& grads) const {
  check_grad_slots(grads, 2 * cells.size() + 2);
  if (cache.layers.size() != cells.size())
    throw PreconditionError("lstm encoder: cache does not match layer count");
  DenseGradients pg = dense_backward(projection, cache.last_hidden, cache.latent, grad_out);
  const std::size_t p = 2 * cells.size();
  accumulate(grads[p], pg.weights.values());
  accumulate(grads[p + 1], pg.bias);

  const std::size_t batch = grad_out.rows();
  const std::size_t hidden = cells.back().hidden_dim;
  std::vector<Matrix> grad_hidden(seq_len, Matrix(batch, hidden));
  grad_hidden.back() = std::move(pg.input);
  std::vector<Matrix> grad_chunks = unwind_stack(cells, cache.layers, std::move(grad_hidden), grads);

  const std::size_t w = chunk();
  Matrix gx(batch, input_dim);
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t j = 0; j < input_dim; ++j) gx(r, j) = grad_chunks[j / w](r, j % w);
  return gx;
}

std::vector<ConstNamedTensor> LstmEncoder::parameters() const {
  std::vector<ConstNamedTensor> out;
  append_cell_params(cells, out);
  out.push_back({"proj.weights", projection.weights.values()});
  out.push_back({"proj.bias", projection.bias});
  return out;
}

// ---- LstmDecoder ------------------------------------------------------------

Matrix LstmDecoder::forward(const Matrix& z, Cache* cache) const {
  if (cells.empty() || z.cols() != cells.front().input_dim)
    throw ShapeError("lstm decoder: latent width mismatch");
  std::vector<LstmCache>* caches = nullptr;
  if (cache) {
    cache->layers.clear();
    cache->chunks.clear();
    caches = &cache->layers;
  }
  std::vector<Matrix> top = run_stack(cells, std::vector<Matrix>(seq_len, z), caches);

  const std::size_t w = chunk();
  Matrix out(z.rows(), output_dim);
  for (std::size_t t = 0; t < seq_len; ++t) {
    Matrix piece = dense_forward(projection, top[t]);
    for (std::size_t r = 0; r < z.rows(); ++r)
      for (std::size_t j = 0; j < w && t * w + j < output_dim; ++j) out(r, t * w + j) = piece(r, j);
    if (cache) cache->chunks.push_back(std::move(piece));
  }
  if (cache) cache->top_hidden = std::move(top);
  return out;
}

Matrix LstmDecoder::backward(const Cache& cache, const Matrix& grad_out, GradientList& grads) const {
  check_grad_slots(grads, 2 * cells.size() + 2);
  if (cache.layers.size() != cells.size() || cache.top_hidden.size() != seq_len)
    throw PreconditionError("lstm decoder: cache does not match configuration");
  const std::size_t batch = grad_out.rows();
  const std::size_t w = chunk();
  const std::size_t p = 2 * cells.size();

  std::vector<Matrix> grad_hidden;
  grad_hidden.reserve(seq_len);
  for (std::size_t t = 0; t < seq_len; ++t) {
    Matrix gchunk(batch, w);
    for (std::size_t r = 0; r < batch; ++r)
      for (std::size_t j = 0; j < w && t * w + j < output_dim; ++j)
        gchunk(r, j) = grad_out(r, t * w + j);
    DenseGradients pg = dense_backward(projection, cache.top_hidden[t], cache.chunks[t], gchunk);
    accumulate(grads[p], pg.weights.values());
    accumulate(grads[p + 1], pg.bias);
    grad_hidden.push_back(std::move(pg.input));
  }
  std::vector<Matrix> grad_inputs = unwind_stack(cells, cache.layers, std::move(grad_hidden), grads);
  Matrix gz = grad_inputs.front();
  for (std::size_t t = 1; t < grad_inputs.size(); ++t)
    kernels::add(grad_inputs[t].values().data(), gz.values().data(), gz.size());
  return gz;
}

std::vector<ConstNamedTensor> LstmDecoder::parameters() const {
  std::vector<ConstNamedTensor> out;
  append_cell_params(cells, out);
  out.push_back({"proj.weights", projection.weights.values()});
  out.push_back({"proj.bias", projection.bias});
  return out;
}

// ---- Stage ------------------------------------------------------------------

Stage Stage::encoder(const ArchSpec& spec) {
  spec.validate();
  if (spec.encoder_kind == EncoderKind::FeedForward) {
    const std::size_t h1 = spec.hidden_sizes[0];
    const std::size_t h2 = spec.hidden_sizes[1];
    DenseStack s;
    s.layers.emplace_back(spec.input_dim, h1, Activation::Tanh);
    s.layers.emplace_back(h1, h2, Activation::Tanh);
    s.layers.emplace_back(h2, spec.latent_dim, Activation::Identity);
    return Stage(std::move(s));
  }
  LstmEncoder e;
  e.input_dim = spec.input_dim;
  e.seq_len = spec.seq_len;
  e.cells = make_cells(spec.chunk_width(), spec.lstm_hidden, spec.recurrent_layers);
  e.projection = DenseLayer(spec.lstm_hidden, spec.latent_dim, Activation::Identity);
  return Stage(std::move(e));
}

Stage Stage::decoder(const ArchSpec& spec) {
  spec.validate();
  if (spec.encoder_kind == EncoderKind::FeedForward) {
    const std::size_t h1 = spec.hidden_sizes[0];
    const std::size_t h2 = spec.hidden_sizes[1];
    DenseStack s;
    s.layers.emplace_back(spec.latent_dim, h2, Activation::Tanh);
    s.layers.emplace_back(h2, h1, Activation::Tanh);
    s.layers.emplace_back(h1, spec.input_dim, Activation::Identity);
    return Stage(std::move(s));
  }
  LstmDecoder d;
  d.output_dim = spec.input_dim;
  d.seq_len = spec.seq_len;
  d.cells = make_cells(spec.latent_dim, spec.lstm_hidden, spec.recurrent_layers);
  d.projection = DenseLayer(spec.lstm_hidden, spec.chunk_width(), Activation::Identity);
  return Stage(std::move(d));
}

void Stage::initialize(Rng& rng) {
  std::visit(Overloaded{
                 [&](DenseStack& s) {
                   for (DenseLayer& l : s.layers) l.initialize(rng);
                 },
                 [&](auto& s) {
                   for (LstmCell& c : s.cells) c.initialize(rng);
                   s.projection.initialize(rng);
                 },
             },
             body_);
}

Matrix Stage::forward(const Matrix& x, StageCache* cache) const {
  return std::visit(
      [&](const auto& s) -> Matrix {
        using Cache = typename std::decay_t<decltype(s)>::Cache;
        if (!cache) return s.forward(x, nullptr);
        *cache = Cache{};
        return s.forward(x, &std::get<Cache>(*cache));
      },
      body_);
}

Matrix Stage::backward(const StageCache& cache, const Matrix& grad_out, GradientList& grads) const {
  return std::visit(
      [&](const auto& s) -> Matrix {
        using Cache = typename std::decay_t<decltype(s)>::Cache;
        const Cache* c = std::get_if<Cache>(&cache);
        if (!c) throw PreconditionError("stage backward: cache belongs to a different stage type");
        return s.backward(*c, grad_out, grads);
      },
      body_);
}

std::vector<ConstNamedTensor> Stage::parameters() const {
  return std::visit([](const auto& s) { return s.parameters(); }, body_);
}

std::vector<NamedTensor> Stage::mutable_parameters() {
  std::vector<NamedTensor> out;
  for (const ConstNamedTensor& t : std::as_const(*this).parameters())
    out.push_back({t.name, {const_cast<double*>(t.values.data()), t.values.size()}});
  return out;
}

GradientList Stage::zero_gradients() const {
  GradientList g;
  for (const ConstNamedTensor& t : parameters()) g.emplace_back(t.values.size(), 0.0);
  return g;
}

}  // namespace edeen
