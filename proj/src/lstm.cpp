#include "edeen/lstm.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "edeen/error.hpp"
#include "edeen/kernels.hpp"
#include "edeen/rng.hpp"

namespace edeen {
namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::uint64_t fnv1a(std::uint64_t h, std::span<const double> values) {
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace

LstmCell::LstmCell(std::size_t in, std::size_t hidden)
    : input_dim(in), hidden_dim(hidden), weights(in + hidden, 4 * hidden), bias(4 * hidden, 0.0) {}

void LstmCell::initialize(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(input_dim + hidden_dim));
  for (double& w : weights.values()) w = rng.uniform(-bound, bound);
  for (std::size_t k = 0; k < bias.size(); ++k) {
    const bool forget = k >= hidden_dim && k < 2 * hidden_dim;
    bias[k] = forget ? 1.0 : 0.0;
  }
}

std::uint64_t parameter_fingerprint(const LstmCell& cell) noexcept {
  return fnv1a(fnv1a(0xcbf29ce484222325ULL, cell.weights.values()), cell.bias);
}

LstmForward lstm_forward(const LstmCell& cell, const std::vector<Matrix>& sequence,
                         const Matrix& h0, const Matrix& c0) {
  if (sequence.empty()) throw PreconditionError("lstm_forward: empty sequence");
  const std::size_t in = cell.input_dim;
  const std::size_t hd = cell.hidden_dim;
  if (cell.weights.rows() != in + hd || cell.weights.cols() != 4 * hd || cell.bias.size() != 4 * hd)
    throw ShapeError("lstm_forward: cell parameters inconsistent with declared dims");
  const std::size_t batch = sequence.front().rows();
  if (h0.rows() != batch || h0.cols() != hd || c0.rows() != batch || c0.cols() != hd)
    throw ShapeError("lstm_forward: initial state must be " + std::to_string(batch) + "x" +
                     std::to_string(hd));

  LstmForward out;
  LstmCache& cache = out.cache;
  cache.input_dim = in;
  cache.hidden_dim = hd;
  cache.batch = batch;
  cache.fingerprint = parameter_fingerprint(cell);
  cache.c0 = c0;

  Matrix h = h0;
  Matrix c = c0;
  for (const Matrix& x : sequence) {
    if (x.rows() != batch || x.cols() != in)
      throw ShapeError("lstm_forward: sequence element must be " + std::to_string(batch) + "x" +
                       std::to_string(in));
    Matrix concat(batch, in + hd);
    for (std::size_t r = 0; r < batch; ++r) {
      auto dst = concat.row(r);
      std::copy(x.row(r).begin(), x.row(r).end(), dst.begin());
      std::copy(h.row(r).begin(), h.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(in));
    }
    Matrix gates = matmul(concat, cell.weights);
    Matrix next_c(batch, hd);
    Matrix c_tanh(batch, hd);
    Matrix next_h(batch, hd);
    for (std::size_t r = 0; r < batch; ++r) {
      auto g = gates.row(r);
      kernels::add(cell.bias.data(), g.data(), g.size());
      for (std::size_t k = 0; k < hd; ++k) {
        const double ig = sigmoid(g[k]);
        const double fg = sigmoid(g[hd + k]);
        const double cg = std::tanh(g[2 * hd + k]);
        const double og = sigmoid(g[3 * hd + k]);
        g[k] = ig;
        g[hd + k] = fg;
        g[2 * hd + k] = cg;
        g[3 * hd + k] = og;
        const double cn = fg * c(r, k) + ig * cg;
        next_c(r, k) = cn;
        c_tanh(r, k) = std::tanh(cn);
        next_h(r, k) = og * c_tanh(r, k);
      }
    }
    cache.concat.push_back(std::move(concat));
    cache.gates.push_back(std::move(gates));
    cache.cell.push_back(next_c);
    cache.cell_tanh.push_back(std::move(c_tanh));
    out.hidden.push_back(next_h);
    h = std::move(next_h);
    c = std::move(next_c);
  }
  out.final_cell = std::move(c);
  return out;
}

LstmGradients lstm_backward(const LstmCell& cell, const LstmCache& cache,
                            const std::vector<Matrix>& grad_hidden) {
  const std::size_t in = cell.input_dim;
  const std::size_t hd = cell.hidden_dim;
  const std::size_t steps = cache.gates.size();
  if (steps == 0 || cache.input_dim != in || cache.hidden_dim != hd ||
      cache.fingerprint != parameter_fingerprint(cell))
    throw PreconditionError("lstm_backward: cache does not belong to this cell");
  if (grad_hidden.size() != steps)
    throw PreconditionError("lstm_backward: expected " + std::to_string(steps) +
                            " hidden-state gradients, got " + std::to_string(grad_hidden.size()));
  const std::size_t batch = cache.batch;
  for (const Matrix& g : grad_hidden)
    if (g.rows() != batch || g.cols() != hd) throw ShapeError("lstm_backward: gradient shape");

  LstmGradients grads;
  grads.weights = Matrix(in + hd, 4 * hd);
  grads.bias.assign(4 * hd, 0.0);
  grads.inputs.resize(steps);

  Matrix dh_next(batch, hd);
  Matrix dc_next(batch, hd);
  for (std::size_t step = steps; step-- > 0;) {
    const Matrix& gates = cache.gates[step];
    const Matrix& c_tanh = cache.cell_tanh[step];
    const Matrix& c_prev = step == 0 ? cache.c0 : cache.cell[step - 1];
    Matrix dpre(batch, 4 * hd);
    for (std::size_t r = 0; r < batch; ++r) {
      for (std::size_t k = 0; k < hd; ++k) {
        const double ig = gates(r, k);
        const double fg = gates(r, hd + k);
        const double cg = gates(r, 2 * hd + k);
        const double og = gates(r, 3 * hd + k);
        const double tc = c_tanh(r, k);
        const double dh = grad_hidden[step](r, k) + dh_next(r, k);
        const double dog = dh * tc;
        const double dc = dh * og * (1.0 - tc * tc) + dc_next(r, k);
        dpre(r, k) = dc * cg * ig * (1.0 - ig);
        dpre(r, hd + k) = dc * c_prev(r, k) * fg * (1.0 - fg);
        dpre(r, 2 * hd + k) = dc * ig * (1.0 - cg * cg);
        dpre(r, 3 * hd + k) = dog * og * (1.0 - og);
        dc_next(r, k) = dc * fg;
      }
      kernels::add(dpre.row(r).data(), grads.bias.data(), 4 * hd);
    }
    const Matrix dw = matmul_tn(cache.concat[step], dpre);
    kernels::add(dw.values().data(), grads.weights.values().data(), dw.size());
    const Matrix dconcat = matmul_nt(dpre, cell.weights);
    Matrix dx(batch, in);
    for (std::size_t r = 0; r < batch; ++r) {
      auto src = dconcat.row(r);
      std::copy_n(src.begin(), in, dx.row(r).begin());
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(in), hd, dh_next.row(r).begin());
    }
    grads.inputs[step] = std::move(dx);
  }
  grads.h0 = std::move(dh_next);
  grads.c0 = std::move(dc_next);
  return grads;
}

}  // namespace edeen
