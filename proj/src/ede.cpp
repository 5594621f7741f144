#include "edeen/ede.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "edeen/error.hpp"
#include "edeen/rng.hpp"

namespace edeen {
namespace {

std::vector<ConstNamedTensor> prefixed(const Stage& stage, const std::string& prefix) {
  std::vector<ConstNamedTensor> out = stage.parameters();
  for (auto& t : out) t.name = prefix + t.name;
  return out;
}

void check_input(const EdeNet& net, const Matrix& x) {
  if (x.cols() != net.spec().input_dim)
    throw ShapeError("expected " + std::to_string(net.spec().input_dim) + " features, got " +
                     std::to_string(x.cols()));
}

// Per-sample coefficient multiplying (alpha Lr_j + beta Le_j).
std::vector<double> sample_coefficients(std::size_t batch,
                                        std::optional<std::span<const double>> weights) {
  if (!weights) return std::vector<double>(batch, 1.0 / static_cast<double>(batch));
  if (weights->size() != batch)
    throw PreconditionError("combined_loss: " + std::to_string(weights->size()) +
                            " weights for a batch of " + std::to_string(batch));
  double total = 0.0;
  for (double w : *weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw PreconditionError("combined_loss: weights must be finite and nonnegative");
    total += w;
  }
  if (total == 0.0) throw DegenerateWeightsError("combined_loss: all sample weights are zero");
  std::vector<double> c(weights->begin(), weights->end());
  for (double& v : c) v /= total;
  return c;
}

}  // namespace

EdeNet::EdeNet(ArchSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)),
      seed_(seed),
      e1_(Stage::encoder(spec_)),
      dec_(Stage::decoder(spec_)),
      e2_(Stage::encoder(spec_)) {
  Rng rng(seed);
  e1_.initialize(rng);
  dec_.initialize(rng);
  e2_.initialize(rng);
}

EdeNet EdeNet::zeros(ArchSpec spec, std::uint64_t seed) {
  EdeNet net;
  net.spec_ = std::move(spec);
  net.seed_ = seed;
  net.e1_ = Stage::encoder(net.spec_);
  net.dec_ = Stage::decoder(net.spec_);
  net.e2_ = Stage::encoder(net.spec_);
  return net;
}

EdeForward EdeNet::forward(const Matrix& x) const {
  check_input(*this, x);
  EdeForward f;
  f.z = e1_.forward(x, nullptr);
  f.x_recon = dec_.forward(f.z, nullptr);
  f.z_prime = e2_.forward(f.x_recon, nullptr);
  return f;
}

std::vector<ConstNamedTensor> EdeNet::parameters() const {
  std::vector<ConstNamedTensor> out = prefixed(e1_, "e1.");
  for (auto& t : prefixed(dec_, "d.")) out.push_back(std::move(t));
  for (auto& t : prefixed(e2_, "e2.")) out.push_back(std::move(t));
  return out;
}

std::vector<NamedTensor> EdeNet::mutable_parameters() {
  std::vector<NamedTensor> out;
  for (const ConstNamedTensor& t : std::as_const(*this).parameters())
    out.push_back({t.name, {const_cast<double*>(t.values.data()), t.values.size()}});
  return out;
}

std::vector<std::size_t> EdeNet::parameter_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& t : parameters()) sizes.push_back(t.values.size());
  return sizes;
}

bool operator==(const EdeNet& a, const EdeNet& b) {
  if (!(a.spec_ == b.spec_)) return false;
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i)
    if (pa[i].name != pb[i].name || !std::ranges::equal(pa[i].values, pb[i].values)) return false;
  return true;
}

GradientList EdeGradients::flatten() const {
  GradientList out = encoder;
  out.insert(out.end(), decoder.begin(), decoder.end());
  out.insert(out.end(), reencoder.begin(), reencoder.end());
  return out;
}

std::vector<double> reconstruction_loss(const Matrix& x, const Matrix& x_recon) {
  return row_distances(x, x_recon);
}

std::vector<double> encoding_loss(const Matrix& z, const Matrix& z_prime) {
  return row_distances(z, z_prime);
}

double combined_loss(const EdeNet& net, const Matrix& x,
                     std::optional<std::span<const double>> weights) {
  check_input(net, x);
  const std::vector<double> coef = sample_coefficients(x.rows(), weights);
  const EdeForward f = net.forward(x);
  const std::vector<double> lr = reconstruction_loss(x, f.x_recon);
  const std::vector<double> le = encoding_loss(f.z, f.z_prime);
  double total = 0.0;
  for (std::size_t j = 0; j < x.rows(); ++j)
    total += coef[j] * (net.spec().alpha * lr[j] + net.spec().beta * le[j]);
  return total;
}

LossAndGradients loss_and_gradients(const EdeNet& net, const Matrix& x,
                                    std::optional<std::span<const double>> weights) {
  check_input(net, x);
  const std::size_t batch = x.rows();
  const std::vector<double> coef = sample_coefficients(batch, weights);
  const double alpha = net.spec().alpha;
  const double beta = net.spec().beta;

  StageCache c1, cd, c2;
  const Matrix z = net.encoder().forward(x, &c1);
  const Matrix xr = net.decoder().forward(z, &cd);
  const Matrix zp = net.reencoder().forward(xr, &c2);
  const std::vector<double> lr = reconstruction_loss(x, xr);
  const std::vector<double> le = encoding_loss(z, zp);

  LossAndGradients out;
  for (std::size_t j = 0; j < batch; ++j) {
    out.loss.reconstruction += coef[j] * lr[j];
    out.loss.encoding += coef[j] * le[j];
  }
  out.loss.combined = alpha * out.loss.reconstruction + beta * out.loss.encoding;

  // dL/dz' and the direct dL/dz from the encoding term; dL/dx' from Lr.
  Matrix grad_zp(batch, z.cols());
  Matrix grad_z_direct(batch, z.cols());
  Matrix grad_xr(batch, x.cols());
  for (std::size_t j = 0; j < batch; ++j) {
    if (le[j] > 0.0) {
      const double s = coef[j] * beta / le[j];
      for (std::size_t k = 0; k < z.cols(); ++k) {
        const double d = s * (z(j, k) - zp(j, k));
        grad_z_direct(j, k) = d;
        grad_zp(j, k) = -d;
      }
    }
    if (lr[j] > 0.0) {
      const double s = coef[j] * alpha / lr[j];
      for (std::size_t k = 0; k < x.cols(); ++k) grad_xr(j, k) = -s * (x(j, k) - xr(j, k));
    }
  }

  out.grads.encoder = net.encoder().zero_gradients();
  out.grads.decoder = net.decoder().zero_gradients();
  out.grads.reencoder = net.reencoder().zero_gradients();

  const Matrix grad_xr_from_e2 = net.reencoder().backward(c2, grad_zp, out.grads.reencoder);
  for (std::size_t i = 0; i < grad_xr.size(); ++i)
    grad_xr.values()[i] += grad_xr_from_e2.values()[i];
  Matrix grad_z = net.decoder().backward(cd, grad_xr, out.grads.decoder);
  for (std::size_t i = 0; i < grad_z.size(); ++i) grad_z.values()[i] += grad_z_direct.values()[i];
  net.encoder().backward(c1, grad_z, out.grads.encoder);
  return out;
}

void apply_gradients(EdeNet& net, AdamState& state, const EdeGradients& grads) {
  std::vector<std::span<double>> params;
  for (const NamedTensor& t : net.mutable_parameters()) params.push_back(t.values);
  const GradientList flat = grads.flatten();
  state.update(params, flat);
}

std::vector<double> anomaly_score(const EdeNet& net, const Matrix& x) {
  const EdeForward f = net.forward(x);
  return encoding_loss(f.z, f.z_prime);
}

std::vector<double> normalize_scores(std::span<const double> raw) {
  if (raw.empty()) throw PreconditionError("normalize_scores: empty score vector");
  const auto [lo, hi] = std::ranges::minmax_element(raw);
  const double min = *lo;
  const double range = *hi - min;
  std::vector<double> out(raw.size(), 0.0);
  if (range > 0.0)
    for (std::size_t i = 0; i < raw.size(); ++i)
      out[i] = std::clamp((raw[i] - min) / range, 0.0, 1.0);
  return out;
}

}  // namespace edeen
