#include "edeen/arch.hpp"

#include <algorithm>

#include "edeen/error.hpp"

namespace edeen {

std::string to_string(EncoderKind kind) {
  return kind == EncoderKind::Lstm ? "lstm" : "feedforward";
}

EncoderKind encoder_kind_from_string(const std::string& s) {
  if (s == "feedforward") return EncoderKind::FeedForward;
  if (s == "lstm") return EncoderKind::Lstm;
  throw FormatError("unknown encoder kind '" + s + "'");
}

void ArchSpec::validate() const {
  if (input_dim == 0) throw PreconditionError("arch: input_dim must be positive");
  if (latent_dim < 1 || latent_dim > input_dim)
    throw PreconditionError("arch: latent_dim must lie in [1, input_dim]");
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta > 0.0))
    throw PreconditionError("arch: alpha and beta must be nonnegative with a positive sum");
  if (encoder_kind == EncoderKind::FeedForward) {
    // Two hidden widths give the three fully connected layers per stack.
    if (hidden_sizes.size() != 2)
      throw PreconditionError("arch: feed-forward stacks need exactly two hidden widths");
    if (std::ranges::any_of(hidden_sizes, [](std::size_t h) { return h == 0; }))
      throw PreconditionError("arch: hidden widths must be positive");
  } else {
    if (recurrent_layers == 0 || lstm_hidden == 0 || seq_len == 0)
      throw PreconditionError("arch: lstm layers, hidden size and seq_len must be positive");
    if (seq_len > input_dim) throw PreconditionError("arch: seq_len exceeds input_dim");
  }
}

std::size_t default_latent_dim(std::size_t input_dim) noexcept {
  return std::max<std::size_t>(1, input_dim / 4);
}

ArchSpec make_feedforward_spec(std::size_t input_dim, std::size_t latent_dim) {
  ArchSpec spec;
  spec.input_dim = input_dim;
  spec.latent_dim = latent_dim ? latent_dim : default_latent_dim(input_dim);
  return spec;
}

ArchSpec make_lstm_spec(std::size_t input_dim, std::size_t hidden, std::size_t seq_len,
                        std::size_t layers, std::size_t latent_dim) {
  ArchSpec spec;
  spec.input_dim = input_dim;
  spec.latent_dim = latent_dim ? latent_dim : default_latent_dim(input_dim);
  spec.encoder_kind = EncoderKind::Lstm;
  spec.lstm_hidden = hidden;
  spec.seq_len = seq_len;
  spec.recurrent_layers = layers;
  return spec;
}

}  // namespace edeen
