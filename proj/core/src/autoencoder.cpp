#include "abc/autoencoder.hpp"

#include <algorithm>

#include "abc/errors.hpp"
#include "abc/rng.hpp"

namespace abc {

void validate(const AutoencoderParams& ae) {
  if (ae.encoder.layers.empty() || ae.decoder.layers.empty())
    throw ShapeError("autoencoder: encoder and decoder must have layers");
  if (ae.encoder.output_dim() != ae.decoder.input_dim())
    throw ShapeError("autoencoder: encoder latent dim " +
                     std::to_string(ae.encoder.output_dim()) +
                     " != decoder input dim " + std::to_string(ae.decoder.input_dim()));
  if (ae.decoder.output_dim() != ae.encoder.input_dim())
    throw ShapeError("autoencoder: decoder output dim " +
                     std::to_string(ae.decoder.output_dim()) +
                     " != encoder input dim " + std::to_string(ae.encoder.input_dim()));
}

AutoencoderParams make_autoencoder(std::size_t data_dim,
                                   const std::vector<std::size_t>& hidden,
                                   std::size_t latent,
                                   std::uint64_t seed) {
  if (data_dim == 0) throw ConfigError("make_autoencoder: data_dim must be positive");
  if (latent == 0) throw ConfigError("make_autoencoder: latent must be positive");
  for (std::size_t h : hidden)
    if (h == 0) throw ConfigError("make_autoencoder: zero hidden size");

  std::vector<std::size_t> enc_sizes;
  enc_sizes.push_back(data_dim);
  enc_sizes.insert(enc_sizes.end(), hidden.begin(), hidden.end());
  enc_sizes.push_back(latent);
  std::vector<Activation> enc_acts(hidden.size(), Activation::Tanh);
  enc_acts.push_back(Activation::Identity);  // latent layer is linear

  std::vector<std::size_t> dec_sizes;
  dec_sizes.push_back(latent);
  dec_sizes.insert(dec_sizes.end(), hidden.rbegin(), hidden.rend());
  dec_sizes.push_back(data_dim);
  std::vector<Activation> dec_acts(hidden.size(), Activation::Tanh);
  dec_acts.push_back(Activation::Identity);  // output is unbounded data space

  AutoencoderParams ae;
  ae.encoder = init_network(enc_sizes, enc_acts, Rng::derive_seed(seed, 0));
  ae.decoder = init_network(dec_sizes, dec_acts, Rng::derive_seed(seed, 1));
  return ae;
}

ReconTrace reconstruct(const AutoencoderParams& ae, std::span<const double> input) {
  validate(ae);
  ReconTrace trace;
  trace.encoder = forward(ae.encoder, input);
  trace.decoder = forward(ae.decoder, trace.encoder.output());
  return trace;
}

AutoencoderGrads recon_backward(const AutoencoderParams& ae, const ReconTrace& trace,
                                std::span<const double> output_grad) {
  AutoencoderGrads grads;
  auto [dec_grads, latent_grad] = backward(ae.decoder, trace.decoder, output_grad);
  auto [enc_grads, input_grad] = backward(ae.encoder, trace.encoder, latent_grad);
  (void)input_grad;
  grads.decoder = std::move(dec_grads);
  grads.encoder = std::move(enc_grads);
  return grads;
}

}  // namespace abc
