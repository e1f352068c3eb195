#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abc/network.hpp"

namespace abc {

/// Encoder-decoder pair. The encoder compresses a data point into the latent
/// representation, the decoder maps it back to data space.
struct AutoencoderParams {
  NetworkParams encoder;
  NetworkParams decoder;

  std::size_t data_dim() const { return encoder.input_dim(); }
  std::size_t latent_dim() const { return encoder.output_dim(); }
};

struct AutoencoderGrads {
  NetworkGrads encoder;
  NetworkGrads decoder;
};

/// Traces of one encode-decode pass, enough to run the chained backward.
struct ReconTrace {
  ForwardTrace encoder;
  ForwardTrace decoder;

  const std::vector<double>& reconstruction() const { return decoder.output(); }
};

/// Throws ShapeError unless encoder/decoder dimensions chain correctly
/// (latent dims equal, decoder output == encoder input).
void validate(const AutoencoderParams& ae);

/// Symmetric architecture: encoder [data, hidden..., latent], decoder
/// [latent, reversed hidden..., data]. Hidden activations tanh; the latent
/// and the reconstruction are linear, so outputs are unbounded in data space.
AutoencoderParams make_autoencoder(std::size_t data_dim,
                                   const std::vector<std::size_t>& hidden,
                                   std::size_t latent,
                                   std::uint64_t seed);

ReconTrace reconstruct(const AutoencoderParams& ae, std::span<const double> input);

/// Chain rule across the pair given d(loss)/d(reconstruction).
AutoencoderGrads recon_backward(const AutoencoderParams& ae, const ReconTrace& trace,
                                std::span<const double> output_grad);

}  // namespace abc
