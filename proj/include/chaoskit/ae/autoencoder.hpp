#pragma once

#include "../io/json_io.hpp"
#include "../types.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace chaoskit::ae {

enum class Activation { sigmoid, linear, relu };

inline const char* activation_name(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::linear: return "linear";
    case Activation::relu: return "relu";
  }
  return "?";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "sigmoid") return Activation::sigmoid;
  if (s == "linear") return Activation::linear;
  if (s == "relu") return Activation::relu;
  throw config_error("unknown activation '" + s + "'");
}

inline void activate(Activation a, const Matrix& z, Matrix& out) {
  switch (a) {
    case Activation::sigmoid: out = (1.0 + (-z.array()).exp()).inverse().matrix(); break;
    case Activation::linear: out = z; break;
    case Activation::relu: out = z.cwiseMax(0.0); break;
  }
}

/// Multiplies `grad` in place by the activation derivative, given the
/// pre-activation `z` and output `a`.
inline void activation_backward(Activation act, const Matrix& z, const Matrix& a, Matrix& grad) {
  switch (act) {
    case Activation::sigmoid: grad.array() *= a.array() * (1.0 - a.array()); break;
    case Activation::linear: break;
    case Activation::relu: grad.array() *= (z.array() > 0.0).cast<double>(); break;
  }
}

struct LayerSpec {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::linear;
};

struct Layer {
  Activation activation = Activation::linear;
  Matrix weights;  // in x out
  RowVector bias;  // out

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights.cols()); }
};

/// Activations kept from a forward pass for the backward pass.
struct ForwardCache {
  std::vector<Matrix> inputs;  // input to each layer
  std::vector<Matrix> pre;     // pre-activation per layer
  std::vector<Matrix> out;     // output per layer (before latent noise)
  Matrix noise;                // added to the latent; empty when none
  std::uint64_t generation = 0;
  bool training = false;

  const Matrix& reconstruction() const { return out.back(); }
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<RowVector> bias;
};

/// Symmetric dense autoencoder. Encoder: in -> hidden... (sigmoid) -> latent
/// (linear). Decoder mirrors the hidden widths with sigmoid and ends in relu.
/// Gaussian noise is added to the latent in training mode.
struct MlpAutoencoder {
  std::vector<Layer> layers;
  std::size_t encoder_layers = 0;
  double latent_noise_sigma = 1.0 / std::sqrt(10.0);
  std::uint64_t rng_seed = 0;
  std::uint64_t generation = 0;  // bumped on every parameter change

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t latent_dim() const { return layers[encoder_layers - 1].out_dim(); }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.bias.size());
    return n;
  }

  std::vector<LayerSpec> specs() const {
    std::vector<LayerSpec> s;
    for (const auto& l : layers) s.push_back({l.in_dim(), l.out_dim(), l.activation});
    return s;
  }

  io::Json to_json() const {
    auto j = io::model_header("autoencoder");
    j["encoder_layers"] = encoder_layers;
    j["latent_noise_sigma"] = latent_noise_sigma;
    j["rng_seed"] = rng_seed;
    io::Json ls = io::Json::array();
    for (const auto& l : layers)
      ls.push_back({{"in_dim", l.in_dim()},
                    {"out_dim", l.out_dim()},
                    {"activation", activation_name(l.activation)},
                    {"weights", io::matrix_to_json(l.weights)},
                    {"bias", io::vector_to_json(l.bias)}});
    j["layers"] = ls;
    return j;
  }

  static MlpAutoencoder from_json(const io::Json& j) {
    io::check_header(j, "autoencoder");
    MlpAutoencoder m;
    m.encoder_layers = j.at("encoder_layers").get<std::size_t>();
    m.latent_noise_sigma = j.at("latent_noise_sigma").get<double>();
    m.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& jl : j.at("layers")) {
      Layer l;
      l.activation = activation_from_name(jl.at("activation").get<std::string>());
      l.weights = io::matrix_from_json(jl.at("weights"));
      l.bias = io::row_from_json(jl.at("bias"));
      m.layers.push_back(std::move(l));
    }
    m.validate();
    return m;
  }

  void validate() const {
    if (layers.empty() || encoder_layers == 0 || encoder_layers >= layers.size())
      throw data_error("autoencoder: needs at least one encoder and one decoder layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].weights.rows() < 1 || layers[i].weights.cols() < 1 || layers[i].bias.size() != layers[i].weights.cols())
        throw data_error("autoencoder: layer " + std::to_string(i) + " has inconsistent shapes");
      if (i > 0 && layers[i].in_dim() != layers[i - 1].out_dim())
        throw data_error("autoencoder: layer " + std::to_string(i) + " input does not match previous output");
    }
    if (layers.back().out_dim() != in_dim()) throw data_error("autoencoder: output width must equal input width");
  }
};

/// Layers for in -> hidden[0] -> ... -> latent -> ... -> hidden[0] -> in,
/// weights uniform in +-sqrt(6 / (fan_in + fan_out)).
inline MlpAutoencoder make_autoencoder(std::size_t in_dim, std::size_t latent_dim,
                                       const std::vector<std::size_t>& hidden = {512, 128},
                                       double latent_noise_sigma = 1.0 / std::sqrt(10.0), std::uint64_t seed = 0) {
  if (in_dim == 0 || latent_dim == 0) throw config_error("autoencoder: dimensions must be positive");
  for (auto h : hidden)
    if (h == 0) throw config_error("autoencoder: hidden widths must be positive");
  if (!(latent_noise_sigma >= 0.0)) throw config_error("autoencoder: noise sigma must be >= 0");

  std::vector<LayerSpec> specs;
  std::size_t prev = in_dim;
  for (auto h : hidden) {
    specs.push_back({prev, h, Activation::sigmoid});
    prev = h;
  }
  specs.push_back({prev, latent_dim, Activation::linear});
  prev = latent_dim;
  for (auto it = hidden.rbegin(); it != hidden.rend(); ++it) {
    specs.push_back({prev, *it, Activation::sigmoid});
    prev = *it;
  }
  specs.push_back({prev, in_dim, Activation::relu});

  MlpAutoencoder m;
  m.encoder_layers = hidden.size() + 1;
  m.latent_noise_sigma = latent_noise_sigma;
  m.rng_seed = seed;
  Rng rng(seed);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const double limit = std::sqrt(6.0 / static_cast<double>(s.in_dim + s.out_dim));
    std::uniform_real_distribution<double> u(-limit, limit);
    Layer l;
    l.activation = s.activation;
    l.weights.resize(static_cast<Eigen::Index>(s.in_dim), static_cast<Eigen::Index>(s.out_dim));
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) l.weights.data()[i] = u(rng);
    l.bias = RowVector::Zero(static_cast<Eigen::Index>(s.out_dim));
    // A relu layer fed by sigmoid units sees inputs near 0.5 at init; offset
    // the bias so every unit starts at 0.5 there instead of half of them
    // starting dead.
    if (s.activation == Activation::relu && i > 0 && specs[i - 1].activation == Activation::sigmoid)
      l.bias = (0.5 - 0.5 * l.weights.colwise().sum().array()).matrix();
    m.layers.push_back(std::move(l));
  }
  return m;
}

inline void check_batch(const MlpAutoencoder& m, const Matrix& x, const char* where) {
  if (x.cols() != static_cast<Eigen::Index>(m.in_dim()))
    throw data_error(std::string(where) + ": expected " + std::to_string(m.in_dim()) + " columns, got " +
                     std::to_string(x.cols()));
  if (!x.allFinite()) throw data_error(std::string(where) + ": non-finite input");
}

/// Full pass. In training mode, N(0, sigma) noise drawn from `rng` is added to
/// the latent before decoding.
inline ForwardCache forward(const MlpAutoencoder& m, const Matrix& x, bool training, Rng* rng = nullptr) {
  check_batch(m, x, "forward");
  ForwardCache c;
  c.training = training;
  c.generation = m.generation;
  Matrix a = x;
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const auto& l = m.layers[i];
    c.inputs.push_back(a);
    Matrix z = a * l.weights;
    z.rowwise() += l.bias;
    Matrix out;
    activate(l.activation, z, out);
    c.pre.push_back(std::move(z));
    c.out.push_back(out);
    a = std::move(out);
    if (i + 1 == m.encoder_layers && training && m.latent_noise_sigma > 0.0) {
      if (!rng) throw config_error("forward: training mode with noise needs an rng");
      std::normal_distribution<double> g(0.0, m.latent_noise_sigma);
      c.noise.resize(a.rows(), a.cols());
      for (Eigen::Index k = 0; k < c.noise.size(); ++k) c.noise.data()[k] = g(*rng);
      a += c.noise;
    }
  }
  return c;
}

inline Matrix reconstruct(const MlpAutoencoder& m, const Matrix& x) { return forward(m, x, false).reconstruction(); }

/// Encoder half in inference mode.
inline Matrix encode(const MlpAutoencoder& m, const Matrix& x) {
  check_batch(m, x, "encode");
  Matrix a = x;
  for (std::size_t i = 0; i < m.encoder_layers; ++i) {
    const auto& l = m.layers[i];
    Matrix z = a * l.weights;
    z.rowwise() += l.bias;
    activate(l.activation, z, a);
  }
  return a;
}

inline double loss_mse(const Matrix& reconstruction, const Matrix& target) {
  if (reconstruction.rows() != target.rows() || reconstruction.cols() != target.cols())
    throw data_error("loss_mse: shape mismatch");
  if (reconstruction.size() == 0) return 0.0;
  return (reconstruction - target).squaredNorm() / static_cast<double>(reconstruction.size());
}

/// Gradients of loss_mse(reconstruction, target) with the cached noise held
/// fixed.
inline Gradients backward(const MlpAutoencoder& m, const ForwardCache& c, const Matrix& target) {
  if (c.generation != m.generation || c.out.size() != m.layers.size())
    throw data_error("backward: cache does not belong to the current parameters");
  const Matrix& r = c.reconstruction();
  if (r.rows() != target.rows() || r.cols() != target.cols()) throw data_error("backward: target shape mismatch");

  Gradients g;
  g.weights.resize(m.layers.size());
  g.bias.resize(m.layers.size());
  Matrix delta = (2.0 / static_cast<double>(r.size())) * (r - target);
  for (std::size_t i = m.layers.size(); i-- > 0;) {
    const auto& l = m.layers[i];
    activation_backward(l.activation, c.pre[i], c.out[i], delta);
    g.weights[i] = c.inputs[i].transpose() * delta;
    g.bias[i] = delta.colwise().sum();
    if (i > 0) delta = delta * l.weights.transpose();
  }
  return g;
}

}  // namespace chaoskit::ae
