#pragma once

#include "../io/csv.hpp"
#include "autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

namespace chaoskit::ae {

enum class OptimizerKind { adadelta, rmsprop };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::rmsprop;
  double learning_rate = 0.001;
  double rho = 0.9;
  double epsilon = 1e-7;
  std::size_t batch_size = 4096;
  std::size_t epochs = 100;
  double validation_fraction = 0.1;

  void validate() const {
    if (!(learning_rate > 0.0)) throw config_error("optimizer: learning rate must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw config_error("optimizer: rho must be in (0, 1)");
    if (!(epsilon > 0.0)) throw config_error("optimizer: epsilon must be positive");
    if (batch_size == 0) throw config_error("optimizer: batch size must be at least 1");
    if (epochs == 0) throw config_error("optimizer: epochs must be positive");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
      throw config_error("optimizer: validation fraction must be in [0, 1)");
  }

  io::Json to_json() const {
    return {{"kind", kind == OptimizerKind::adadelta ? "adadelta" : "rmsprop"},
            {"learning_rate", learning_rate},
            {"rho", rho},
            {"epsilon", epsilon},
            {"batch_size", batch_size},
            {"epochs", epochs},
            {"validation_fraction", validation_fraction}};
  }

  static OptimizerConfig from_json(const io::Json& j) {
    OptimizerConfig c;
    const auto kind = j.value("kind", std::string("rmsprop"));
    if (kind == "adadelta") {
      c.kind = OptimizerKind::adadelta;
      c.learning_rate = 1.0;
    } else if (kind != "rmsprop") {
      throw config_error("optimizer: kind must be adadelta or rmsprop");
    }
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.rho = j.value("rho", c.rho);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
    c.validate();
    return c;
  }
};

/// Per-parameter running averages for adadelta / RMSprop.
class Optimizer {
 public:
  Optimizer(const MlpAutoencoder& m, const OptimizerConfig& cfg) : cfg_(cfg) {
    for (const auto& l : m.layers) {
      sq_w_.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
      sq_b_.push_back(RowVector::Zero(l.bias.size()));
      if (cfg.kind == OptimizerKind::adadelta) {
        dx_w_.push_back(Matrix::Zero(l.weights.rows(), l.weights.cols()));
        dx_b_.push_back(RowVector::Zero(l.bias.size()));
      }
    }
  }

  void step(MlpAutoencoder& m, const Gradients& g) {
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
      if (cfg_.kind == OptimizerKind::adadelta) {
        adadelta(m.layers[i].weights, g.weights[i], sq_w_[i], dx_w_[i]);
        adadelta(m.layers[i].bias, g.bias[i], sq_b_[i], dx_b_[i]);
      } else {
        rmsprop(m.layers[i].weights, g.weights[i], sq_w_[i]);
        rmsprop(m.layers[i].bias, g.bias[i], sq_b_[i]);
      }
    }
    ++m.generation;
  }

 private:
  template <class P, class G, class S>
  void rmsprop(P& p, const G& g, S& sq) {
    sq = cfg_.rho * sq + (1.0 - cfg_.rho) * g.cwiseAbs2();
    p.array() -= cfg_.learning_rate * g.array() / (sq.array() + cfg_.epsilon).sqrt();
  }

  template <class P, class G, class S>
  void adadelta(P& p, const G& g, S& sq, S& dx) {
    sq = cfg_.rho * sq + (1.0 - cfg_.rho) * g.cwiseAbs2();
    const S update = ((dx.array() + cfg_.epsilon).sqrt() / (sq.array() + cfg_.epsilon).sqrt() * g.array()).matrix();
    dx = cfg_.rho * dx + (1.0 - cfg_.rho) * update.cwiseAbs2();
    p -= cfg_.learning_rate * update;
  }

  OptimizerConfig cfg_;
  std::vector<Matrix> sq_w_, dx_w_;
  std::vector<RowVector> sq_b_, dx_b_;
};

struct TrainReport {
  std::vector<double> train_loss;  // mean training-mode batch loss per epoch
  std::vector<double> val_loss;    // inference-mode validation loss after each epoch
  OptimizerConfig config;
  std::size_t latent_dim = 0;
  std::size_t train_rows = 0;
  std::size_t val_rows = 0;

  double final_train() const { return train_loss.empty() ? 0.0 : train_loss.back(); }
  double final_val() const { return val_loss.empty() ? 0.0 : val_loss.back(); }

  io::Json to_json() const {
    return {{"config", config.to_json()},   {"latent_dim", latent_dim},       {"train_rows", train_rows},
            {"val_rows", val_rows},         {"final_train_loss", final_train()}, {"final_val_loss", final_val()},
            {"train_loss", train_loss},     {"val_loss", val_loss}};
  }
};

inline void write_train_report(std::ostream& out, const TrainReport& r) {
  out << "epoch,train_loss,val_loss\n";
  for (std::size_t e = 0; e < r.train_loss.size(); ++e)
    out << e + 1 << ',' << io::format_real(r.train_loss[e]) << ','
        << (r.val_rows ? io::format_real(r.val_loss[e]) : std::string()) << '\n';
}

inline Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& idx, std::size_t begin, std::size_t end) {
  Matrix out(static_cast<Eigen::Index>(end - begin), x.cols());
  for (std::size_t i = begin; i < end; ++i) out.row(static_cast<Eigen::Index>(i - begin)) = x.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

/// Minibatch training on a seeded train/validation split. A non-finite loss
/// aborts with a numeric error naming the epoch.
inline TrainReport train(MlpAutoencoder& m, const Matrix& data, const OptimizerConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  check_batch(m, data, "train");
  const auto n = static_cast<std::size_t>(data.rows());
  if (n < 2) throw data_error("train: need at least 2 rows");

  Rng rng(seed);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  shuffle_indices(idx, rng);
  std::size_t n_val = static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n)));
  if (cfg.validation_fraction > 0.0) n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  const std::size_t n_train = n - n_val;
  const Matrix val = take_rows(data, idx, n_train, n);
  std::vector<std::size_t> order(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));

  TrainReport rep;
  rep.config = cfg;
  rep.latent_dim = m.latent_dim();
  rep.train_rows = n_train;
  rep.val_rows = n_val;
  Optimizer opt(m, cfg);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    shuffle_indices(order, rng);
    double sum = 0.0;
    for (std::size_t b = 0; b < n_train; b += cfg.batch_size) {
      const std::size_t end = std::min(n_train, b + cfg.batch_size);
      const Matrix x = take_rows(data, order, b, end);
      const auto cache = forward(m, x, true, &rng);
      const double loss = loss_mse(cache.reconstruction(), x);
      if (!std::isfinite(loss))
        throw numeric_error("train: loss became non-finite in epoch " + std::to_string(e + 1) +
                            " (learning rate too high?)");
      sum += loss * static_cast<double>(end - b);
      opt.step(m, backward(m, cache, x));
    }
    rep.train_loss.push_back(sum / static_cast<double>(n_train));
    const double v = n_val ? loss_mse(reconstruct(m, val), val) : 0.0;
    if (!std::isfinite(v)) throw numeric_error("train: validation loss became non-finite in epoch " + std::to_string(e + 1));
    rep.val_loss.push_back(v);
  }
  return rep;
}

struct SearchCell {
  std::size_t latent_dim = 0;
  double learning_rate = 0.0;
  bool diverged = false;
  std::string message;
  TrainReport report;
};

struct SearchResult {
  std::vector<SearchCell> cells;
  std::size_t best = 0;
  MlpAutoencoder best_model;
};

/// Index of the non-diverged cell with the lowest final validation loss;
/// ties go to the smaller latent width, then the smaller rate.
inline std::size_t select_cell(const std::vector<SearchCell>& cells) {
  std::size_t best = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (c.diverged) continue;
    if (best == cells.size()) {
      best = i;
      continue;
    }
    const auto& b = cells[best];
    const double cv = c.report.final_val(), bv = b.report.final_val();
    if (cv < bv || (cv == bv && (c.latent_dim < b.latent_dim ||
                                 (c.latent_dim == b.latent_dim && c.learning_rate < b.learning_rate))))
      best = i;
  }
  if (best == cells.size()) throw numeric_error("param_search: every configuration diverged");
  return best;
}

/// Trains one adadelta model per (latent dim, learning rate), every cell from
/// the same seed. Diverging cells are flagged instead of aborting the grid.
inline SearchResult param_search(const Matrix& data, const std::vector<std::size_t>& latent_dims = {8, 16, 32},
                                 const std::vector<double>& learning_rates = {0.1, 1.0, 10.0},
                                 OptimizerConfig base = {}, std::uint64_t seed = 0,
                                 const std::vector<std::size_t>& hidden = {512, 128},
                                 double latent_noise_sigma = 1.0 / std::sqrt(10.0)) {
  if (latent_dims.empty() || learning_rates.empty()) throw config_error("param_search: empty grid");
  base.kind = OptimizerKind::adadelta;
  SearchResult res;
  for (std::size_t L : latent_dims)
    for (double lr : learning_rates) {
      SearchCell cell;
      cell.latent_dim = L;
      cell.learning_rate = lr;
      auto cfg = base;
      cfg.learning_rate = lr;
      auto model = make_autoencoder(static_cast<std::size_t>(data.cols()), L, hidden, latent_noise_sigma, seed);
      try {
        cell.report = train(model, data, cfg, seed);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::numeric) throw;
        cell.diverged = true;
        cell.message = e.what();
        cell.report.config = cfg;
        cell.report.latent_dim = L;
      }
      const bool diverged = cell.diverged;
      res.cells.push_back(std::move(cell));
      if (!diverged && select_cell(res.cells) == res.cells.size() - 1) res.best_model = std::move(model);
    }
  res.best = select_cell(res.cells);
  return res;
}

inline void write_search_table(std::ostream& out, const SearchResult& r) {
  out << "latent_dim,learning_rate,final_train_loss,final_val_loss,diverged,selected\n";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& c = r.cells[i];
    io::write_row(out, {std::to_string(c.latent_dim), io::format_real(c.learning_rate),
                        c.diverged ? "" : io::format_real(c.report.final_train()),
                        c.diverged ? "" : io::format_real(c.report.final_val()), c.diverged ? "1" : "0",
                        i == r.best ? "1" : "0"});
  }
}

}  // namespace chaoskit::ae
