#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "discpar/matrix.hpp"
#include "discpar/param.hpp"
#include "discpar/rng.hpp"

namespace discpar {

/// One LSTM direction. Gate rows are stacked in the order
/// [input, forget, cell-candidate, output], H rows each.
struct LstmParams {
  LstmParams() = default;
  LstmParams(const std::string& name, std::size_t input_dim, std::size_t hidden);

  /// Glorot-uniform weights, zero biases, forget-gate bias 1.0.
  void init(Rng& rng);
  ParamRefs parameters() { return {&w_input, &w_recurrent, &bias}; }

  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  ParamBlock w_input;      // 4H x input_dim
  ParamBlock w_recurrent;  // 4H x H
  ParamBlock bias;         // 4H x 1
};

struct LstmState {
  Vector h;
  Vector c;
};

/// i,f,o = σ(·), g = tanh(·), c = f⊙c_prev + i⊙g, h = o⊙tanh(c).
LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    std::span<const double> h_prev, std::span<const double> c_prev);

/// Activations of one direction over a sequence, in processing order.
struct LstmTrace {
  std::vector<Vector> gates;  // activated [i|f|g|o], 4H each
  std::vector<Vector> cells;
  std::vector<Vector> tanh_cells;
  std::vector<Vector> hiddens;
};

struct BiLstmLayer {
  BiLstmLayer() = default;
  BiLstmLayer(const std::string& name, std::size_t input_dim, std::size_t hidden)
      : forward(name + ".fwd", input_dim, hidden), backward(name + ".bwd", input_dim, hidden) {}

  void init(Rng& rng) {
    forward.init(rng);
    backward.init(rng);
  }
  ParamRefs parameters();
  std::size_t input_dim() const noexcept { return forward.input_dim; }
  std::size_t hidden() const noexcept { return forward.hidden; }

  LstmParams forward;
  LstmParams backward;
};

struct BiLstmTrace {
  LstmTrace forward;
  LstmTrace backward;  // processing order, i.e. position n-1 first
};

/// Runs both directions from zero initial states; output t is
/// [forward state at t, backward state at t] (2H wide).
std::vector<Vector> bilstm_run(const BiLstmLayer& layer, std::span<const Vector> xs,
                               BiLstmTrace* trace = nullptr);

/// Accumulates parameter gradients given d(outputs). Returns d(xs) when
/// `need_input_grad`, otherwise an empty vector.
std::vector<Vector> bilstm_backward(BiLstmLayer& layer, std::span<const Vector> xs,
                                    const BiLstmTrace& trace, std::span<const Vector> d_outputs,
                                    bool need_input_grad);

}  // namespace discpar
