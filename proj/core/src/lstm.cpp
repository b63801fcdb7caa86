#include "discpar/lstm.hpp"

#include <cmath>

#include "discpar/error.hpp"
#include "discpar/ops.hpp"

namespace discpar {

namespace {

void glorot(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.values()) v = rng.uniform(-limit, limit);
}

/// Computes activated gates, the new cell and its tanh; returns h.
void step_into(const LstmParams& p, std::span<const double> x, std::span<const double> h_prev,
               std::span<const double> c_prev, Vector& gates, Vector& cell, Vector& tanh_cell,
               Vector& h) {
  const std::size_t H = p.hidden;
  gates.assign(p.bias.value.values().begin(), p.bias.value.values().end());
  matvec_add(p.w_input.value, x, gates);
  matvec_add(p.w_recurrent.value, h_prev, gates);
  cell.resize(H);
  tanh_cell.resize(H);
  h.resize(H);
  for (std::size_t k = 0; k < H; ++k) {
    const double i = sigmoid(gates[k]);
    const double f = sigmoid(gates[H + k]);
    const double g = std::tanh(gates[2 * H + k]);
    const double o = sigmoid(gates[3 * H + k]);
    gates[k] = i;
    gates[H + k] = f;
    gates[2 * H + k] = g;
    gates[3 * H + k] = o;
    cell[k] = f * c_prev[k] + i * g;
    tanh_cell[k] = std::tanh(cell[k]);
    h[k] = o * tanh_cell[k];
  }
}

void check_step_shapes(const LstmParams& p, std::size_t x, std::size_t h, std::size_t c) {
  if (x != p.input_dim || h != p.hidden || c != p.hidden) {
    throw DimensionError("lstm_step: expected x/h/c of sizes " + std::to_string(p.input_dim) +
                         "/" + std::to_string(p.hidden) + "/" + std::to_string(p.hidden) +
                         ", got " + std::to_string(x) + "/" + std::to_string(h) + "/" +
                         std::to_string(c));
  }
}

/// Runs one direction over xs in the given order.
void run_direction(const LstmParams& p, std::span<const Vector> xs, bool reversed,
                   LstmTrace& trace) {
  const std::size_t n = xs.size();
  trace.gates.resize(n);
  trace.cells.resize(n);
  trace.tanh_cells.resize(n);
  trace.hiddens.resize(n);
  const Vector zero(p.hidden, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const Vector& x = xs[reversed ? n - 1 - s : s];
    if (x.size() != p.input_dim) {
      throw DimensionError("bilstm_run: input of size " + std::to_string(x.size()) +
                           ", expected " + std::to_string(p.input_dim));
    }
    const Vector& h_prev = s == 0 ? zero : trace.hiddens[s - 1];
    const Vector& c_prev = s == 0 ? zero : trace.cells[s - 1];
    step_into(p, x, h_prev, c_prev, trace.gates[s], trace.cells[s], trace.tanh_cells[s],
              trace.hiddens[s]);
  }
}

void backward_direction(LstmParams& p, std::span<const Vector> xs, bool reversed,
                        const LstmTrace& trace, std::span<const Vector> d_outputs, std::size_t offset,
                        std::vector<Vector>* d_xs) {
  const std::size_t n = xs.size();
  const std::size_t H = p.hidden;
  Vector dh_next(H, 0.0);
  Vector dc_next(H, 0.0);
  Vector da(4 * H);
  const Vector zero(H, 0.0);
  for (std::size_t s = n; s-- > 0;) {
    const std::size_t pos = reversed ? n - 1 - s : s;
    const Vector& gates = trace.gates[s];
    const Vector& c_prev = s == 0 ? zero : trace.cells[s - 1];
    const Vector& h_prev = s == 0 ? zero : trace.hiddens[s - 1];
    const Vector& d_out = d_outputs[pos];
    for (std::size_t k = 0; k < H; ++k) {
      const double i = gates[k];
      const double f = gates[H + k];
      const double g = gates[2 * H + k];
      const double o = gates[3 * H + k];
      const double tc = trace.tanh_cells[s][k];
      const double dh = d_out[offset + k] + dh_next[k];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[k];
      da[k] = dc * g * i * (1.0 - i);
      da[H + k] = dc * c_prev[k] * f * (1.0 - f);
      da[2 * H + k] = dc * i * (1.0 - g * g);
      da[3 * H + k] = dh * tc * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    outer_add(da, xs[pos], p.w_input.grad);
    outer_add(da, h_prev, p.w_recurrent.grad);
    auto db = p.bias.grad.values();
    for (std::size_t r = 0; r < 4 * H; ++r) db[r] += da[r];
    if (d_xs != nullptr) matvec_transpose_add(p.w_input.value, da, (*d_xs)[pos]);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    matvec_transpose_add(p.w_recurrent.value, da, dh_next);
  }
}

}  // namespace

LstmParams::LstmParams(const std::string& name, std::size_t in, std::size_t h)
    : input_dim(in),
      hidden(h),
      w_input(name + ".w_input", 4 * h, in),
      w_recurrent(name + ".w_recurrent", 4 * h, h),
      bias(name + ".bias", 4 * h, 1) {
  if (in == 0 || h == 0) throw DimensionError("LstmParams: zero-sized layer " + name);
}

void LstmParams::init(Rng& rng) {
  glorot(w_input.value, rng);
  glorot(w_recurrent.value, rng);
  bias.value.fill(0.0);
  for (std::size_t k = 0; k < hidden; ++k) bias.value[hidden + k] = 1.0;
}

LstmState lstm_step(const LstmParams& params, std::span<const double> x,
                    std::span<const double> h_prev, std::span<const double> c_prev) {
  check_step_shapes(params, x.size(), h_prev.size(), c_prev.size());
  Vector gates;
  Vector tanh_cell;
  LstmState out;
  step_into(params, x, h_prev, c_prev, gates, out.c, tanh_cell, out.h);
  return out;
}

ParamRefs BiLstmLayer::parameters() {
  ParamRefs refs = forward.parameters();
  for (ParamBlock* b : backward.parameters()) refs.push_back(b);
  return refs;
}

std::vector<Vector> bilstm_run(const BiLstmLayer& layer, std::span<const Vector> xs,
                               BiLstmTrace* trace) {
  if (xs.empty()) throw DimensionError("bilstm_run: empty sequence");
  BiLstmTrace local;
  BiLstmTrace& t = trace != nullptr ? *trace : local;
  run_direction(layer.forward, xs, false, t.forward);
  run_direction(layer.backward, xs, true, t.backward);
  const std::size_t n = xs.size();
  const std::size_t H = layer.hidden();
  std::vector<Vector> out(n, Vector(2 * H));
  for (std::size_t pos = 0; pos < n; ++pos) {
    const Vector& f = t.forward.hiddens[pos];
    const Vector& b = t.backward.hiddens[n - 1 - pos];
    std::copy(f.begin(), f.end(), out[pos].begin());
    std::copy(b.begin(), b.end(), out[pos].begin() + static_cast<std::ptrdiff_t>(H));
  }
  return out;
}

std::vector<Vector> bilstm_backward(BiLstmLayer& layer, std::span<const Vector> xs,
                                    const BiLstmTrace& trace, std::span<const Vector> d_outputs,
                                    bool need_input_grad) {
  std::vector<Vector> d_xs;
  if (need_input_grad) d_xs.assign(xs.size(), Vector(layer.input_dim(), 0.0));
  std::vector<Vector>* target = need_input_grad ? &d_xs : nullptr;
  backward_direction(layer.forward, xs, false, trace.forward, d_outputs, 0, target);
  backward_direction(layer.backward, xs, true, trace.backward, d_outputs, layer.hidden(), target);
  return d_xs;
}

}  // namespace discpar
