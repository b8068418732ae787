#include "mbg/net/sampler.hpp"

#include <algorithm>
#include <cstring>

#include "mbg/kernels.hpp"
#include "mbg/mulaw.hpp"
#include "mbg/util.hpp"

namespace mbg::net {

namespace {

// categorical draw shared by both engines; identical logits and seed give
// identical symbols
int softmax_draw(const float* logits, std::size_t q, RngStream& rng,
                 std::vector<float>& scratch) {
  const auto& k = kernels::active<float>();
  float mx = logits[0];
  for (std::size_t i = 1; i < q; ++i) mx = std::max(mx, logits[i]);
  scratch.resize(q);
  for (std::size_t i = 0; i < q; ++i) scratch[i] = logits[i] - mx;
  k.vexp(scratch.data(), scratch.data(), q);
  double total = 0.0;
  for (std::size_t i = 0; i < q; ++i) total += double(scratch[i]);
  const double r = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    cum += double(scratch[i]);
    if (cum > r) return int(i);
  }
  return int(q) - 1;
}

// weight views transposed to input-major order for the matvec chains
struct LayerWeights {
  std::vector<float> filt_prev, filt_curr, filt_cond;
  std::vector<float> gate_prev, gate_curr, gate_cond;
  std::vector<float> res, skip;
  const float* filt_b;
  const float* gate_b;
  const float* res_b;
  const float* skip_b;
};

std::vector<float> transpose(const float* w, std::size_t rows,
                             std::size_t cols) {
  std::vector<float> wt(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) wt[j * rows + i] = w[i * cols + j];
  return wt;
}

}  // namespace

std::vector<std::uint8_t> sample_symbols(const Network<float>& net,
                                         const Mat<double>& cond_rows,
                                         std::uint64_t seed) {
  const NetConfig& cfg = net.config();
  const auto& params = net.params();
  const auto& k = kernels::active<float>();
  const std::size_t R = cfg.residual_channels;
  const std::size_t S = cfg.skip_channels;
  const std::size_t Q = NetConfig::kQuantLevels;
  const std::size_t C = cfg.condition_dim;
  const int L = cfg.n_layers();
  if (cond_rows.cols != C)
    fail("sample_symbols: condition dimension mismatch (checkpoint expects " +
         std::to_string(C) + ", got " + std::to_string(cond_rows.cols) + ")");
  const std::size_t n = cond_rows.rows;

  std::vector<LayerWeights> lw(L);
  for (int l = 0; l < L; ++l) {
    const std::size_t base = layer_tensor_index(l, kFiltPrevW);
    lw[l].filt_prev = transpose(params.tensor(base + kFiltPrevW), R, R);
    lw[l].filt_curr = transpose(params.tensor(base + kFiltCurrW), R, R);
    lw[l].filt_cond = transpose(params.tensor(base + kFiltCondW), R, C);
    lw[l].gate_prev = transpose(params.tensor(base + kGatePrevW), R, R);
    lw[l].gate_curr = transpose(params.tensor(base + kGateCurrW), R, R);
    lw[l].gate_cond = transpose(params.tensor(base + kGateCondW), R, C);
    lw[l].res = transpose(params.tensor(base + kResW), R, R);
    lw[l].skip = transpose(params.tensor(base + kSkipW), S, R);
    lw[l].filt_b = params.tensor(base + kFiltB);
    lw[l].gate_b = params.tensor(base + kGateB);
    lw[l].res_b = params.tensor(base + kResB);
    lw[l].skip_b = params.tensor(base + kSkipB);
  }
  const std::size_t post = 2 + std::size_t(L) * kTensorsPerLayer;
  const auto post1_wt = transpose(params.tensor(post + 0), S, S);

  // ring buffers of layer inputs, one slot per dilation step, zero-primed
  std::vector<std::vector<float>> ring(L);
  for (int l = 0; l < L; ++l)
    ring[l].assign(std::size_t(cfg.dilation(l)) * R, 0.0f);

  RngStream rng(seed);
  std::vector<std::uint8_t> symbols(n);
  std::vector<float> cur(R), nxt(R), zf(R), zg(R), tv(R), sv(R), uu(R);
  std::vector<float> skip(S), r1(S), h1(S), r2(S);
  std::vector<float> logits(Q), scratch(Q), h(C);
  float input = 0.0f;

  for (std::size_t pos = 0; pos < n; ++pos) {
    const double* crow = cond_rows.row(pos);
    for (std::size_t d = 0; d < C; ++d) h[d] = float(crow[d]);

    // embedding
    std::memcpy(cur.data(), params.tensor(1), R * sizeof(float));
    k.matvec_t_acc(cur.data(), params.tensor(0), &input, 1, R);

    std::fill(skip.begin(), skip.end(), 0.0f);
    for (int l = 0; l < L; ++l) {
      const std::size_t d = std::size_t(cfg.dilation(l));
      float* slot = ring[l].data() + (pos % d) * R;

      std::memcpy(zf.data(), lw[l].filt_b, R * sizeof(float));
      k.matvec_t_acc(zf.data(), lw[l].filt_prev.data(), slot, R, R);
      k.matvec_t_acc(zf.data(), lw[l].filt_curr.data(), cur.data(), R, R);
      k.matvec_t_acc(zf.data(), lw[l].filt_cond.data(), h.data(), C, R);

      std::memcpy(zg.data(), lw[l].gate_b, R * sizeof(float));
      k.matvec_t_acc(zg.data(), lw[l].gate_prev.data(), slot, R, R);
      k.matvec_t_acc(zg.data(), lw[l].gate_curr.data(), cur.data(), R, R);
      k.matvec_t_acc(zg.data(), lw[l].gate_cond.data(), h.data(), C, R);

      k.gated_act(tv.data(), sv.data(), uu.data(), zf.data(), zg.data(), R);

      for (std::size_t i = 0; i < S; ++i) skip[i] += lw[l].skip_b[i];
      k.matvec_t_acc(skip.data(), lw[l].skip.data(), uu.data(), R, S);

      std::memcpy(slot, cur.data(), R * sizeof(float));
      if (l + 1 < L) {
        std::memcpy(nxt.data(), cur.data(), R * sizeof(float));
        for (std::size_t i = 0; i < R; ++i) nxt[i] += lw[l].res_b[i];
        k.matvec_t_acc(nxt.data(), lw[l].res.data(), uu.data(), R, R);
        std::swap(cur, nxt);
      }
    }

    kernels::relu(r1.data(), skip.data(), S);
    std::memcpy(h1.data(), params.tensor(post + 1), S * sizeof(float));
    k.matvec_t_acc(h1.data(), post1_wt.data(), r1.data(), S, S);
    kernels::relu(r2.data(), h1.data(), S);

    std::memcpy(logits.data(), params.tensor(post + 3), Q * sizeof(float));
    k.matvec_t_acc(logits.data(), params.tensor(post + 2), r2.data(), S, Q);

    const int sym = softmax_draw(logits.data(), Q, rng, scratch);
    symbols[pos] = std::uint8_t(sym);
    input = float(mulaw_bin_center(std::uint8_t(sym)));
  }
  return symbols;
}

std::vector<std::uint8_t> sample_symbols_windowed(const Network<float>& net,
                                                  const Mat<double>& cond_rows,
                                                  std::uint64_t seed) {
  const NetConfig& cfg = net.config();
  const std::size_t C = cfg.condition_dim;
  if (cond_rows.cols != C)
    fail("sample_symbols_windowed: condition dimension mismatch");
  const std::size_t n = cond_rows.rows;
  const std::size_t rf = std::size_t(receptive_field(cfg));
  const std::size_t Q = NetConfig::kQuantLevels;

  Workspace<float> ws = net.make_workspace();

  RngStream rng(seed);
  std::vector<std::uint8_t> symbols(n);
  std::vector<float> inputs(n, 0.0f);  // shifted past, inputs[q] pairs with q
  std::vector<float> scratch;

  for (std::size_t pos = 0; pos < n; ++pos) {
    // window of real positions [pos - w + 1, pos]; positions before the
    // signal are zero history, supplied by the stack's own shift padding,
    // matching what the streaming engine's zero-primed buffers hold
    const std::size_t w = std::min(rf, pos + 1);
    const std::size_t first = pos + 1 - w;
    ws.input.resize(w);
    if (ws.cond.rows != C || ws.cond.cols != w) ws.cond.resize(C, w);
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t q = first + j;
      ws.input[j] = inputs[q];
      const double* crow = cond_rows.row(q);
      for (std::size_t d = 0; d < C; ++d)
        ws.cond.at(d, j) = float(crow[d]);
    }
    net.forward(ws, w);
    const int sym = softmax_draw(ws.logits.row(w - 1), Q, rng, scratch);
    symbols[pos] = std::uint8_t(sym);
    if (pos + 1 < n)
      inputs[pos + 1] = float(mulaw_bin_center(std::uint8_t(sym)));
  }
  return symbols;
}

}  // namespace mbg::net
