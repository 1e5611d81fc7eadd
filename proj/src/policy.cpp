#include "maze/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace maze {

namespace {
constexpr double kLogFloor = 1e-8;

void affine(const double* w, const double* b, const double* x, int in, int out,
            double* y) {
  for (int o = 0; o < out; ++o) {
    const double* row = w + static_cast<size_t>(o) * in;
    double acc = b[o];
    for (int i = 0; i < in; ++i) acc += row[i] * x[i];
    y[o] = acc;
  }
}
}  // namespace

ParamLayout ParamLayout::of(const ArchSpec& arch) {
  ParamLayout l{};
  int off = 0;
  int in = arch.input_dim;
  for (int h : arch.hidden) {
    l.trunk.push_back({off, off + in * h, in, h});
    off += in * h + h;
    in = h;
  }
  l.policy_head = {off, off + in * kNumActions, in, kNumActions};
  off += in * kNumActions + kNumActions;
  l.value_head = {off, off + in, in, 1};
  off += in + 1;
  l.total = off;
  return l;
}

int ArchSpec::param_count() const { return ParamLayout::of(*this).total; }

PolicyParams init_policy(const ArchSpec& arch, Role role, std::string lineage,
                         std::uint64_t seed) {
  if (arch.input_dim <= 0) throw std::invalid_argument("bad architecture");
  PolicyParams p;
  p.arch = arch;
  p.role = role;
  p.lineage = std::move(lineage);
  const ParamLayout layout = ParamLayout::of(arch);
  p.w.assign(layout.total, 0.0);
  Rng rng(seed);
  auto fill = [&](const ParamLayout::Block& blk, double scale) {
    const double s = scale / std::sqrt(static_cast<double>(blk.in));
    for (int i = 0; i < blk.in * blk.out; ++i)
      p.w[blk.w_off + i] = s * rng.normal();
  };
  for (const auto& blk : layout.trunk) fill(blk, 1.0);
  fill(layout.policy_head, 0.01);
  fill(layout.value_head, 1.0);
  return p;
}

PolicyParams init_policy_zero(const ArchSpec& arch, Role role,
                              std::string lineage) {
  PolicyParams p;
  p.arch = arch;
  p.role = role;
  p.lineage = std::move(lineage);
  p.w.assign(static_cast<size_t>(arch.param_count()), 0.0);
  return p;
}

ActionDistribution forward(const PolicyParams& params,
                           std::span<const double> obs, ForwardCache& cache) {
  const ArchSpec& arch = params.arch;
  if (static_cast<int>(obs.size()) != arch.input_dim)
    throw std::invalid_argument("observation size mismatch");
  const ParamLayout layout = ParamLayout::of(arch);

  cache.activations.resize(layout.trunk.size());
  const double* x = obs.data();
  for (size_t l = 0; l < layout.trunk.size(); ++l) {
    const auto& blk = layout.trunk[l];
    auto& act = cache.activations[l];
    act.resize(blk.out);
    affine(params.w.data() + blk.w_off, params.w.data() + blk.b_off, x, blk.in,
           blk.out, act.data());
    for (double& a : act) a = std::tanh(a);
    x = act.data();
  }

  const auto& ph = layout.policy_head;
  affine(params.w.data() + ph.w_off, params.w.data() + ph.b_off, x, ph.in,
         ph.out, cache.logits.data());
  const auto& vh = layout.value_head;
  double value;
  affine(params.w.data() + vh.w_off, params.w.data() + vh.b_off, x, vh.in, 1,
         &value);

  double mx = cache.logits[0];
  for (double z : cache.logits) mx = std::max(mx, z);
  double sum = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    cache.dist.probs[a] = std::exp(cache.logits[a] - mx);
    sum += cache.dist.probs[a];
  }
  for (int a = 0; a < kNumActions; ++a) cache.dist.probs[a] /= sum;
  cache.dist.value = value;
  return cache.dist;
}

ActionDistribution forward(const PolicyParams& params,
                           std::span<const double> obs) {
  ForwardCache cache;
  return forward(params, obs, cache);
}

void backward(const PolicyParams& params, const ForwardCache& cache,
              std::span<const double> obs,
              const std::array<double, kNumActions>& dlogits, double dvalue,
              std::span<double> grad) {
  const ParamLayout layout = ParamLayout::of(params.arch);
  const size_t L = layout.trunk.size();
  const double* top =
      L == 0 ? obs.data() : cache.activations.back().data();

  // Heads.
  const auto& ph = layout.policy_head;
  std::vector<double> dact(ph.in, 0.0);
  for (int o = 0; o < kNumActions; ++o) {
    const double g = dlogits[o];
    if (g == 0.0) continue;
    double* wrow = grad.data() + ph.w_off + static_cast<size_t>(o) * ph.in;
    const double* prow =
        params.w.data() + ph.w_off + static_cast<size_t>(o) * ph.in;
    for (int i = 0; i < ph.in; ++i) {
      wrow[i] += g * top[i];
      dact[i] += g * prow[i];
    }
    grad[ph.b_off + o] += g;
  }
  const auto& vh = layout.value_head;
  if (dvalue != 0.0) {
    double* wrow = grad.data() + vh.w_off;
    const double* prow = params.w.data() + vh.w_off;
    for (int i = 0; i < vh.in; ++i) {
      wrow[i] += dvalue * top[i];
      dact[i] += dvalue * prow[i];
    }
    grad[vh.b_off] += dvalue;
  }

  // Trunk, back to front.
  for (size_t l = L; l-- > 0;) {
    const auto& blk = layout.trunk[l];
    const auto& act = cache.activations[l];
    const double* below = l == 0 ? obs.data() : cache.activations[l - 1].data();
    std::vector<double> dbelow(blk.in, 0.0);
    for (int o = 0; o < blk.out; ++o) {
      const double dpre = dact[o] * (1.0 - act[o] * act[o]);
      if (dpre == 0.0) continue;
      double* wrow = grad.data() + blk.w_off + static_cast<size_t>(o) * blk.in;
      const double* prow =
          params.w.data() + blk.w_off + static_cast<size_t>(o) * blk.in;
      for (int i = 0; i < blk.in; ++i) {
        wrow[i] += dpre * below[i];
        dbelow[i] += dpre * prow[i];
      }
      grad[blk.b_off + o] += dpre;
    }
    dact = std::move(dbelow);
  }
}

std::vector<double> grad_logprob(const PolicyParams& params,
                                 std::span<const double> obs, int action) {
  ForwardCache cache;
  forward(params, obs, cache);
  std::array<double, kNumActions> dlogits{};
  for (int a = 0; a < kNumActions; ++a)
    dlogits[a] = (a == action ? 1.0 : 0.0) - cache.dist.probs[a];
  std::vector<double> grad(params.w.size(), 0.0);
  backward(params, cache, obs, dlogits, 0.0, grad);
  return grad;
}

std::vector<double> grad_value(const PolicyParams& params,
                               std::span<const double> obs) {
  ForwardCache cache;
  forward(params, obs, cache);
  std::array<double, kNumActions> dlogits{};
  std::vector<double> grad(params.w.size(), 0.0);
  backward(params, cache, obs, dlogits, 1.0, grad);
  return grad;
}

double log_prob(const ActionDistribution& dist, int action) {
  return std::log(std::max(dist.probs[action], kLogFloor));
}

std::pair<int, double> sample_action(const ActionDistribution& dist, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  int action = kNumActions - 1;
  for (int a = 0; a < kNumActions; ++a) {
    acc += dist.probs[a];
    if (u < acc) {
      action = a;
      break;
    }
  }
  return {action, log_prob(dist, action)};
}

int greedy_action(const ActionDistribution& dist) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (dist.probs[a] > dist.probs[best]) best = a;
  }
  return best;
}

}  // namespace maze
