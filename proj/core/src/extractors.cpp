#include "unplab/extractors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "unplab/entropy.hpp"
#include "unplab/linalg.hpp"

namespace unplab {

BitString to_bits(std::uint64_t value, std::size_t length) {
  if (length > 64) throw DimensionError("to_bits: at most 64 bits");
  BitString out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = static_cast<std::uint8_t>((value >> i) & 1U);
  return out;
}

std::uint64_t from_bits(const BitString& bits) {
  if (bits.size() > 64) throw DimensionError("from_bits: at most 64 bits");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw ValidationError("bit string entries must be 0 or 1");
    v |= static_cast<std::uint64_t>(bits[i]) << i;
  }
  return v;
}

int ip(const BitString& x, const BitString& y) {
  if (x.size() != y.size()) throw DimensionError("ip: length mismatch");
  int acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc ^= (x[i] & y[i]) & 1;
  return acc;
}

// ---------------------------------------------------------------- designs

std::size_t ceil_log2(std::uint64_t v) {
  if (v == 0) throw ValidationError("ceil_log2 of zero");
  std::size_t k = 0;
  while ((std::uint64_t{1} << k) < v) ++k;
  return k;
}

std::size_t design_seed_length(std::size_t t, std::size_t m) {
  if (t == 0 || m == 0) throw ValidationError("design parameters must be positive");
  const auto per = static_cast<std::size_t>(std::ceil(static_cast<double>(t) / std::log(2.0)));
  return t * per * ceil_log2(4 * static_cast<std::uint64_t>(m));
}

WeakDesign build_weak_design(std::size_t t, std::size_t m, std::uint64_t seed) {
  return build_weak_design(t, m, design_seed_length(t, m), 1.0, seed);
}

WeakDesign build_weak_design(std::size_t t, std::size_t m, std::size_t d, double r, std::uint64_t seed) {
  if (t == 0 || m == 0) throw ValidationError("design parameters must be positive");
  if (t > d) throw ValidationError("design: set size exceeds seed length");
  if (!(r >= 1.0)) throw ValidationError("design: r must be at least 1");
  const double bound = r * static_cast<double>(m);

  constexpr int restarts = 64;
  std::size_t worst_index = 0;
  for (int attempt = 0; attempt < restarts; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    WeakDesign design{t, r, d, {}};
    std::vector<Indices> owners(d);  // sets already placed that contain each element
    bool failed = false;
    for (std::size_t i = 0; i < m && !failed; ++i) {
      std::vector<int> overlap(i, 0);
      std::vector<char> taken(d, 0);
      Indices set;
      for (std::size_t step = 0; step < t; ++step) {
        double best = std::numeric_limits<double>::infinity();
        Indices ties;
        for (std::size_t e = 0; e < d; ++e) {
          if (taken[e]) continue;
          double inc = 0.0;
          for (auto j : owners[e]) inc += std::ldexp(1.0, overlap[j]);
          if (inc < best) {
            best = inc;
            ties.assign(1, e);
          } else if (inc == best) {
            ties.push_back(e);
          }
        }
        const auto pick = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
        taken[pick] = 1;
        set.push_back(pick);
        for (auto j : owners[pick]) ++overlap[j];
      }
      double sum = 0.0;
      for (auto c : overlap) sum += std::ldexp(1.0, c);
      if (sum > bound) {
        failed = true;
        worst_index = std::max(worst_index, i);
        break;
      }
      std::sort(set.begin(), set.end());
      for (auto e : set) owners[e].push_back(i);
      design.sets.push_back(std::move(set));
    }
    if (failed) continue;
    const auto check = verify_weak_design(design);
    if (!check.ok) throw Error("design construction produced an invalid design: " + check.message);
    return design;
  }
  throw Error("weak design construction failed at d = " + std::to_string(d) + ": set " +
              std::to_string(worst_index) + " violates the overlap bound in every restart");
}

BitString ext_compose(const BitString& x, const BitString& y, const WeakDesign& design, const OneBitExtractor& one_bit) {
  if (y.size() != design.d) throw DimensionError("ext_compose: seed length differs from design d");
  BitString out;
  out.reserve(design.sets.size());
  BitString part(design.t);
  for (const auto& s : design.sets) {
    if (s.size() != design.t) throw DimensionError("ext_compose: design set of wrong size");
    for (std::size_t a = 0; a < s.size(); ++a) part[a] = y.at(s[a]);
    out.push_back(static_cast<std::uint8_t>(one_bit(x, part) & 1));
  }
  return out;
}

// ---------------------------------------------------------------- distinguish vs predict

PredictResult distinguish_equals_predict(const CqState& state, const AdversaryFamily& family) {
  if (state.alphabet_size() != 2) throw ValidationError("distinguish_equals_predict needs a binary alphabet");
  const Matrix a = state.weighted(0);
  const Matrix b = state.weighted(1);
  const auto& dims = state.side_dims();
  const auto d = a.rows();
  const Matrix id = Matrix::Identity(d, d);

  PredictResult out;
  out.interval = computational_distance(DensityOperator::trusted(a, dims, Normalization::subnormalized),
                                        DensityOperator::trusted(b, dims, Normalization::subnormalized), family);

  auto weight = [](const Matrix& e, const Matrix& m) { return (e.transpose().cwiseProduct(m)).sum().real(); };

  if (family.is_unbounded()) {
    const auto eig = linalg::eigh(b - a);
    Matrix e1 = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      if (eig.values(i) > 0.0) e1 += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
    e1 = linalg::hermitian_part(e1);
    out.predictor_success = weight(id - e1, a) + weight(e1, b);
    out.predictor = Strategy::fixed_measurement("predict[helstrom]", Povm({id - e1, e1}, dims), 0);
    return out;
  }

  double best = -1.0;
  for (const auto& s : family.strategies()) {
    const Matrix e = linalg::hermitian_part(distinguisher_effect(s, a, b));
    // Output 1 may mean "x = 0" or "x = 1"; keep the better labeling.
    const double keep = weight(id - e, a) + weight(e, b);
    const double flip = weight(e, a) + weight(id - e, b);
    if (std::max(keep, flip) > best) {
      best = std::max(keep, flip);
      const bool use_flip = flip > keep;
      std::vector<Matrix> povm = use_flip ? std::vector<Matrix>{e, id - e} : std::vector<Matrix>{id - e, e};
      out.predictor = Strategy::fixed_measurement("predict[" + s.name + (use_flip ? ",flip" : "") + "]",
                                                  Povm(std::move(povm), dims), s.gate_cost);
    }
  }
  out.predictor_success = best;
  return out;
}

// ---------------------------------------------------------------- hybrids

namespace {

std::vector<Matrix> padded_blocks(const CqState& state, std::size_t bits) {
  if (bits > 12) throw CapacityError("hybrid analysis supports at most 12 output bits");
  const std::size_t n = std::size_t{1} << bits;
  if (state.alphabet_size() > n) throw DimensionError("alphabet exceeds 2^bits");
  auto blocks = state.weighted_all();
  const auto d = static_cast<Eigen::Index>(state.side_dim());
  blocks.resize(n, Matrix::Zero(d, d));
  return blocks;
}

}  // namespace

double distance_from_uniform(const CqState& rho_zb) {
  const auto blocks = padded_blocks(rho_zb, rho_zb.alphabet_bits());
  Matrix side = Matrix::Zero(blocks.front().rows(), blocks.front().cols());
  for (const auto& b : blocks) side += b;
  const Matrix uniform = side / static_cast<double>(blocks.size());
  double acc = 0.0;
  for (const auto& b : blocks) acc += linalg::trace_norm_hermitian(b - uniform);
  return 0.5 * acc;
}

HybridResult hybrid_gaps(const CqState& rho_zb) {
  const std::size_t m = rho_zb.alphabet_bits();
  if (m == 0) throw ValidationError("hybrid analysis needs at least one bit");
  const auto blocks = padded_blocks(rho_zb, m);
  const auto d = blocks.front().rows();

  // prefix[i][r]: total weight of symbols whose low i bits equal r.
  std::vector<std::vector<Matrix>> prefix(m + 1);
  prefix[m] = blocks;
  for (std::size_t i = m; i-- > 0;) {
    const std::size_t count = std::size_t{1} << i;
    prefix[i].assign(count, Matrix::Zero(d, d));
    for (std::size_t r = 0; r < prefix[i + 1].size(); ++r) prefix[i][r & (count - 1)] += prefix[i + 1][r];
  }

  HybridResult out;
  out.total_distance = distance_from_uniform(rho_zb);
  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t mask = (std::size_t{1} << (i - 1)) - 1;
    double acc = 0.0;
    for (std::size_t r = 0; r < prefix[i].size(); ++r) {
      acc += linalg::trace_norm_hermitian(prefix[i][r] - 0.5 * prefix[i - 1][r & mask]);
    }
    out.gaps.push_back(0.5 * acc);
  }
  const auto it = std::max_element(out.gaps.begin(), out.gaps.end());
  out.index = static_cast<std::size_t>(it - out.gaps.begin()) + 1;
  out.gap = *it;
  return out;
}

std::optional<HybridResult> hybrid_locate_bit(const CqState& rho_zb, double threshold) {
  auto r = hybrid_gaps(rho_zb);
  if (!(r.total_distance > threshold)) return std::nullopt;
  return r;
}

// ---------------------------------------------------------------- extractor tests

double ip_output_distance(const CqState& state) {
  const std::size_t n = state.alphabet_bits();
  if (n > max_ip_source_bits) throw CapacityError("ip extractor test supports at most 12 source bits");
  const std::size_t count = std::size_t{1} << n;
  if (state.alphabet_size() > count) throw DimensionError("alphabet exceeds 2^n");
  const auto blocks = state.weighted_all();
  const auto d = static_cast<Eigen::Index>(state.side_dim());
  double acc = 0.0;
  for (std::uint64_t y = 0; y < count; ++y) {
    Matrix diff = Matrix::Zero(d, d);
    for (std::uint64_t x = 0; x < blocks.size(); ++x) {
      if (ip_word(x, y) != 0) {
        diff -= blocks[x];
      } else {
        diff += blocks[x];
      }
    }
    acc += linalg::trace_norm_hermitian(diff);
  }
  return 0.5 * acc / static_cast<double>(count);
}

IpExtractorReport ip_extractor_test(const CqState& state, double eps_ext) {
  if (!(eps_ext > 0.0)) throw ValidationError("eps_ext must be positive");
  IpExtractorReport r;
  r.n = state.alphabet_bits();
  r.eps_ext = eps_ext;
  r.distance = ip_output_distance(state);
  r.min_entropy = min_entropy(state);
  r.k_required = 1.0 - 2.0 * std::log2(eps_ext);
  r.hypothesis_met = r.min_entropy >= r.k_required - 1e-9;
  r.holds = !r.hypothesis_met || r.distance <= eps_ext + 1e-9;
  return r;
}

double composed_k_required(const ExtractorSpec& spec) {
  if (spec.m == 1) return 1.0 - 2.0 * std::log2(spec.eps_ext);
  const double m = static_cast<double>(spec.m);
  return 1.0 + spec.design.r * m - 2.0 * std::log2(spec.eps_ext / m);
}

double composed_output_distance(const ExtractorSpec& spec, const CqState& state) {
  const auto& design = spec.design;
  if (spec.n > max_composed_source_bits) throw CapacityError("composed extractor test supports n <= 10");
  if (spec.m == 0 || spec.m > max_composed_output_bits) throw CapacityError("composed extractor test supports 1 <= m <= 3");
  if (design.t != spec.n) throw DimensionError("design set size must equal the source length");
  if (design.m() != spec.m) throw DimensionError("design has a different number of sets than output bits");
  if (state.alphabet_bits() > spec.n || state.alphabet_size() > (std::size_t{1} << spec.n)) {
    throw DimensionError("source alphabet exceeds n bits");
  }

  Indices active;
  for (const auto& s : design.sets) active.insert(active.end(), s.begin(), s.end());
  std::sort(active.begin(), active.end());
  active.erase(std::unique(active.begin(), active.end()), active.end());
  if (active.size() > max_active_seed_bits) throw CapacityError("design uses more than 20 distinct seed bits");

  // Seed bits outside the union never influence the output, so averaging
  // over the active bits alone is exact.
  std::vector<std::vector<std::size_t>> positions(spec.m);
  for (std::size_t i = 0; i < spec.m; ++i) {
    for (auto e : design.sets[i]) {
      positions[i].push_back(static_cast<std::size_t>(std::lower_bound(active.begin(), active.end(), e) - active.begin()));
    }
  }

  const auto blocks = state.weighted_all();
  const auto dim = static_cast<Eigen::Index>(state.side_dim());
  Matrix side = Matrix::Zero(dim, dim);
  for (const auto& b : blocks) side += b;
  const std::size_t outputs = std::size_t{1} << spec.m;
  const Matrix uniform = side / static_cast<double>(outputs);
  const std::uint64_t seeds = std::uint64_t{1} << active.size();

  double acc = 0.0;
  std::vector<Matrix> by_output(outputs, Matrix::Zero(dim, dim));
  std::vector<std::uint64_t> words(spec.m);
  for (std::uint64_t u = 0; u < seeds; ++u) {
    for (std::size_t i = 0; i < spec.m; ++i) {
      std::uint64_t w = 0;
      for (std::size_t a = 0; a < positions[i].size(); ++a) w |= ((u >> positions[i][a]) & 1U) << a;
      words[i] = w;
    }
    for (auto& mtx : by_output) mtx.setZero();
    for (std::uint64_t x = 0; x < blocks.size(); ++x) {
      std::size_t k = 0;
      for (std::size_t i = 0; i < spec.m; ++i) k |= static_cast<std::size_t>(ip_word(x, words[i])) << i;
      by_output[k] += blocks[x];
    }
    double per_seed = 0.0;
    for (const auto& mtx : by_output) per_seed += linalg::trace_norm_hermitian(mtx - uniform);
    acc += 0.5 * per_seed;
  }
  return acc / static_cast<double>(seeds);
}

ComposedExtractorReport composed_extractor_test(const ExtractorSpec& spec, const CqState& state) {
  if (!(spec.eps_ext > 0.0)) throw ValidationError("eps_ext must be positive");
  ComposedExtractorReport r;
  r.n = spec.n;
  r.m = spec.m;
  r.d = spec.design.d;
  r.eps_ext = spec.eps_ext;
  Indices active;
  for (const auto& s : spec.design.sets) active.insert(active.end(), s.begin(), s.end());
  std::sort(active.begin(), active.end());
  r.active_seed_bits = static_cast<std::size_t>(std::unique(active.begin(), active.end()) - active.begin());
  r.bound = spec.eps_ext;
  r.distance = composed_output_distance(spec, state);
  r.min_entropy = min_entropy(state);
  r.k_required = composed_k_required(spec);
  r.hypothesis_met = r.min_entropy >= r.k_required - 1e-9;
  r.holds = !r.hypothesis_met || r.distance <= r.bound + 1e-9;
  return r;
}

}  // namespace unplab
