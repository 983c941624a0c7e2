#include "distdim/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "distdim/errors.hpp"
#include "distdim/sequence.hpp"

namespace distdim {

namespace {

constexpr std::uint64_t kPairStream = 0x9a17'0d15'7a9c'e5ULL;

using PairList = std::vector<std::pair<std::size_t, std::size_t>>;

// Index pairs to evaluate: all i < j, or deterministic distinct pairs.
PairList pair_list(std::size_t n, const DistanceOptions& options, DistanceSource& source) {
  PairList pairs;
  if (options.sample_pairs) {
    source.kind = DistanceSource::Kind::sampled;
    source.seed = options.seed;
    if (n < 2) return pairs;
    const CounterRng rng(options.seed);
    pairs.reserve(*options.sample_pairs);
    for (std::uint64_t k = 0; k < *options.sample_pairs; ++k) {
      auto i = static_cast<std::size_t>(rng.below(n, kPairStream, 2 * k));
      auto j = static_cast<std::size_t>((i + 1 + rng.below(n - 1, kPairStream, 2 * k + 1)) % n);
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    return pairs;
  }
  source.kind = DistanceSource::Kind::full_pairs;
  const unsigned __int128 total = static_cast<unsigned __int128>(n) * (n > 0 ? n - 1 : 0) / 2;
  if (total > options.pair_cap)
    throw CapExceeded("full pair evaluation needs " + std::to_string(static_cast<std::uint64_t>(total)) +
                      " pairs (cap " + std::to_string(options.pair_cap) + "); request sampling instead");
  pairs.reserve(static_cast<std::size_t>(total));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Polyhedral norm of integer difference vectors: max_j |sum_l p_jl w_l|.
class ExactKernel {
 public:
  ExactKernel(const PolyhedralNorm& norm, const PointCloud& cloud) : norm_(norm), cloud_(cloud) {
    const auto& nums = norm.facet_numerators();
    double pmax = 0.0, span = 0.0;
    small_ = cloud.storage() == PointCloud::Storage::small_exact;
    for (const auto& row : nums)
      for (const auto& p : row) {
        small_ = small_ && fits_int64(p);
        pmax = std::max(pmax, std::abs(to_double(p)));
      }
    for (std::size_t j = 0; j < cloud.dim() && small_; ++j) {
      BigInt lo = cloud.lower_numerator(j), hi = cloud.upper_numerator(j);
      span = std::max({span, std::abs(to_double(BigInt(hi - lo))), std::abs(to_double(lo)), std::abs(to_double(hi))});
    }
    // keep every partial sum below 2^62 so the result also fits int64
    small_ = small_ && pmax * span * 2.0 * static_cast<double>(cloud.dim()) < 0x1p62;
    if (small_)
      for (const auto& row : nums) {
        std::vector<std::int64_t> r;
        for (const auto& p : row) r.push_back(p.convert_to<std::int64_t>());
        p64_.push_back(std::move(r));
      }
  }

  bool small() const { return small_; }

  std::int64_t pair64(std::size_t a, std::size_t b) const {
    const auto& data = cloud_.small_data();
    const std::size_t d = cloud_.dim();
    std::int64_t best = 0;
    for (const auto& row : p64_) {
      __int128 acc = 0;
      for (std::size_t l = 0; l < d; ++l) acc += static_cast<__int128>(row[l]) * (data[a * d + l] - data[b * d + l]);
      auto v = static_cast<std::int64_t>(acc < 0 ? -acc : acc);
      best = std::max(best, v);
    }
    return best;
  }

  std::int64_t single64(std::size_t a) const {
    const auto& data = cloud_.small_data();
    const std::size_t d = cloud_.dim();
    std::int64_t best = 0;
    for (const auto& row : p64_) {
      __int128 acc = 0;
      for (std::size_t l = 0; l < d; ++l) acc += static_cast<__int128>(row[l]) * data[a * d + l];
      best = std::max(best, static_cast<std::int64_t>(acc < 0 ? -acc : acc));
    }
    return best;
  }

  BigInt pair_big(std::size_t a, std::optional<std::size_t> b) const {
    const std::size_t d = cloud_.dim();
    BigInt best = 0;
    std::vector<BigInt> w(d);
    for (std::size_t l = 0; l < d; ++l) w[l] = b ? BigInt(cloud_.numerator(a, l) - cloud_.numerator(*b, l)) : cloud_.numerator(a, l);
    for (const auto& row : norm_.facet_numerators()) {
      BigInt acc = 0;
      for (std::size_t l = 0; l < d; ++l) acc += row[l] * w[l];
      if (acc < 0) acc = -acc;
      if (acc > best) best = acc;
    }
    return best;
  }

 private:
  const PolyhedralNorm& norm_;
  const PointCloud& cloud_;
  bool small_ = false;
  std::vector<std::vector<std::int64_t>> p64_;
};

void check_dims(const PointCloud& cloud, const NormSpec& norm) {
  if (cloud.empty()) throw std::invalid_argument("distance set of an empty cloud");
  if (cloud.dim() != dimension(norm)) throw std::invalid_argument("cloud and norm dimensions differ");
}

}  // namespace

std::string DistanceSource::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::full_pairs:
      out << "full-pairs(" << pairs << ")";
      break;
    case Kind::sampled:
      out << "sampled(" << pairs << ", seed=" << seed << ")";
      break;
    case Kind::pinned:
      out << "pinned(";
      for (std::size_t i = 0; i < pin.size(); ++i) out << (i ? "," : "") << pin[i];
      out << ")";
      break;
  }
  return out.str();
}

DistanceCloud distance_set(const PointCloud& cloud, const NormSpec& norm, const DistanceOptions& options) {
  check_dims(cloud, norm);
  DistanceCloud out;
  const PairList pairs = pair_list(cloud.size(), options, out.source);
  out.source.pairs = pairs.size();

  const auto* poly = std::get_if<PolyhedralNorm>(&norm);
  if (poly && cloud.is_exact()) {
    const BigInt den = cloud.denominator() * poly->common_denominator();
    ExactKernel kernel(*poly, cloud);
    if (kernel.small()) {
      std::vector<std::int64_t> vals;
      vals.reserve(pairs.size() + 1);
      for (auto [a, b] : pairs) vals.push_back(kernel.pair64(a, b));
      if (options.include_zero) vals.push_back(0);
      else vals.erase(std::remove(vals.begin(), vals.end(), 0), vals.end());
      sort_unique(vals);
      out.values = PointCloud::from_numerators(1, den, std::move(vals));
    } else {
      std::vector<BigInt> vals;
      vals.reserve(pairs.size() + 1);
      for (auto [a, b] : pairs) {
        BigInt v = kernel.pair_big(a, b);
        if (v != 0 || options.include_zero) vals.push_back(std::move(v));
      }
      if (options.include_zero) vals.emplace_back(0);
      sort_unique(vals);
      out.values = PointCloud::from_numerators(1, den, std::move(vals));
    }
    return out;
  }

  const PointCloud approx = cloud.to_approximate();
  const auto& data = approx.double_data();
  const std::size_t d = approx.dim();
  Vec vals, w(d);
  vals.reserve(pairs.size() + 1);
  for (auto [a, b] : pairs) {
    for (std::size_t l = 0; l < d; ++l) w[l] = data[a * d + l] - data[b * d + l];
    double v = eval(norm, w);
    if (v != 0.0 || options.include_zero) vals.push_back(v);
  }
  if (options.include_zero) vals.push_back(0.0);
  sort_unique(vals);
  out.values = PointCloud::approximate_flat(1, std::move(vals));
  return out;
}

DistanceCloud pinned_distance_set(const PointCloud& cloud, const NormSpec& norm, const RVec& pin,
                                  const DistanceOptions& options) {
  check_dims(cloud, norm);
  if (pin.size() != cloud.dim()) throw std::invalid_argument("pin has wrong dimension");
  const auto* poly = std::get_if<PolyhedralNorm>(&norm);
  if (!poly || !cloud.is_exact()) return pinned_distance_set(cloud, norm, to_double(pin), options);

  DistanceCloud out;
  out.source.kind = DistanceSource::Kind::pinned;
  out.source.pin = to_double(pin);
  out.source.pairs = cloud.size();
  RVec neg(pin.size());
  for (std::size_t j = 0; j < pin.size(); ++j) neg[j] = -pin[j];
  const PointCloud shifted = cloud.translated(neg);
  const BigInt den = shifted.denominator() * poly->common_denominator();
  ExactKernel kernel(*poly, shifted);
  if (kernel.small()) {
    std::vector<std::int64_t> vals(shifted.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) vals[i] = kernel.single64(i);
    if (!options.include_zero) vals.erase(std::remove(vals.begin(), vals.end(), 0), vals.end());
    sort_unique(vals);
    out.values = PointCloud::from_numerators(1, den, std::move(vals));
  } else {
    std::vector<BigInt> vals;
    vals.reserve(shifted.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      BigInt v = kernel.pair_big(i, std::nullopt);
      if (v != 0 || options.include_zero) vals.push_back(std::move(v));
    }
    sort_unique(vals);
    out.values = PointCloud::from_numerators(1, den, std::move(vals));
  }
  return out;
}

DistanceCloud pinned_distance_set(const PointCloud& cloud, const NormSpec& norm, const Vec& pin,
                                  const DistanceOptions& options) {
  check_dims(cloud, norm);
  if (pin.size() != cloud.dim()) throw std::invalid_argument("pin has wrong dimension");
  if (std::holds_alternative<PolyhedralNorm>(norm) && cloud.is_exact()) {
    RVec exact_pin;
    for (double v : pin) {
      if (!std::isfinite(v)) throw std::invalid_argument("pin coordinates must be finite");
      exact_pin.emplace_back(v);
    }
    return pinned_distance_set(cloud, norm, exact_pin, options);
  }
  DistanceCloud out;
  out.source.kind = DistanceSource::Kind::pinned;
  out.source.pin = pin;
  out.source.pairs = cloud.size();
  const PointCloud approx = cloud.to_approximate();
  const auto& data = approx.double_data();
  const std::size_t d = approx.dim();
  Vec vals, w(d);
  vals.reserve(approx.size());
  for (std::size_t i = 0; i < approx.size(); ++i) {
    for (std::size_t l = 0; l < d; ++l) w[l] = data[i * d + l] - pin[l];
    double v = eval(norm, w);
    if (v != 0.0 || options.include_zero) vals.push_back(v);
  }
  sort_unique(vals);
  out.values = PointCloud::approximate_flat(1, std::move(vals));
  return out;
}

// ---------------------------------------------------------------------------
// envelope

std::optional<int> denominator_shift(const BigInt& denominator, unsigned q) {
  BigInt power = 1;
  for (int t = 0; t <= 4; ++t) {
    if (power % denominator == 0) return t;
    power *= q;
  }
  return std::nullopt;
}

bool DigitEnvelope::contains(std::int64_t level) const {
  for (const auto& b : blocks)
    if (b.m <= level && level <= b.M) return true;
  return false;
}

std::int64_t DigitEnvelope::active_count(std::int64_t n) const {
  std::int64_t count = 0, covered_to = 0;
  for (const auto& b : blocks) {
    std::int64_t from = std::max({b.m, covered_to + 1, std::int64_t{1}});
    std::int64_t to = std::min(b.M, n);
    if (to >= from) count += to - from + 1;
    covered_to = std::max(covered_to, b.M);
  }
  return count;
}

namespace {

// Facet numerators rescaled to the denominator q^shift, as int64.
std::vector<std::vector<std::int64_t>> scaled_numerators(const PolyhedralNorm& norm, unsigned q, int shift) {
  const BigInt factor = ipow(q, shift) / norm.common_denominator();
  std::vector<std::vector<std::int64_t>> out;
  for (const auto& row : norm.facet_numerators()) {
    std::vector<std::int64_t> r;
    for (const auto& p : row) {
      BigInt v = p * factor;
      if (!fits_int64(v) || abs(v) > (BigInt(1) << 40)) throw std::invalid_argument("facet numerators too large");
      r.push_back(v.convert_to<std::int64_t>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Facets that define distinct functionals (v and -v count once).
std::vector<std::size_t> distinct_facets(const PolyhedralNorm& norm) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < norm.facet_count(); ++i) {
    bool dup = false;
    for (auto k : keep) dup = dup || norm.same_functional(i, k);
    if (!dup) keep.push_back(i);
  }
  return keep;
}

int require_shift(const PolyhedralNorm& norm, unsigned q) {
  auto t = denominator_shift(norm.common_denominator(), q);
  if (!t)
    throw std::invalid_argument("facet denominator " + norm.common_denominator().str() +
                                " divides no power q^t (t <= 4) of q = " + std::to_string(q));
  return *t;
}

BigInt ceil_div(const BigInt& a, const BigInt& b) {  // b > 0
  BigInt f = floor_div(a, b);
  return f * b == a ? f : BigInt(f + 1);
}

}  // namespace

DigitEnvelope digit_envelope(const BlockSchedule& schedule, unsigned q, std::size_t d, const PolyhedralNorm& norm) {
  if (q != schedule.base()) throw std::invalid_argument("envelope base differs from the schedule's base");
  if (norm.dim() != d) throw std::invalid_argument("norm dimension differs from d");
  const int t = require_shift(norm, q);
  std::int64_t pmax = 0;
  for (const auto& row : scaled_numerators(norm, q, t)) {
    std::int64_t sum = 0;
    for (auto p : row) sum += p < 0 ? -p : p;
    pmax = std::max(pmax, sum);
  }
  DigitEnvelope env;
  env.q = q;
  env.shift = t;
  env.lead = std::max<std::int64_t>(0, ceil_log(q, BigInt(pmax)) - t);
  env.pad = std::max<std::int64_t>(2 + ceil_log(q, BigInt(d)) + 1, t);
  for (const auto& b : schedule.blocks()) env.blocks.push_back({std::max<std::int64_t>(0, b.m - env.lead), b.M + env.pad});
  return env;
}

bool representable(const Rational& value, const DigitEnvelope& envelope, std::int64_t depth) {
  const unsigned q = envelope.q;
  auto e = exact_log(denominator(value), q);
  if (!e)
    throw std::invalid_argument("value " + to_string(value) + " has a denominator that is not a power of " +
                                std::to_string(q));
  const std::int64_t limit = depth + envelope.shift;
  // [lo, hi]: the still-unrepresented remainder, in units of q^-i
  BigInt lo = numerator(value), hi = lo;
  std::int64_t i = *e;
  while (i >= 0) {
    const bool allowed = i <= limit && envelope.contains(i);
    std::int64_t j = i;  // extend the run of positions with the same status
    while (j - 1 >= 0 && ((j - 1) <= limit && envelope.contains(j - 1)) == allowed) --j;
    const BigInt power = ipow(q, i - j + 1);
    if (allowed) {
      lo = ceil_div(lo - (power - 1), power);
      hi = floor_div(hi + (power - 1), power);
    } else {
      lo = ceil_div(lo, power);
      hi = floor_div(hi, power);
      if (lo > hi) return false;
    }
    i = j - 1;
  }
  return lo <= 0 && 0 <= hi;
}

EnvelopeCheck verify_envelope(const DistanceCloud& distances, const DigitEnvelope& envelope, unsigned q,
                              std::int64_t depth) {
  if (q != envelope.q) throw std::invalid_argument("envelope base differs from q");
  const PointCloud& values = distances.values;
  if (!values.is_exact()) throw std::invalid_argument("envelope verification needs exact distances");
  EnvelopeCheck check;
  for (std::size_t i = 0; i < values.size(); ++i) {
    Rational v = values.coord(i, 0);
    ++check.checked;
    if (!representable(v, envelope, depth)) {
      check.pass = false;
      check.counterexample = v;
      check.index = i;
      return check;
    }
  }
  return check;
}

EnvelopeCertificate certify_envelope(const BlockSchedule& schedule, const PolyhedralNorm& norm,
                                     const DigitEnvelope& envelope, std::int64_t depth) {
  const unsigned q = envelope.q;
  if (q != schedule.base()) throw std::invalid_argument("envelope base differs from the schedule's base");
  const int t = require_shift(norm, q);
  if (t != envelope.shift) throw std::invalid_argument("envelope shift does not match the norm");
  const auto scaled = scaled_numerators(norm, q, t);
  const std::size_t d = norm.dim();
  const std::int64_t top = depth + t;
  const auto qi = static_cast<std::int64_t>(q);

  EnvelopeCertificate cert;
  cert.certified = true;

  for (auto facet : distinct_facets(norm)) {
    const auto& p = scaled[facet];
    // every achievable coefficient sum_l p_l delta_l, delta_l in [-(q-1), q-1]
    std::map<std::int64_t, std::vector<int>> coeffs{{0, std::vector<int>(d, 0)}};
    for (std::size_t l = 0; l < d; ++l) {
      std::map<std::int64_t, std::vector<int>> next;
      for (const auto& [c, delta] : coeffs)
        for (int s = -(static_cast<int>(q) - 1); s <= static_cast<int>(q) - 1; ++s) {
          auto it = next.try_emplace(c + p[l] * s, delta);
          if (it.second) it.first->second[l] = s;
        }
      coeffs = std::move(next);
    }

    struct State {
      std::int64_t lo, hi;
      std::size_t parent;
      std::int64_t c;
    };
    std::vector<std::vector<State>> layers;
    layers.push_back({State{0, 0, 0, 0}});
    std::optional<std::pair<std::size_t, std::size_t>> failure;  // (layer, state) whose next step failed
    std::int64_t failing_c = 0;

    auto floor_d = [](std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    auto ceil_d = [&](std::int64_t a, std::int64_t b) { return -floor_d(-a, b); };

    for (std::int64_t i = top; i >= 0 && !failure; --i) {
      const std::int64_t m = i - t;
      const bool free_level = m >= 1 && m <= depth && schedule.is_active(m);
      const bool allowed = envelope.contains(i);
      std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
      std::vector<State> next;
      const auto& prev = layers.back();
      for (std::size_t s = 0; s < prev.size() && !failure; ++s) {
        auto step = [&](std::int64_t c) {
          std::int64_t lo = prev[s].lo + c, hi = prev[s].hi + c, nlo, nhi;
          if (allowed) {
            nlo = ceil_d(lo - (qi - 1), qi);
            nhi = floor_d(hi + (qi - 1), qi);
          } else {
            nlo = ceil_d(lo, qi);
            nhi = floor_d(hi, qi);
          }
          if (nlo > nhi) {
            failure = {layers.size() - 1, s};
            failing_c = c;
            return;
          }
          if (seen.try_emplace({nlo, nhi}, next.size()).second) next.push_back(State{nlo, nhi, s, c});
        };
        if (free_level) {
          for (const auto& entry : coeffs) {
            step(entry.first);
            if (failure) break;
          }
        } else {
          step(0);
        }
      }
      if (!failure) {
        cert.states = std::max(cert.states, next.size());
        layers.push_back(std::move(next));
      }
    }
    if (!failure) {
      const auto& last = layers.back();
      for (std::size_t s = 0; s < last.size(); ++s)
        if (!(last[s].lo <= 0 && 0 <= last[s].hi)) {
          failure = {layers.size() - 1, s};
          failing_c = std::numeric_limits<std::int64_t>::min();
          break;
        }
    }
    if (!failure) continue;

    // Walk the back-pointers to recover one digit-difference path.
    cert.certified = false;
    cert.facet = facet;
    cert.x.assign(d, Rational(0));
    cert.y.assign(d, Rational(0));
    auto add_level = [&](std::int64_t position, std::int64_t c) {
      const std::int64_t m = position - t;
      if (m < 1) return;
      const auto& delta = coeffs.at(c);
      Rational w(BigInt(1), ipow(q, m));
      for (std::size_t l = 0; l < d; ++l) {
        if (delta[l] > 0) cert.x[l] += w * delta[l];
        if (delta[l] < 0) cert.y[l] += w * (-delta[l]);
      }
    };
    auto [layer, state] = *failure;
    if (failing_c != std::numeric_limits<std::int64_t>::min())
      add_level(top - static_cast<std::int64_t>(layer), failing_c);
    while (layer > 0) {
      const State& st = layers[layer][state];
      add_level(top - static_cast<std::int64_t>(layer) + 1, st.c);
      state = st.parent;
      --layer;
    }
    Rational v = 0;
    for (std::size_t l = 0; l < d; ++l) v += norm.facets()[facet][l] * (cert.x[l] - cert.y[l]);
    cert.value = v;
    return cert;
  }
  return cert;
}

CoveringProfile distance_upper_profile(const BlockSchedule& schedule, const PolyhedralNorm& norm,
                                       std::int64_t depth, const std::vector<std::int64_t>& levels) {
  const unsigned q = schedule.base();
  const int t = require_shift(norm, q);
  const auto scaled = scaled_numerators(norm, q, t);
  std::vector<std::int64_t> weights;
  for (auto f : distinct_facets(norm)) {
    std::int64_t sum = 0;
    for (auto v : scaled[f]) sum += v < 0 ? -v : v;
    weights.push_back(sum);
  }
  std::vector<ProfileEntry> entries;
  for (auto N : levels) {
    BigInt total = 0;
    const std::int64_t last = std::min(depth, N - t);  // deepest level whose digit lands at a position <= N
    for (auto P : weights) {
      BigInt count = 2 * P + 1;
      for (const auto& b : schedule.blocks()) {
        std::int64_t to = std::min(b.M, last);
        if (to < b.m) break;
        count *= BigInt(2 * P) * (ipow(q, to - b.m + 1) - 1) + 1;
      }
      total += count;
    }
    entries.push_back({Rational(BigInt(1), ipow(q, N)), total, Provenance::bound});
  }
  return CoveringProfile(std::move(entries), "checkpoint q^-N upper bound");
}

CoveringProfile distance_lower_profile(const BlockSchedule& schedule, const PolyhedralNorm& norm,
                                       std::int64_t depth, const std::vector<std::int64_t>& levels) {
  const unsigned q = schedule.base();
  Rational lambda = 0;
  for (std::size_t l = 0; l < norm.dim(); ++l) {
    RVec e(norm.dim(), Rational(0));
    e[l] = 1;
    lambda = std::max(lambda, norm.eval(e));
  }
  Rational inv = 1 / lambda;
  BigInt per_cell = ceil_div(numerator(inv), denominator(inv)) + 1;
  std::vector<ProfileEntry> entries;
  for (auto N : levels) {
    BigInt points = ipow(q, schedule.active_count(std::min(N, depth)));
    entries.push_back({Rational(BigInt(1), ipow(q, N)), ceil_div(points, per_cell), Provenance::bound});
  }
  return CoveringProfile(std::move(entries), "checkpoint q^-N lower bound");
}

}  // namespace distdim
