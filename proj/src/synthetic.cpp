#include "rprv/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rprv {

double Waveform::operator()(double tau) const {
  double v = offset;
  for (const auto& s : terms) v += s.amplitude * std::cos(2.0 * std::numbers::pi * tau / s.period + s.phase);
  return v;
}

void SyntheticSpec::validate() const {
  if (!(sigma0 > 0.0) || !(sigma > 0.0)) throw std::invalid_argument("noise scales must be positive");
  if (base) return;
  if (length == 0 || dimension == 0) throw std::invalid_argument("synthetic length and dimension must be positive");
  for (const auto& s : waveform.terms)
    if (!(s.period > 0.0)) throw std::invalid_argument("sinusoid period must be positive");
}

Trajectory SyntheticSpec::base_trajectory() const {
  if (base) return *base;
  std::vector<double> flat;
  flat.reserve(length * dimension);
  for (std::size_t tau = 0; tau < length; ++tau) {
    const double v = waveform(static_cast<double>(tau));
    for (std::size_t j = 0; j < dimension; ++j) flat.push_back(v);
  }
  return Trajectory(dimension, std::move(flat), "base");
}

std::mt19937_64 derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> streams) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (auto s : streams) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::vector<Trajectory> generate_synthetic(const SyntheticSpec& spec, std::size_t count, Side side,
                                           std::mt19937_64& rng, const std::string& id_prefix) {
  spec.validate();
  const Trajectory base = spec.base_trajectory();
  const double sd = side == Side::nominal ? spec.sigma0 : spec.sigma;
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Trajectory> out;
  out.reserve(count);
  const auto mean = base.data();
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> flat(mean.begin(), mean.end());
    for (double& v : flat) v += sd * noise(rng);
    out.emplace_back(base.dimension(), std::move(flat), id_prefix + std::to_string(i));
  }
  return out;
}

std::vector<Trajectory> generate_synthetic(const SyntheticSpec& spec, std::size_t count, Side side) {
  auto rng = derive_rng(spec.seed, {side == Side::nominal ? 0u : 1u});
  return generate_synthetic(spec, count, side, rng);
}

}  // namespace rprv
