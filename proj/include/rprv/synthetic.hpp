#pragma once

#include "rprv/trajectory.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace rprv {

struct Sinusoid {
  double amplitude = 0.0;
  double period = 1.0;
  double phase = 0.0;  // radians
};

// offset + sum_k a_k cos(2 pi tau / period_k + phase_k), identical in every component.
struct Waveform {
  double offset = 90.0;
  std::vector<Sinusoid> terms{{25.0, 210.0, 0.0}};

  double operator()(double tau) const;
};

// Base trajectory plus i.i.d. per-time Gaussian noise: sigma0 on the nominal side, sigma on the shifted side.
struct SyntheticSpec {
  Waveform waveform;
  std::optional<Trajectory> base;  // overrides the waveform (and length / dimension) when set
  double sigma0 = 3.0;
  double sigma = 3.5;
  std::size_t length = 106;
  std::size_t dimension = 1;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on nonpositive noise or an empty shape.
  void validate() const;
  Trajectory base_trajectory() const;
};

enum class Side { nominal, shifted };

// Independent generator per (seed, stream...) tuple; identical on every run.
std::mt19937_64 derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> streams);

std::vector<Trajectory> generate_synthetic(const SyntheticSpec& spec, std::size_t count, Side side,
                                           std::mt19937_64& rng, const std::string& id_prefix = "traj");

// Convenience overload seeded from spec.seed.
std::vector<Trajectory> generate_synthetic(const SyntheticSpec& spec, std::size_t count, Side side);

}  // namespace rprv
