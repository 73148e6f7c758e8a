#include "rprv/trajectory.hpp"

#include "rprv/error.hpp"

#include <cmath>

namespace rprv {

Trajectory::Trajectory(std::size_t dimension, std::vector<double> flat, std::string id)
    : dimension_{dimension}, data_{std::move(flat)}, id_{std::move(id)} {
  if (dimension_ == 0) throw InputError("trajectory dimension must be at least 1");
  if (data_.empty()) throw InputError("trajectory must contain at least one state");
  if (data_.size() % dimension_ != 0)
    throw InputError("trajectory data size is not a multiple of its dimension");
  for (double v : data_)
    if (!std::isfinite(v)) throw InputError("trajectory contains a non-finite value");
}

Trajectory Trajectory::from_states(const std::vector<StateVector>& states, std::string id) {
  if (states.empty()) throw InputError("trajectory must contain at least one state");
  const std::size_t n = states.front().size();
  std::vector<double> flat;
  flat.reserve(n * states.size());
  for (const auto& s : states) {
    if (s.size() != n) throw InputError("trajectory states have inconsistent dimensions");
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return Trajectory(n, std::move(flat), std::move(id));
}

std::span<const double> Trajectory::state(std::size_t tau) const {
  if (tau >= size()) throw std::out_of_range("trajectory index out of range");
  return std::span<const double>(data_).subspan(tau * dimension_, dimension_);
}

std::vector<StateVector> Trajectory::states() const {
  std::vector<StateVector> out;
  out.reserve(size());
  for (std::size_t tau = 0; tau < size(); ++tau) {
    auto s = state(tau);
    out.emplace_back(s.begin(), s.end());
  }
  return out;
}

Trajectory Trajectory::prefix(std::size_t count) const {
  if (count == 0 || count > size()) throw InputError("invalid trajectory prefix length");
  return Trajectory(dimension_,
                    std::vector<double>(data_.begin(), data_.begin() + count * dimension_), id_);
}

Trajectory Trajectory::downsampled(std::size_t stride) const {
  if (stride == 0) throw InputError("downsampling stride must be positive");
  std::vector<double> flat;
  for (std::size_t tau = 0; tau < size(); tau += stride) {
    auto s = state(tau);
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return Trajectory(dimension_, std::move(flat), id_);
}

Trajectory Trajectory::with_id(std::string id) const {
  Trajectory copy = *this;
  copy.id_ = std::move(id);
  return copy;
}

}  // namespace rprv
