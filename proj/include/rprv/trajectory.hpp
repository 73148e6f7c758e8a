#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rprv {

using StateVector = std::vector<double>;

// Uniformly sampled, integer-indexed sequence of states x_0..x_L, stored row-major.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::size_t dimension, std::vector<double> flat, std::string id = {});

  static Trajectory from_states(const std::vector<StateVector>& states, std::string id = {});

  std::size_t dimension() const noexcept { return dimension_; }
  // Number of states, i.e. L + 1.
  std::size_t size() const noexcept { return dimension_ == 0 ? 0 : data_.size() / dimension_; }
  bool empty() const noexcept { return data_.empty(); }
  const std::string& id() const noexcept { return id_; }

  std::span<const double> state(std::size_t tau) const;
  std::span<const double> data() const noexcept { return data_; }
  std::vector<StateVector> states() const;

  // First `count` states; keeps the id.
  Trajectory prefix(std::size_t count) const;
  // Every `stride`-th state starting at index 0.
  Trajectory downsampled(std::size_t stride) const;
  Trajectory with_id(std::string id) const;

  bool operator==(const Trajectory&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<double> data_;
  std::string id_;
};

}  // namespace rprv
