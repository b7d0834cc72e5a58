#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace critwave {

enum class Grading { uniform, geometric, explicit_nodes };

// Strictly increasing radial nodes. Copies share the node storage.
class RadialGrid {
 public:
  static RadialGrid uniform(double r_min, double r_max, std::size_t n);
  // Spacing h_i = h0 * ratio^i; h0 is fixed by the span and the node count.
  static RadialGrid geometric(double r_min, double r_max, std::size_t n, double ratio);
  // Same family, ratio solved so that the first spacing equals h0.
  static RadialGrid geometric_first_step(double r_min, double r_max, std::size_t n, double h0);
  static RadialGrid from_nodes(std::vector<double> nodes);

  std::span<const double> nodes() const { return *nodes_; }
  std::size_t size() const { return nodes_->size(); }
  double operator[](std::size_t i) const { return (*nodes_)[i]; }
  double r_min() const { return nodes_->front(); }
  double r_max() const { return nodes_->back(); }
  Grading grading() const { return grading_; }
  double ratio() const { return ratio_; }

  // Largest i with nodes[i] <= y, clamped to [0, size-2].
  std::size_t locate(double y) const;
  // Nested refinement: every old node survives and each interval is split in two.
  RadialGrid refined() const;
  double min_spacing() const;

 private:
  RadialGrid(std::vector<double> nodes, Grading g, double ratio);
  std::shared_ptr<const std::vector<double>> nodes_;
  Grading grading_ = Grading::explicit_nodes;
  double ratio_ = 1.0;
};

// f(y) ~ coefficient * y^power * (log y)^log_power for large y.
struct TailLaw {
  double power = 0.0;
  double log_power = 0.0;
  double coefficient = 0.0;
  double operator()(double y) const;
};

// Tabulated radial profile. deriv may be empty when no derivative is known.
struct RadialFunction {
  RadialGrid grid;
  std::vector<double> value;
  std::vector<double> deriv;
  TailLaw tail;

  RadialFunction(RadialGrid g, std::vector<double> v, std::vector<double> d = {}, TailLaw t = {});

  bool has_deriv() const { return !deriv.empty(); }
  // Cubic Hermite interpolation when the derivative is tabulated, linear otherwise.
  // Below r_min the first value is returned; above r_max the tail law.
  double operator()(double y) const;
  double derivative(double y) const;
};

}  // namespace critwave
