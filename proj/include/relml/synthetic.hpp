#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "relml/schema.hpp"

namespace relml {

/// Parameters of the synthetic relational benchmark.
///
/// Every child has a latent position t in [0, 1); its class is the quantile
/// bin of t and its informative features are t plus Gaussian noise, followed
/// by pure-noise dimensions; every feature column is then z-scored. Each parent has a home class. With probability
/// `correlation` (rho) a link goes to a child of the home class, otherwise to
/// any child; likewise a numeric link attribute tracks the child's t and a
/// categorical one follows a per-parent class coding with probability rho,
/// and is uniform otherwise. rho = 0 makes the relation independent of the
/// labels; rho = 1 makes every common-parent pair same-class.
struct SyntheticConfig {
  std::size_t n_parents = 200;
  std::size_t n_children = 600;
  std::size_t n_classes = 5;
  double correlation = 0.8;
  std::size_t alpha = 1;  ///< numeric association attributes
  std::size_t beta = 1;   ///< categorical association attributes
  std::size_t links_per_parent = 100;
  std::size_t informative_dims = 1;
  std::size_t noise_dims = 4;
  double feature_noise = 0.1;  ///< std of informative features around t
  double noise_scale = 1.0;    ///< std of the noise dimensions
  double value_noise = 0.05;   ///< std of numeric link values around t
  std::uint64_t seed = 0;

  /// Throws InvalidCorrelation for rho outside [0, 1] and InvalidArgument
  /// for empty or inconsistent sizes.
  void validate() const;
};

/// Tables "Parent" and "Child" (labelled) linked by "Link", oriented toward
/// Child. The same config always yields the same schema, bit for bit.
RelationalSchema generate_synthetic(const SyntheticConfig& config);

/// "default", or comma-separated key=value overrides of the defaults, for
/// example "rho=0,children=300,seed=4". Keys: parents, children, classes,
/// rho, alpha, beta, links, informative, noise_dims, feature_noise,
/// noise_scale, value_noise, seed. Throws InvalidArgument.
SyntheticConfig parse_synthetic_spec(std::string_view spec);
std::string describe(const SyntheticConfig& config);

}  // namespace relml
