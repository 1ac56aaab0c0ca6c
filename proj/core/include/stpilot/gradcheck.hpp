#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace stpilot::embed {

enum class GradKernel {
  CompressTime,  ///< two-layer conv stack with its activation
  EmbedCamera,   ///< linear lift of extrinsics followed by the conv stack
  MlpCompress,   ///< dense-activation-dense compressor of the ablation variant
  Linear,        ///< a single dense layer with identity activation
};

inline constexpr GradKernel kTrainableKernels[] = {GradKernel::CompressTime,
                                                   GradKernel::EmbedCamera,
                                                   GradKernel::MlpCompress};

std::string_view to_string(GradKernel k);
GradKernel parse_grad_kernel(std::string_view name);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t entries_checked = 0;
  std::string worst_entry;  ///< "<tensor>[<index>]"
};

/// Compares hand-written backward passes against central finite differences
/// (step 1e-4) on a random small instance (F <= 16, D <= 8) drawn from `seed`.
/// The loss is <G, y> for a random upstream gradient G; every parameter entry
/// and every input entry is checked. With `corrupt`, the largest analytic
/// parameter gradient is negated before comparison.
GradCheckResult grad_check(GradKernel kernel, std::uint64_t seed, bool corrupt = false);

/// |a - n| / max(|a|, |n|, floor).
inline constexpr double kRelErrorFloor = 1e-6;

}  // namespace stpilot::embed
