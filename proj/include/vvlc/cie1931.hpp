#pragma once

#include <array>
#include <cstddef>

namespace vvlc::cie1931 {

inline constexpr double kFirstNm = 380.0;
inline constexpr double kStepNm = 5.0;
inline constexpr std::size_t kSampleCount = 81;

/// x̄, ȳ, z̄ per row.
extern const std::array<std::array<double, 3>, kSampleCount> kColorMatching;

}  // namespace vvlc::cie1931
