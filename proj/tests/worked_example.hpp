#pragma once

// Two-feature tree from the responsibility worked example: d = (len=10, emotion=30) in raw
// units over [0,100]. One improving path only needs emotion <= 10; the other needs
// len > 20 and emotion <= 15.

#include "precog/forest.hpp"
#include "precog/tcruise.hpp"

namespace worked {

inline constexpr int kLen = 0;
inline constexpr int kEmotion = 1;

inline precog::FeatureSchema schema() {
  return precog::FeatureSchema({{"len", precog::FeatureCategory::informativeness, 0.0, 100.0},
                                {"emotion", precog::FeatureCategory::subjectivity, 0.0, 100.0}});
}

inline precog::RandomForest model() {
  using precog::Comparator;
  precog::Tree tree;
  tree.paths = {
      {{{kEmotion, Comparator::le, 0.10}}, 0, {4, 0}},
      {{{kEmotion, Comparator::gt, 0.10}, {kLen, Comparator::le, 0.20}}, 1, {0, 6}},
      {{{kEmotion, Comparator::gt, 0.10}, {kLen, Comparator::gt, 0.20}, {kEmotion, Comparator::le, 0.15}}, 0, {3, 0}},
      {{{kEmotion, Comparator::gt, 0.10}, {kLen, Comparator::gt, 0.20}, {kEmotion, Comparator::gt, 0.15}}, 1, {0, 5}},
  };
  return precog::RandomForest(schema(), {"high", "low"}, {1.0, 0.0}, {tree}, 0);
}

inline precog::FeatureVector point() {
  precog::Vector raw(2);
  raw << 10.0, 30.0;
  return schema().normalize(raw);
}

/// Perturbations measured in raw units so the numbers match the worked example.
inline precog::ImpactConfig config() {
  precog::ImpactConfig cfg;
  cfg.discountScale = schema().spans();
  return cfg;
}

inline constexpr std::size_t kGreen = 0;
inline constexpr std::size_t kBlue = 2;

}  // namespace worked
