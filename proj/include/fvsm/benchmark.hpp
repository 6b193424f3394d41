#pragma once

namespace fvsm::benchmark {

// Scores reported for the original 8942-patent USPTO IoT study this tool
// reimplements. The corpus, the 156 + 61 manually labeled triads, and the
// resulting numbers are not redistributable, so these constants are
// documentation baselines for comparing your own runs against, never test
// targets.

inline constexpr int kIotCorpusSize = 8942;
inline constexpr int kIotTriadCountS1 = 156;
inline constexpr int kIotTriadCountS2 = 61;
inline constexpr int kIotSelectedClusterCount = 18;

inline constexpr double kIotCvValidationMean = 0.884;
inline constexpr double kIotCvTestMean = 0.880;
inline constexpr double kIotCvBestFoldTest = 0.917;

// Triad discrimination accuracy under Euclidean distance.
inline constexpr double kIotFeatureSpaceAccuracyS1 = 0.910;
inline constexpr double kIotFeatureSpaceAccuracyS2 = 0.672;
inline constexpr double kIotFeatureSpaceAccuracyAll = 0.843;
inline constexpr double kIotTfidfAccuracyS1 = 0.821;
inline constexpr double kIotTfidfAccuracyS2 = 0.639;
inline constexpr double kIotTfidfAccuracyAll = 0.770;

}  // namespace fvsm::benchmark
