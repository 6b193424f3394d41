#pragma once

#include <string>

namespace fvsm {

/// Porter stemmer for lowercase English words.
///
/// Follows the original algorithm as distributed by its author, including the
/// step-2 refinements (bli -> ble, logi -> log) that the reference
/// implementation and its published test vocabulary use. Words of length 1 or
/// 2 are returned unchanged.
///
/// Throws std::invalid_argument if the input is empty or contains anything
/// other than lowercase ASCII letters.
std::string porter_stem(const std::string& word);

}  // namespace fvsm
