#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qgca {

/// Scalar codebook produced by the online quantizer. codewords[m] carries
/// counts[m] input samples; assignments[i] is the codeword index of sample i.
struct Codebook {
  std::vector<double> codewords;
  std::vector<std::size_t> counts;
  double threshold = 0.0;
  std::vector<std::size_t> assignments;

  std::size_t size() const noexcept { return codewords.size(); }
  std::size_t total_count() const noexcept;
};

/// Single pass in input order: a sample within `epsilon` of its nearest
/// codeword is merged into it (the codeword value is left unchanged),
/// otherwise it becomes a new codeword. Equidistant codewords resolve to the
/// lower index.
Codebook quantize(std::span<const double> errors, double epsilon);

}  // namespace qgca
