#include "qgca/quantizer.hpp"

#include <cmath>
#include <iterator>
#include <map>
#include <numeric>

#include "qgca/error.hpp"

namespace qgca {

std::size_t Codebook::total_count() const noexcept {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Codebook quantize(std::span<const double> errors, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidParams, "quantization threshold must be a finite non-negative number");
  }
  Codebook book;
  book.threshold = epsilon;
  book.assignments.reserve(errors.size());

  // Codeword values are pairwise distinct (an exact repeat always merges), so
  // an ordered map gives the nearest neighbours as the two bracketing keys.
  std::map<double, std::size_t> index;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double e = errors[i];
    if (!std::isfinite(e)) {
      throw Error(ErrorCode::NonFinite, "error sample " + std::to_string(i) + " is not finite");
    }

    std::size_t best = book.size();
    double best_dist = 0.0;
    auto consider = [&](std::map<double, std::size_t>::const_iterator it) {
      const double d = std::abs(e - it->first);
      if (best == book.size() || d < best_dist || (d == best_dist && it->second < best)) {
        best = it->second;
        best_dist = d;
      }
    };
    if (!index.empty()) {
      auto upper = index.lower_bound(e);
      if (upper != index.end()) consider(upper);
      if (upper != index.begin()) consider(std::prev(upper));
    }

    if (best != book.size() && best_dist <= epsilon) {
      ++book.counts[best];
      book.assignments.push_back(best);
    } else {
      const std::size_t m = book.size();
      book.codewords.push_back(e);
      book.counts.push_back(1);
      book.assignments.push_back(m);
      index.emplace(e, m);
    }
  }
  return book;
}

}  // namespace qgca
