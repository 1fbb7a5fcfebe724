#pragma once

#include <vector>

#include "dam/types.hpp"

namespace dam {

/// Gray-labelled QAM on a rectangular grid with unit average symbol energy.
///
/// Square orders (4, 16, 64, 256) use a binary-reflected Gray code per axis.
/// Order 128 is the 12 x 12 cross (grid minus the four 2 x 2 corners) built from
/// an 8 x 16 Gray rectangle whose outer columns are folded onto the cross arms.
/// Detection slices each axis independently onto the grid; a cell outside the
/// cross maps to its nearest constellation point.
class QamConstellation {
 public:
  explicit QamConstellation(int order);

  int order() const { return order_; }
  int bits() const { return bits_; }
  const std::vector<cplx>& points() const { return points_; }
  const std::vector<unsigned>& labels() const { return labels_; }

  cplx modulate(unsigned label) const { return by_label_[label]; }
  unsigned demodulate(cplx y) const;

  /// Exact bit error rate of this detector at symbol SNR gamma = Es / N0, from
  /// the product-form probability of every decision cell.
  double ber(double gamma) const;

 private:
  int cell_of(double coord) const;

  int order_ = 0;
  int bits_ = 0;
  int levels_ = 0;      // grid levels per axis
  double spacing_ = 0;  // half the distance between neighbouring levels
  std::vector<cplx> points_;
  std::vector<unsigned> labels_;
  std::vector<cplx> by_label_;
  std::vector<unsigned> cell_label_;  // levels_ x levels_, row = x cell
};

/// Cached instance; throws Unsupported for orders other than 4, 16, 64, 128, 256.
const QamConstellation& qam(int order);

}  // namespace dam
