#include "dam/modulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace dam {

namespace {

unsigned gray(unsigned i) { return i ^ (i >> 1); }

// Upper tail of the standard normal.
double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// P(a + N(0, s^2) in [lo, hi]) with care for tails.
double interval_prob(double a, double lo, double hi, double s) {
  const double zl = (lo - a) / s;
  const double zh = (hi - a) / s;
  if (zl >= 0) return qfunc(zl) - qfunc(zh);
  if (zh <= 0) return qfunc(-zh) - qfunc(-zl);
  return 1.0 - qfunc(-zl) - qfunc(zh);
}

}  // namespace

QamConstellation::QamConstellation(int order) : order_(order) {
  struct Raw {
    int x, y;
    unsigned label;
  };
  std::vector<Raw> raw;
  if (order == 4 || order == 16 || order == 64 || order == 256) {
    levels_ = static_cast<int>(std::lround(std::sqrt(order)));
    const int b = std::countr_zero(static_cast<unsigned>(levels_));
    for (int ix = 0; ix < levels_; ++ix)
      for (int iy = 0; iy < levels_; ++iy)
        raw.push_back({2 * ix - (levels_ - 1), 2 * iy - (levels_ - 1),
                       (gray(ix) << b) | gray(iy)});
  } else if (order == 128) {
    levels_ = 12;
    for (int ii = 0; ii < 8; ++ii)
      for (int iq = 0; iq < 16; ++iq) {
        const int i = 2 * ii - 7;
        const int q = 2 * iq - 15;
        const unsigned label = (gray(ii) << 4) | gray(iq);
        if (std::abs(q) > 11) {
          const int si = i > 0 ? 1 : -1;
          const int sq = q > 0 ? 1 : -1;
          raw.push_back({si * (std::abs(q) - 4), sq * (8 - std::abs(i)), label});
        } else {
          raw.push_back({i, q, label});
        }
      }
  } else {
    throw Unsupported("QAM order " + std::to_string(order) + " is not supported");
  }
  bits_ = std::countr_zero(static_cast<unsigned>(order));

  double energy = 0;
  for (const auto& r : raw) energy += r.x * r.x + r.y * r.y;
  energy /= static_cast<double>(raw.size());
  spacing_ = 1.0 / std::sqrt(energy);

  by_label_.assign(order, cplx{});
  std::vector<int> grid(static_cast<size_t>(levels_) * levels_, -1);
  for (size_t k = 0; k < raw.size(); ++k) {
    const cplx p{raw[k].x * spacing_, raw[k].y * spacing_};
    points_.push_back(p);
    labels_.push_back(raw[k].label);
    by_label_[raw[k].label] = p;
    const int cx = (raw[k].x + levels_ - 1) / 2;
    const int cy = (raw[k].y + levels_ - 1) / 2;
    grid[static_cast<size_t>(cx) * levels_ + cy] = static_cast<int>(k);
  }

  cell_label_.assign(grid.size(), 0);
  for (int cx = 0; cx < levels_; ++cx)
    for (int cy = 0; cy < levels_; ++cy) {
      int k = grid[static_cast<size_t>(cx) * levels_ + cy];
      if (k < 0) {
        // Cell outside the constellation: nearest point to the cell centre,
        // lowest index on ties.
        const cplx c{(2 * cx - (levels_ - 1)) * spacing_, (2 * cy - (levels_ - 1)) * spacing_};
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < points_.size(); ++j) {
          const double d = std::norm(points_[j] - c);
          if (d < best - 1e-12) {
            best = d;
            k = static_cast<int>(j);
          }
        }
      }
      cell_label_[static_cast<size_t>(cx) * levels_ + cy] = labels_[k];
    }
}

int QamConstellation::cell_of(double coord) const {
  const int c = static_cast<int>(std::floor(coord / (2.0 * spacing_) + levels_ / 2.0));
  return std::clamp(c, 0, levels_ - 1);
}

unsigned QamConstellation::demodulate(cplx y) const {
  return cell_label_[static_cast<size_t>(cell_of(y.real())) * levels_ + cell_of(y.imag())];
}

double QamConstellation::ber(double gamma) const {
  if (gamma < 0) throw DomainError("negative SNR");
  if (gamma == 0) return 0.5;
  if (std::isinf(gamma)) return 0.0;
  const double s = std::sqrt(1.0 / (2.0 * gamma));  // per-dimension noise deviation
  const double inf = std::numeric_limits<double>::infinity();

  // prob[level][cell] for one axis.
  std::vector<double> prob(static_cast<size_t>(levels_) * levels_);
  for (int a = 0; a < levels_; ++a) {
    const double x = (2 * a - (levels_ - 1)) * spacing_;
    for (int c = 0; c < levels_; ++c) {
      const double lo = c == 0 ? -inf : (2 * c - levels_) * spacing_;
      const double hi = c == levels_ - 1 ? inf : (2 * c + 2 - levels_) * spacing_;
      prob[static_cast<size_t>(a) * levels_ + c] = interval_prob(x, lo, hi, s);
    }
  }

  double errors = 0;
  for (size_t k = 0; k < points_.size(); ++k) {
    const int ax = static_cast<int>(std::lround(points_[k].real() / spacing_ + levels_ - 1)) / 2;
    const int ay = static_cast<int>(std::lround(points_[k].imag() / spacing_ + levels_ - 1)) / 2;
    const double* px = &prob[static_cast<size_t>(ax) * levels_];
    const double* py = &prob[static_cast<size_t>(ay) * levels_];
    for (int cx = 0; cx < levels_; ++cx) {
      double row = 0;
      for (int cy = 0; cy < levels_; ++cy) {
        const unsigned diff = labels_[k] ^ cell_label_[static_cast<size_t>(cx) * levels_ + cy];
        if (diff) row += py[cy] * std::popcount(diff);
      }
      errors += px[cx] * row;
    }
  }
  return errors / (static_cast<double>(points_.size()) * bits_);
}

const QamConstellation& qam(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QamConstellation>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, std::make_unique<QamConstellation>(order)).first;
  return *it->second;
}

}  // namespace dam
