#include "subrh/lattice.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "subrh/ops.hpp"

namespace subrh {

namespace {

long mod(long a, long n) {
  const long r = a % n;
  return r < 0 ? r + n : r;
}

// out[k] += coef · src[(k + shift) mod nz]
void add_shifted(double* out, const double* src, long shift, long nz, double coef) {
  const long s = mod(shift, nz);
  const long head = nz - s;
  for (long k = 0; k < head; ++k) out[k] += coef * src[k + s];
  for (long k = head; k < nz; ++k) out[k] += coef * src[k - head];
}

}  // namespace

HorizontalLattice::HorizontalLattice(int n) : n_(n), nz_(static_cast<long>(n) * n) {
  if (n < 8) throw std::invalid_argument("lattice size must be at least 8, got " + std::to_string(n));
}

std::size_t HorizontalLattice::index(int i, int j, long k) const {
  return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)) *
             static_cast<std::size_t>(nz_) +
         static_cast<std::size_t>(mod(k, nz_));
}

std::array<std::size_t, 4> HorizontalLattice::neighbors(std::size_t idx) const {
  const auto nz = static_cast<std::size_t>(nz_);
  const long k = static_cast<long>(idx % nz);
  const auto col = idx / nz;
  const int j = static_cast<int>(col % static_cast<std::size_t>(n_));
  const int i = static_cast<int>(col / static_cast<std::size_t>(n_));
  const int ip = (i + 1) % n_, im = (i + n_ - 1) % n_;
  std::array<std::size_t, 4> nb{};
  nb[0] = index(ip, j, k + j);
  nb[1] = index(im, j, k - j);
  nb[2] = j + 1 < n_ ? index(i, j + 1, k) : index(i, 0, k - static_cast<long>(i) * n_);
  nb[3] = j > 0 ? index(i, j - 1, k) : index(i, n_ - 1, k + static_cast<long>(i) * n_);
  return nb;
}

std::vector<std::uint16_t> HorizontalLattice::step_distances(std::size_t source, int max_steps) const {
  std::vector<std::uint16_t> dist(size(), kUnreached);
  std::deque<std::size_t> queue;
  dist[source] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    const int d = dist[cur];
    if (d >= max_steps) continue;
    for (std::size_t nb : neighbors(cur)) {
      if (dist[nb] != kUnreached) continue;
      dist[nb] = static_cast<std::uint16_t>(d + 1);
      queue.push_back(nb);
    }
  }
  return dist;
}

void HorizontalLattice::heat_step(std::span<const double> in, std::span<double> out) const {
  const double lambda = heat_dt() / (h() * h());
  const auto nz = static_cast<std::size_t>(nz_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      const double* c = in.data() + index(i, j, 0);
      double* o = out.data() + index(i, j, 0);
      for (std::size_t k = 0; k < nz; ++k) o[k] = (1.0 - 4.0 * lambda) * c[k];
      const int ip = (i + 1) % n_, im = (i + n_ - 1) % n_;
      // u(i+1, j, k + j) and u(i−1, j, k − j)
      add_shifted(o, in.data() + index(ip, j, 0), j, nz_, lambda);
      add_shifted(o, in.data() + index(im, j, 0), -j, nz_, lambda);
      if (j + 1 < n_)
        add_shifted(o, in.data() + index(i, j + 1, 0), 0, nz_, lambda);
      else
        add_shifted(o, in.data() + index(i, 0, 0), -static_cast<long>(i) * n_, nz_, lambda);
      if (j > 0)
        add_shifted(o, in.data() + index(i, j - 1, 0), 0, nz_, lambda);
      else
        add_shifted(o, in.data() + index(i, n_ - 1, 0), static_cast<long>(i) * n_, nz_, lambda);
    }
}

double cc_distance(int grid_n, GridPoint p, GridPoint q) {
  const HorizontalLattice lat(grid_n);
  const auto dist = lat.step_distances(lat.from_grid(p.i, p.j, p.k));
  return dist[lat.from_grid(q.i, q.j, q.k)] * lat.h();
}

double cc_ball_volume(int grid_n, GridPoint p, double delta) {
  const HorizontalLattice lat(grid_n);
  const int steps = static_cast<int>(std::floor(delta / lat.h() + 1e-9));
  const auto dist = lat.step_distances(lat.from_grid(p.i, p.j, p.k), steps);
  std::size_t count = 0;
  for (auto d : dist)
    if (d != HorizontalLattice::kUnreached) ++count;
  return static_cast<double>(count) * lat.cell_volume();
}

BallScaling cc_ball_scaling(int grid_n, double delta_lo, double delta_hi, GridPoint center) {
  const HorizontalLattice lat(grid_n);
  const int lo = static_cast<int>(std::ceil(delta_lo / lat.h() - 1e-9));
  const int hi = static_cast<int>(std::floor(delta_hi / lat.h() + 1e-9));
  if (lo < 1 || hi <= lo) throw std::invalid_argument("cc_ball_scaling needs 0 < delta_lo < delta_hi");
  const auto dist = lat.step_distances(lat.from_grid(center.i, center.j, center.k), hi);
  std::vector<std::size_t> shell(static_cast<std::size_t>(hi) + 1, 0);
  for (auto d : dist)
    if (d != HorizontalLattice::kUnreached) ++shell[d];
  BallScaling out;
  std::size_t cumulative = 0;
  std::vector<double> lx, ly;
  for (int r = 0; r <= hi; ++r) {
    cumulative += shell[static_cast<std::size_t>(r)];
    if (r < lo) continue;
    out.radii.push_back(r * lat.h());
    out.volumes.push_back(static_cast<double>(cumulative) * lat.cell_volume());
    lx.push_back(std::log(out.radii.back()));
    ly.push_back(std::log(out.volumes.back()));
  }
  out.exponent = linear_fit(lx, ly).first;
  return out;
}

}  // namespace subrh
