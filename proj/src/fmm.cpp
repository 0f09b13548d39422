#include "bie2d/fmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "bie2d/errors.hpp"
#include "bie2d/parallel.hpp"

// Classic complex-variable fast multipole method for the 2D Laplace kernel on
// a fixed-depth quadtree.  Multipole expansions about box centers,
//   phi(z) = Q log(z - zc) + sum_k a_k (z - zc)^-k,
// are translated into local Taylor expansions across well-separated boxes;
// adjacent boxes interact directly.  Only the real part of the potential is
// meaningful (the imaginary part is a branch-dependent harmonic conjugate).

namespace bie2d {

namespace {

using Cplx = std::complex<double>;

inline uint32_t box_id(int ix, int iy) {
  return (static_cast<uint32_t>(ix) << 16) | static_cast<uint32_t>(iy);
}

struct Level {
  std::unordered_map<uint32_t, int> smap;  // source-occupied boxes
  std::unordered_map<uint32_t, int> tmap;  // target-occupied boxes
  std::vector<uint32_t> sids, tids;        // dense index -> box id
  std::vector<Cplx> mult;                  // sids.size() * (P+1)
  std::vector<Cplx> local;                 // tids.size() * (P+1)
};

struct Tree {
  int depth = 2;
  int P = 20;
  double side = 1;     // root box side length (after normalization: 1)
  Vec2 lo{0, 0};       // root box corner in original coordinates
  double scale = 1;    // original side, used to undo normalization
  std::vector<Level> levels;
  std::vector<double> binom;  // Pascal table, (2P+2)^2
  int bn = 0;

  double B(int n, int k) const { return binom[n * bn + k]; }

  Cplx center(int level, uint32_t id) const {
    int ix = id >> 16, iy = id & 0xffff;
    double h = 1.0 / (1 << level);
    return Cplx((ix + 0.5) * h, (iy + 0.5) * h);
  }
};

// Expansion order from the requested absolute accuracy.  The multipole series
// across the standard interaction lists converges like rho^k with
// rho = sqrt(2)/2 / (2 - sqrt(2)/2) ~ 0.547; the total source strength scales
// the truncation error.
int pick_order(double eps, double total_charge) {
  double rho = 0.55;
  double target = eps / (8.0 * std::max(total_charge, 1e-300));
  if (target >= 1) return 12;
  int P = static_cast<int>(std::ceil(std::log(target) / std::log(rho)));
  return std::clamp(P, 12, 75);
}

}  // namespace

void fmm_laplace_sum(std::span<const Vec2> sources,
                     std::span<const double> charges,
                     std::span<const Vec2> targets, double eps, int threads,
                     double* potential, std::complex<double>* field) {
  const int ns = static_cast<int>(sources.size());
  const int nt = static_cast<int>(targets.size());
  if (sources.size() != charges.size())
    throw IndexMismatch("one charge per source required");
  for (int i = 0; i < nt; ++i) {
    if (potential) potential[i] = 0;
    if (field) field[i] = 0;
  }
  if (ns == 0 || nt == 0) return;

  // Bounding square over sources and targets, normalized to the unit box.
  Vec2 lo = sources[0], hi = sources[0];
  for (const Vec2& p : sources) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  for (const Vec2& p : targets) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double side = std::max(hi.x() - lo.x(), hi.y() - lo.y());
  if (side <= 0) side = 1;
  side *= 1.0 + 1e-12;

  double total_charge = 0, qsum = 0;
  for (double c : charges) {
    total_charge += std::abs(c);
    qsum += c;
  }

  Tree tree;
  tree.P = pick_order(eps, total_charge);
  tree.lo = lo;
  tree.scale = side;

  auto cell_at = [&](const Vec2& p, int depth) {
    int n = 1 << depth;
    int ix = std::min(n - 1, static_cast<int>((p.x() - lo.x()) / side * n));
    int iy = std::min(n - 1, static_cast<int>((p.y() - lo.y()) / side * n));
    return box_id(ix, iy);
  };

  // Depth: subdivide until the average occupancy of nonempty leaves is of the
  // order of the expansion length (balances near- and far-field work).
  int occ_target = std::max(tree.P, 32);
  int depth = 2;
  while (depth < 9) {
    std::vector<uint32_t> ids(ns);
    for (int j = 0; j < ns; ++j) ids[j] = cell_at(sources[j], depth);
    std::sort(ids.begin(), ids.end());
    int boxes = ids.empty() ? 0 : 1;
    for (int j = 1; j < ns; ++j)
      if (ids[j] != ids[j - 1]) ++boxes;
    if (ns <= boxes * occ_target) break;
    ++depth;
  }
  tree.depth = depth;
  const int P = tree.P;
  const int L = tree.depth;
  const int stride = P + 1;

  tree.bn = 2 * P + 2;
  tree.binom.assign(tree.bn * tree.bn, 0.0);
  for (int n = 0; n < tree.bn; ++n) {
    tree.binom[n * tree.bn + 0] = 1;
    for (int k = 1; k <= n; ++k)
      tree.binom[n * tree.bn + k] = tree.binom[(n - 1) * tree.bn + k - 1] +
                                    ((k <= n - 1) ? tree.binom[(n - 1) * tree.bn + k] : 0);
  }

  // Normalized complex coordinates in the unit root box.
  std::vector<Cplx> zsrc(ns), ztgt(nt);
  for (int j = 0; j < ns; ++j)
    zsrc[j] = Cplx((sources[j].x() - lo.x()) / side, (sources[j].y() - lo.y()) / side);
  for (int i = 0; i < nt; ++i)
    ztgt[i] = Cplx((targets[i].x() - lo.x()) / side, (targets[i].y() - lo.y()) / side);

  // Finest-level bucketing (CSR lists of point indices per occupied box).
  tree.levels.resize(L + 1);
  std::vector<int> src_box_of(ns), tgt_box_of(nt);
  std::vector<std::vector<int>> src_pts, tgt_pts;
  {
    Level& fl = tree.levels[L];
    for (int j = 0; j < ns; ++j) {
      uint32_t id = cell_at(sources[j], L);
      auto [it, inserted] = fl.smap.try_emplace(id, static_cast<int>(fl.sids.size()));
      if (inserted) {
        fl.sids.push_back(id);
        src_pts.emplace_back();
      }
      src_box_of[j] = it->second;
      src_pts[it->second].push_back(j);
    }
    for (int i = 0; i < nt; ++i) {
      uint32_t id = cell_at(targets[i], L);
      auto [it, inserted] = fl.tmap.try_emplace(id, static_cast<int>(fl.tids.size()));
      if (inserted) {
        fl.tids.push_back(id);
        tgt_pts.emplace_back();
      }
      tgt_box_of[i] = it->second;
      tgt_pts[it->second].push_back(i);
    }
  }
  // Occupancy of coarser levels: parents of occupied boxes.
  for (int l = L - 1; l >= 0; --l) {
    Level& lev = tree.levels[l];
    for (uint32_t id : tree.levels[l + 1].sids) {
      uint32_t pid = box_id((id >> 16) >> 1, (id & 0xffff) >> 1);
      if (lev.smap.try_emplace(pid, static_cast<int>(lev.sids.size())).second)
        lev.sids.push_back(pid);
    }
    for (uint32_t id : tree.levels[l + 1].tids) {
      uint32_t pid = box_id((id >> 16) >> 1, (id & 0xffff) >> 1);
      if (lev.tmap.try_emplace(pid, static_cast<int>(lev.tids.size())).second)
        lev.tids.push_back(pid);
    }
  }
  for (int l = 0; l <= L; ++l) {
    tree.levels[l].mult.assign(tree.levels[l].sids.size() * stride, Cplx(0, 0));
    tree.levels[l].local.assign(tree.levels[l].tids.size() * stride, Cplx(0, 0));
  }

  // ---- Upward pass: P2M at the finest level, then M2M.
  {
    Level& fl = tree.levels[L];
    for (size_t b = 0; b < fl.sids.size(); ++b) {
      Cplx zc = tree.center(L, fl.sids[b]);
      Cplx* m = &fl.mult[b * stride];
      for (int j : src_pts[b]) {
        double c = charges[j];
        Cplx u = zsrc[j] - zc;
        m[0] += c;
        Cplx upow = u;
        for (int k = 1; k <= P; ++k) {
          m[k] -= c * upow / static_cast<double>(k);
          upow *= u;
        }
      }
    }
  }
  std::vector<Cplx> zpow(2 * P + 2);
  for (int l = L; l > 2; --l) {
    Level& child = tree.levels[l];
    Level& parent = tree.levels[l - 1];
    for (size_t b = 0; b < child.sids.size(); ++b) {
      uint32_t id = child.sids[b];
      uint32_t pid = box_id((id >> 16) >> 1, (id & 0xffff) >> 1);
      int pb = parent.smap.at(pid);
      Cplx z0 = tree.center(l, id) - tree.center(l - 1, pid);
      const Cplx* a = &child.mult[b * stride];
      Cplx* out = &parent.mult[pb * stride];
      zpow[0] = 1;
      for (int k = 1; k <= P; ++k) zpow[k] = zpow[k - 1] * z0;
      out[0] += a[0];
      for (int m = 1; m <= P; ++m) {
        Cplx acc = -a[0] * zpow[m] / static_cast<double>(m);
        for (int k = 1; k <= m; ++k)
          acc += a[k] * zpow[m - k] * tree.B(m - 1, k - 1);
        out[m] += acc;
      }
    }
  }

  // ---- Translation + downward pass.
  for (int l = 2; l <= L; ++l) {
    Level& lev = tree.levels[l];
    Level& parent = tree.levels[l - 1];
    int nbox = static_cast<int>(lev.tids.size());
    parallel_for(nbox, threads, [&](int begin, int end) {
      std::vector<Cplx> izp(P + 1), tk(P + 1);
      for (int b = begin; b < end; ++b) {
        uint32_t id = lev.tids[b];
        int ix = id >> 16, iy = id & 0xffff;
        Cplx zt = tree.center(l, id);
        Cplx* loc = &lev.local[b * stride];

        // L2L from the parent's local expansion.
        if (l > 2) {
          uint32_t pid = box_id(ix >> 1, iy >> 1);
          auto pit = parent.tmap.find(pid);
          if (pit != parent.tmap.end()) {
            const Cplx* pl = &parent.local[pit->second * stride];
            Cplx z0 = zt - tree.center(l - 1, pid);
            std::vector<Cplx> z0p(P + 1);
            z0p[0] = 1;
            for (int k = 1; k <= P; ++k) z0p[k] = z0p[k - 1] * z0;
            for (int k = 0; k <= P; ++k) {
              Cplx acc = 0;
              for (int m = k; m <= P; ++m)
                acc += pl[m] * tree.B(m, k) * z0p[m - k];
              loc[k] += acc;
            }
          }
        }

        // M2L over the interaction list: children of the parent's neighbors
        // that are not adjacent to this box.
        int n = 1 << l;
        int px = ix >> 1, py = iy >> 1;
        for (int qx = px - 1; qx <= px + 1; ++qx) {
          for (int qy = py - 1; qy <= py + 1; ++qy) {
            if (qx < 0 || qy < 0 || qx >= n / 2 || qy >= n / 2) continue;
            for (int cx = 2 * qx; cx <= 2 * qx + 1; ++cx) {
              for (int cy = 2 * qy; cy <= 2 * qy + 1; ++cy) {
                if (std::abs(cx - ix) <= 1 && std::abs(cy - iy) <= 1) continue;
                auto sit = lev.smap.find(box_id(cx, cy));
                if (sit == lev.smap.end()) continue;
                const Cplx* a = &lev.mult[sit->second * stride];
                Cplx z0 = tree.center(l, box_id(cx, cy)) - zt;
                Cplx iz = 1.0 / z0;
                izp[0] = 1;
                for (int k = 1; k <= P; ++k) izp[k] = izp[k - 1] * iz;
                double sgn = -1;
                for (int k = 1; k <= P; ++k) {
                  tk[k] = a[k] * izp[k] * sgn;
                  sgn = -sgn;
                }
                Cplx b0 = a[0] * std::log(-z0);
                for (int k = 1; k <= P; ++k) b0 += tk[k];
                loc[0] += b0;
                for (int m = 1; m <= P; ++m) {
                  Cplx acc = -a[0] / static_cast<double>(m);
                  for (int k = 1; k <= P; ++k)
                    acc += tk[k] * tree.B(m + k - 1, k - 1);
                  loc[m] += acc * izp[m];
                }
              }
            }
          }
        }
      }
    });
  }

  // ---- Evaluation: L2P plus direct interactions with adjacent boxes.
  {
    Level& fl = tree.levels[L];
    int nbox = static_cast<int>(fl.tids.size());
    int n = 1 << L;
    double logscale = std::log(side);
    parallel_for(nbox, threads, [&](int begin, int end) {
      for (int b = begin; b < end; ++b) {
        uint32_t id = fl.tids[b];
        int ix = id >> 16, iy = id & 0xffff;
        Cplx zc = tree.center(L, id);
        const Cplx* loc = &fl.local[b * stride];
        for (int i : tgt_pts[b]) {
          Cplx u = ztgt[i] - zc;
          // Horner evaluation of the local expansion and its derivative.
          Cplx acc = loc[P];
          Cplx dacc = 0;
          for (int k = P - 1; k >= 0; --k) {
            dacc = dacc * u + acc;
            acc = acc * u + loc[k];
          }
          double pot = acc.real();
          Cplx fld = dacc;
          // Near field: the 3x3 neighborhood at the finest level.  Skipped
          // coincident sources must not enter the log(side) correction either.
          double skipped_charge = 0;
          for (int vx = ix - 1; vx <= ix + 1; ++vx) {
            for (int vy = iy - 1; vy <= iy + 1; ++vy) {
              if (vx < 0 || vy < 0 || vx >= n || vy >= n) continue;
              auto sit = fl.smap.find(box_id(vx, vy));
              if (sit == fl.smap.end()) continue;
              for (int j : src_pts[sit->second]) {
                Cplx d = ztgt[i] - zsrc[j];
                double r2 = std::norm(d);
                if (r2 == 0.0) {  // coincident pair skipped
                  skipped_charge += charges[j];
                  continue;
                }
                pot += charges[j] * 0.5 * std::log(r2);
                fld += charges[j] * std::conj(d) / r2;
              }
            }
          }
          // Undo the unit-box normalization.
          if (potential) potential[i] = pot + (qsum - skipped_charge) * logscale;
          if (field) field[i] = fld / side;
        }
      }
    });
  }
}

}  // namespace bie2d
